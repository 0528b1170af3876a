#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "domectl/civiltime.hpp"
#include "domectl/errors.hpp"
#include "domectl/fuzzy.hpp"

// Sensor-world side of the controller: crowd ratio arithmetic, the hard
// rain override in front of the fuzzy engine, and the dome-fleet actuation
// state machine driven on hourly ticks.

namespace domectl::dome {

struct WeatherReading {
    double temperature = 0.0; // °C
    double humidity = 0.0;    // %
    bool rain = false;        // hardware rain-sensor flag
    core::Timestamp timestamp = 0;
};

/// 100*count/capacity clamped into [0,100]. capacity <= 0 is a config fault.
double crowd_ratio(double count, std::int64_t capacity);

struct CrowdEstimate {
    double count = 0.0;
    std::int64_t capacity = 0;
    double ratio = 0.0; // %

    static CrowdEstimate from_count(double count, std::int64_t capacity);
    static CrowdEstimate from_ratio(double ratio); // clamped into [0,100]
};

struct ControllerConfig {
    std::int64_t capacity = 698000;   // persons
    int dome_count = 27;
    double travel_seconds = 60.0;     // closed <-> open rail traversal
    int head_minute = 0;              // minute-of-hour the decision fires at
    std::int64_t staleness_seconds = core::kSecondsPerHour; // exclusive bound

    void validate() const; // throws ConfigError
};

struct DomeDecision {
    double open_seconds = 0.0;
    std::string label;        // consequent of the strongest rule; "Stop"/"NoRule"
    fuzzy::FuzzyOutcome trace;
    core::Timestamp issued_at = 0;
};

inline constexpr const char* kLabelStop = "Stop";
inline constexpr const char* kLabelNoRule = "NoRule";

/// Rain short-circuits to (0, Stop) without consulting the engine; otherwise
/// Mamdani inference on {crowd: ratio, weather: temperature}. A zero-mass
/// aggregate maps to the (0, NoRule) fail-safe. Never throws on sensor values.
DomeDecision decide(const WeatherReading& weather, const CrowdEstimate& crowd,
                    const fuzzy::InferenceEngine& engine);

/// Fail-safe decision used when inputs are missing or stale at a tick.
DomeDecision fail_safe_decision(std::size_t rule_count, core::Timestamp issued_at);

enum class DomeStatus { Closed, Opening, Open, Closing };

const char* status_name(DomeStatus s);

struct DomeState {
    DomeStatus status = DomeStatus::Closed;
    double seconds = 0.0;      // Opening/Closing: travel elapsed; Open: remaining
    double pending_open = 0.0; // decision duration carried through Opening
};

struct ApplyResult {
    DomeState state;
    bool rejected = false;     // illegal request left the state unchanged
    std::string fault;
};

/// Transition on a decision. Open durations count from fully-open (travel
/// time excluded); a zero-duration decision sends any non-Closed dome back
/// through Closing. Re-opening while Closing is rejected as a fault.
ApplyResult apply_decision(const DomeState& state, const DomeDecision& decision,
                           double travel_seconds);

/// One second of timer progress.
DomeState advance_second(const DomeState& state, double travel_seconds);

/// 27 identical domes commanded in lockstep; per-command faults are kept
/// for the log. Status stays uniform because every dome sees every command.
class DomeFleet {
public:
    DomeFleet(int count, double travel_seconds);

    void command(const DomeDecision& decision);
    void advance_seconds(std::int64_t seconds);

    std::span<const DomeState> domes() const { return domes_; }
    DomeStatus uniform_status() const; // throws DataError if domes diverge
    std::span<const std::string> faults() const { return faults_; }

private:
    std::vector<DomeState> domes_;
    double travel_seconds_;
    std::vector<std::string> faults_;
};

/// Hourly decision loop: advances fleet timers second by second and emits
/// one decision whenever the clock crosses an hour head. The provider hands
/// back whatever inputs are live at that instant; absent inputs fail safe.
class HourlyController {
public:
    struct Inputs {
        std::optional<WeatherReading> weather;
        std::optional<double> ratio; // %
    };
    using Provider = std::function<Inputs(core::Timestamp)>;

    HourlyController(const fuzzy::InferenceEngine& engine, const ControllerConfig& config);

    /// Clock must not move backwards. At most one decision per call; advance
    /// in steps of <= 1 h to never skip a head.
    std::optional<DomeDecision> tick(core::Timestamp now, const Provider& inputs);

    const DomeFleet& fleet() const { return fleet_; }
    const ControllerConfig& config() const { return config_; }

private:
    const fuzzy::InferenceEngine& engine_;
    ControllerConfig config_;
    DomeFleet fleet_;
    core::Timestamp now_ = 0;
    core::Timestamp next_head_ = 0;
    bool started_ = false;
};

} // namespace domectl::dome
