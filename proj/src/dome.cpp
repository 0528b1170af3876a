#include "domectl/dome.hpp"

#include <algorithm>
#include <cmath>

namespace domectl::dome {

double crowd_ratio(double count, std::int64_t capacity) {
    if (capacity <= 0) throw ConfigError("crowd_ratio: capacity must be positive");
    if (!std::isfinite(count)) throw DataError("crowd_ratio: count is not finite");
    const double ratio = 100.0 * count / static_cast<double>(capacity);
    return std::min(std::max(ratio, 0.0), 100.0);
}

CrowdEstimate CrowdEstimate::from_count(double count, std::int64_t capacity) {
    return {count, capacity, crowd_ratio(count, capacity)};
}

CrowdEstimate CrowdEstimate::from_ratio(double ratio) {
    CrowdEstimate e;
    e.ratio = std::min(std::max(ratio, 0.0), 100.0);
    return e;
}

void ControllerConfig::validate() const {
    if (capacity <= 0) throw ConfigError("controller: capacity must be positive");
    if (dome_count < 1) throw ConfigError("controller: dome count must be >= 1");
    if (!(travel_seconds > 0.0)) throw ConfigError("controller: travel_seconds must be > 0");
    if (head_minute < 0 || head_minute > 59)
        throw ConfigError("controller: head_minute must be in [0,59]");
    if (staleness_seconds <= 0) throw ConfigError("controller: staleness_seconds must be > 0");
}

namespace {

fuzzy::FuzzyOutcome synthetic_outcome(std::size_t rule_count, fuzzy::InferenceFlag flag,
                                      bool stop_atom) {
    fuzzy::FuzzyOutcome out;
    out.crisp = 0.0;
    out.flag = flag;
    out.fired.resize(rule_count);
    for (std::size_t i = 0; i < rule_count; ++i) out.fired[i] = {i, 0.0};
    if (stop_atom) out.aggregate.atoms.emplace_back(0.0, 1.0);
    return out;
}

} // namespace

DomeDecision decide(const WeatherReading& weather, const CrowdEstimate& crowd,
                    const fuzzy::InferenceEngine& engine) {
    DomeDecision d;
    d.issued_at = weather.timestamp;
    if (weather.rain) {
        // Hardware override ahead of the fuzzy system: domes close, engine
        // untouched. The trace carries a unit mass at 0 s for the log.
        d.open_seconds = 0.0;
        d.label = kLabelStop;
        d.trace = synthetic_outcome(engine.rules().size(), fuzzy::InferenceFlag::Ok, true);
        return d;
    }
    d.trace = engine.infer({{"crowd", crowd.ratio}, {"weather", weather.temperature}});
    if (d.trace.flag == fuzzy::InferenceFlag::NoRuleFired) {
        d.open_seconds = 0.0;
        d.label = kLabelNoRule;
        return d;
    }
    const double hi = engine.output().axis().hi;
    d.open_seconds = std::min(std::max(d.trace.crisp, 0.0), hi);
    const fuzzy::RuleActivation* top = d.trace.strongest();
    d.label = top ? engine.consequent_label(top->rule_index) : kLabelNoRule;
    return d;
}

DomeDecision fail_safe_decision(std::size_t rule_count, core::Timestamp issued_at) {
    DomeDecision d;
    d.open_seconds = 0.0;
    d.label = kLabelNoRule;
    d.trace = synthetic_outcome(rule_count, fuzzy::InferenceFlag::NoRuleFired, false);
    d.issued_at = issued_at;
    return d;
}

const char* status_name(DomeStatus s) {
    switch (s) {
        case DomeStatus::Closed: return "closed";
        case DomeStatus::Opening: return "opening";
        case DomeStatus::Open: return "open";
        case DomeStatus::Closing: return "closing";
    }
    return "?";
}

ApplyResult apply_decision(const DomeState& state, const DomeDecision& decision,
                           double travel_seconds) {
    ApplyResult r;
    r.state = state;
    if (decision.open_seconds > 0.0) {
        switch (state.status) {
            case DomeStatus::Closed:
                r.state = {DomeStatus::Opening, 0.0, decision.open_seconds};
                break;
            case DomeStatus::Opening:
                r.state.pending_open = decision.open_seconds; // refresh target
                break;
            case DomeStatus::Open:
                r.state.seconds = decision.open_seconds; // restart countdown
                break;
            case DomeStatus::Closing:
                r.rejected = true;
                r.fault = "open request while closing rejected (label " + decision.label + ")";
                break;
        }
        return r;
    }
    // Zero duration: stop/fail-safe. Any dome not already shut turns around.
    switch (state.status) {
        case DomeStatus::Closed:
            break; // no-op
        case DomeStatus::Opening:
            // Rails are symmetric: whatever was traversed must be undone.
            r.state = {DomeStatus::Closing, std::max(travel_seconds - state.seconds, 0.0), 0.0};
            break;
        case DomeStatus::Open:
            r.state = {DomeStatus::Closing, 0.0, 0.0};
            break;
        case DomeStatus::Closing:
            break; // already on its way
    }
    return r;
}

DomeState advance_second(const DomeState& state, double travel_seconds) {
    DomeState s = state;
    switch (state.status) {
        case DomeStatus::Closed:
            break;
        case DomeStatus::Opening:
            s.seconds += 1.0;
            if (s.seconds >= travel_seconds) s = {DomeStatus::Open, s.pending_open, 0.0};
            break;
        case DomeStatus::Open:
            s.seconds -= 1.0;
            if (s.seconds <= 0.0) s = {DomeStatus::Closing, 0.0, 0.0};
            break;
        case DomeStatus::Closing:
            s.seconds += 1.0;
            if (s.seconds >= travel_seconds) s = {DomeStatus::Closed, 0.0, 0.0};
            break;
    }
    return s;
}

DomeFleet::DomeFleet(int count, double travel_seconds) : travel_seconds_(travel_seconds) {
    if (count < 1) throw ConfigError("fleet: dome count must be >= 1");
    if (!(travel_seconds > 0.0)) throw ConfigError("fleet: travel_seconds must be > 0");
    domes_.resize(static_cast<std::size_t>(count));
}

void DomeFleet::command(const DomeDecision& decision) {
    bool fault_logged = false;
    for (DomeState& d : domes_) {
        ApplyResult r = apply_decision(d, decision, travel_seconds_);
        d = r.state;
        // Domes move in lockstep, so one note covers the whole fleet.
        if (r.rejected && !fault_logged) {
            faults_.push_back(r.fault);
            fault_logged = true;
        }
    }
}

void DomeFleet::advance_seconds(std::int64_t seconds) {
    for (std::int64_t t = 0; t < seconds; ++t)
        for (DomeState& d : domes_) d = advance_second(d, travel_seconds_);
}

DomeStatus DomeFleet::uniform_status() const {
    const DomeStatus s = domes_.front().status;
    for (const DomeState& d : domes_)
        if (d.status != s) throw DataError("fleet: dome statuses diverged");
    return s;
}

HourlyController::HourlyController(const fuzzy::InferenceEngine& engine,
                                   const ControllerConfig& config)
    : engine_(engine), config_(config), fleet_(config.dome_count, config.travel_seconds) {
    config_.validate();
}

std::optional<DomeDecision> HourlyController::tick(core::Timestamp now, const Provider& inputs) {
    if (!started_) {
        started_ = true;
        now_ = now;
        next_head_ = core::ceil_to_head(now, config_.head_minute);
    } else {
        if (now < now_) throw DataError("controller: clock moved backwards");
        fleet_.advance_seconds(now - now_);
        now_ = now;
    }
    if (now < next_head_) return std::nullopt;

    const core::Timestamp head = next_head_;
    next_head_ += core::kSecondsPerHour;

    Inputs in = inputs(head);
    DomeDecision decision;
    if (!in.weather || !in.ratio) {
        decision = fail_safe_decision(engine_.rules().size(), head);
    } else {
        decision = decide(*in.weather, CrowdEstimate::from_ratio(*in.ratio), engine_);
        decision.issued_at = head;
    }
    fleet_.command(decision);
    return decision;
}

} // namespace domectl::dome
