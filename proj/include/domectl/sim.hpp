#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "domectl/config.hpp"
#include "domectl/dome.hpp"
#include "domectl/ingest.hpp"

// Deterministic replay: weather timeline + crowd profile in, one decision
// per hour head out, fleet timers advanced at 1 s resolution in between.
// Inputs join by last-observation-carried-forward with a strict staleness
// bound; anything missing or stale fails safe to closed.

namespace domectl::sim {

struct EventLogEntry {
    core::Timestamp timestamp = 0;
    // Input snapshot; the optionals are empty when that source was
    // missing/stale at the head (the entry then records a fail-safe).
    std::optional<dome::WeatherReading> weather;
    std::optional<double> ratio;
    dome::DomeDecision decision;
    dome::DomeStatus fleet_status = dome::DomeStatus::Closed; // after the command
    std::size_t fleet_faults = 0; // cumulative fault count at this entry
};

struct ReplaySummary {
    std::size_t hours = 0;
    double total_open_seconds = 0.0;
    std::size_t rain_closures = 0;
    std::size_t no_rule_events = 0; // fail-safe + zero-mass outcomes
};

struct ReplayResult {
    std::vector<EventLogEntry> entries;
    ReplaySummary summary;
};

/// Simulation window: every hour head from ceil(first weather timestamp) to
/// the last weather timestamp. Throws DataError when the weather timeline is
/// empty; gaps are handled per the fail-safe rule, never fatally.
ReplayResult run_replay(const std::vector<ingest::WeatherRecord>& weather,
                        const std::vector<ingest::CrowdProfileEntry>& crowd,
                        const config::Config& config);

/// One self-describing record per line plus a summary footer; formats are
/// fixed-precision so identical runs serialize to identical bytes
/// (docs/log-format.md).
void write_log(std::ostream& os, const ReplayResult& result);

} // namespace domectl::sim
