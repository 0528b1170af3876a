#include "domectl/sim.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

namespace domectl::sim {

namespace {

// Last record at or before `at` that is younger than the staleness bound
// (exclusive: a reading exactly one bound old is already stale).
template <class T, class TsOf>
const T* latest_fresh(const std::vector<T>& sorted, core::Timestamp at,
                      std::int64_t staleness_seconds, TsOf ts_of) {
    const T* best = nullptr;
    for (const T& item : sorted) {
        if (ts_of(item) > at) break;
        best = &item;
    }
    if (!best) return nullptr;
    if (at - ts_of(*best) >= staleness_seconds) return nullptr;
    return best;
}

} // namespace

ReplayResult run_replay(const std::vector<ingest::WeatherRecord>& weather,
                        const std::vector<ingest::CrowdProfileEntry>& crowd,
                        const config::Config& config) {
    if (weather.empty()) throw DataError("replay: weather timeline is empty");

    std::vector<ingest::WeatherRecord> wsorted = weather;
    std::stable_sort(wsorted.begin(), wsorted.end(),
                     [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
    std::vector<ingest::CrowdProfileEntry> csorted = crowd;
    std::stable_sort(csorted.begin(), csorted.end(),
                     [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });

    const dome::ControllerConfig& cc = config.controller;
    const core::Timestamp first_head = core::ceil_to_head(wsorted.front().timestamp, cc.head_minute);
    const core::Timestamp last_ts = wsorted.back().timestamp;

    dome::HourlyController controller(config.engine, cc);
    auto provider = [&](core::Timestamp head) {
        dome::HourlyController::Inputs in;
        const ingest::WeatherRecord* w = latest_fresh(
            wsorted, head, cc.staleness_seconds, [](const auto& r) { return r.timestamp; });
        if (w)
            in.weather = dome::WeatherReading{w->temperature, w->humidity, w->rain, w->timestamp};
        const ingest::CrowdProfileEntry* c = latest_fresh(
            csorted, head, cc.staleness_seconds, [](const auto& e) { return e.timestamp; });
        if (c) in.ratio = c->ratio;
        return in;
    };

    ReplayResult result;
    for (core::Timestamp t = first_head; t <= last_ts; ++t) {
        const std::optional<dome::DomeDecision> decision = controller.tick(t, provider);
        if (!decision) continue;

        EventLogEntry entry;
        entry.timestamp = decision->issued_at;
        dome::HourlyController::Inputs in = provider(decision->issued_at);
        entry.weather = in.weather;
        entry.ratio = in.ratio;
        entry.decision = *decision;
        entry.fleet_status = controller.fleet().uniform_status();
        entry.fleet_faults = controller.fleet().faults().size();

        result.summary.hours += 1;
        result.summary.total_open_seconds += decision->open_seconds;
        if (entry.weather && entry.weather->rain) result.summary.rain_closures += 1;
        if (decision->label == dome::kLabelNoRule) result.summary.no_rule_events += 1;
        result.entries.push_back(std::move(entry));
    }
    return result;
}

void write_log(std::ostream& os, const ReplayResult& result) {
    char buf[160];
    for (const EventLogEntry& e : result.entries) {
        os << "decision ts=" << core::format_timestamp(e.timestamp);
        if (e.weather) {
            std::snprintf(buf, sizeof(buf), " temp=%.2f humidity=%.2f rain=%d",
                          e.weather->temperature, e.weather->humidity, e.weather->rain ? 1 : 0);
            os << buf;
        } else {
            os << " temp=na humidity=na rain=na";
        }
        if (e.ratio) {
            std::snprintf(buf, sizeof(buf), " ratio=%.2f", *e.ratio);
            os << buf;
        } else {
            os << " ratio=na";
        }
        const char* flag = (!e.weather || !e.ratio)
                               ? "failsafe"
                               : (e.decision.trace.flag == fuzzy::InferenceFlag::Ok ? "ok"
                                                                                    : "norule");
        std::snprintf(buf, sizeof(buf), " open_seconds=%.2f minutes=%.2f label=%s flag=%s fleet=%s",
                      e.decision.open_seconds, e.decision.open_seconds / 60.0,
                      e.decision.label.c_str(), flag, dome::status_name(e.fleet_status));
        os << buf;
        if (e.fleet_faults > 0) os << " faults=" << e.fleet_faults;
        os << " fired=";
        if (!e.weather || !e.ratio) {
            os << '-';
        } else {
            for (std::size_t i = 0; i < e.decision.trace.fired.size(); ++i) {
                const fuzzy::RuleActivation& a = e.decision.trace.fired[i];
                std::snprintf(buf, sizeof(buf), "%s%zu:%.4f", i ? "," : "", a.rule_index + 1,
                              a.strength);
                os << buf;
            }
        }
        os << '\n';
    }
    std::snprintf(buf, sizeof(buf),
                  "summary hours=%zu total_open_seconds=%.2f rain_closures=%zu no_rule=%zu\n",
                  result.summary.hours, result.summary.total_open_seconds,
                  result.summary.rain_closures, result.summary.no_rule_events);
    os << buf;
}

} // namespace domectl::sim
