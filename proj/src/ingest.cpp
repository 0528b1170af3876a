#include "domectl/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>

#include "domectl/dome.hpp"

namespace domectl::ingest {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            break;
        }
        out.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return out;
}

bool parse_double(std::string_view s, double& out) {
    s = trim(s);
    if (s.empty()) return false;
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc{} && ptr == end;
}

bool parse_int(std::string_view s, int& out) {
    s = trim(s);
    if (s.empty()) return false;
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc{} && ptr == end;
}

bool parse_bool(std::string_view s, bool& out) {
    const std::string v = lower(trim(s));
    if (v == "1" || v == "true" || v == "yes") { out = true; return true; }
    if (v == "0" || v == "false" || v == "no") { out = false; return true; }
    return false;
}

// Column index by lowercase header name; npos when absent.
std::size_t find_column(const std::vector<std::string_view>& header, std::string_view name) {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (lower(header[i]) == name) return i;
    return static_cast<std::size_t>(-1);
}

constexpr std::size_t kNoColumn = static_cast<std::size_t>(-1);

} // namespace

WeatherTable parse_weather_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line))
        throw DataError("weather csv: empty input, header row required");
    const auto header = split_csv(line);

    const std::size_t c_date = find_column(header, "date");
    const std::size_t c_hour = find_column(header, "hour");
    const std::size_t c_minute = find_column(header, "minute");
    const std::size_t c_temp = find_column(header, "temperature");
    const std::size_t c_hum = find_column(header, "humidity");
    for (auto [col, name] : {std::pair{c_date, "date"}, {c_hour, "hour"}, {c_minute, "minute"},
                             {c_temp, "temperature"}, {c_hum, "humidity"}})
        if (col == kNoColumn)
            throw DataError(std::string("weather csv: required column '") + name + "' missing");

    const std::size_t c_day = find_column(header, "day");
    const std::size_t c_wind = find_column(header, "wind");
    const std::size_t c_baro = find_column(header, "barometer");
    const std::size_t c_vis = find_column(header, "visibility");
    const std::size_t c_rain = find_column(header, "rain");

    WeatherTable table;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_csv(line);
        auto fault = [&](const std::string& msg) { table.faults.push_back({line_no, msg}); };
        if (fields.size() != header.size()) {
            fault("field count " + std::to_string(fields.size()) + " != header width " +
                  std::to_string(header.size()));
            continue;
        }

        WeatherRecord rec;
        const std::optional<core::DateTime> date = core::parse_date(fields[c_date]);
        if (!date) {
            fault("bad date '" + std::string(fields[c_date]) + "'");
            continue;
        }
        int hour = 0, minute = 0;
        if (!parse_int(fields[c_hour], hour) || hour < 0 || hour > 23) {
            fault("bad hour '" + std::string(fields[c_hour]) + "'");
            continue;
        }
        if (!parse_int(fields[c_minute], minute) || minute < 0 || minute > 59) {
            fault("bad minute '" + std::string(fields[c_minute]) + "'");
            continue;
        }
        if (!parse_double(fields[c_temp], rec.temperature)) {
            fault("bad temperature '" + std::string(fields[c_temp]) + "'");
            continue;
        }
        if (rec.temperature < -40.0 || rec.temperature > 80.0) {
            // DHT22 envelope; anything beyond is sensor garbage, not weather.
            fault("temperature " + std::string(fields[c_temp]) + " outside [-40,80]");
            continue;
        }
        if (!parse_double(fields[c_hum], rec.humidity) || rec.humidity < 0.0 ||
            rec.humidity > 100.0) {
            fault("bad humidity '" + std::string(fields[c_hum]) + "'");
            continue;
        }
        if (c_day != kNoColumn) rec.day_name = std::string(fields[c_day]);
        if (c_wind != kNoColumn && !fields[c_wind].empty()) {
            if (!parse_double(fields[c_wind], rec.wind)) { fault("bad wind"); continue; }
        }
        if (c_baro != kNoColumn && !fields[c_baro].empty()) {
            if (!parse_double(fields[c_baro], rec.barometer)) { fault("bad barometer"); continue; }
        }
        if (c_vis != kNoColumn && !fields[c_vis].empty()) {
            if (!parse_double(fields[c_vis], rec.visibility)) { fault("bad visibility"); continue; }
        }
        if (c_rain != kNoColumn && !fields[c_rain].empty()) {
            if (!parse_bool(fields[c_rain], rec.rain)) { fault("bad rain flag"); continue; }
        }

        rec.when = *date;
        rec.when.hour = hour;
        rec.when.minute = minute;
        rec.timestamp = core::to_timestamp(rec.when);
        table.records.push_back(std::move(rec));
    }
    return table;
}

CrowdProfile parse_crowd_profile(std::istream& in, std::int64_t capacity) {
    if (capacity <= 0) throw ConfigError("crowd profile: capacity must be positive");
    std::string line;
    if (!std::getline(in, line))
        throw DataError("crowd profile: empty input, header row required");
    const auto header = split_csv(line);

    const std::size_t c_ts = find_column(header, "timestamp");
    const std::size_t c_count = find_column(header, "count");
    const std::size_t c_ratio = find_column(header, "ratio");
    if (c_ts == kNoColumn) throw DataError("crowd profile: required column 'timestamp' missing");
    if ((c_count == kNoColumn) == (c_ratio == kNoColumn))
        throw DataError("crowd profile: exactly one of 'count'/'ratio' columns required");
    const bool by_count = c_count != kNoColumn;

    CrowdProfile profile;
    std::size_t line_no = 1;
    core::Timestamp prev_ts = 0;
    bool have_prev = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_csv(line);
        auto fault = [&](const std::string& msg) { profile.faults.push_back({line_no, msg}); };
        if (fields.size() != header.size()) {
            fault("field count mismatch");
            continue;
        }

        CrowdProfileEntry e;
        const std::optional<core::Timestamp> ts = core::parse_datetime(fields[c_ts]);
        if (!ts) {
            fault("bad timestamp '" + std::string(fields[c_ts]) + "'");
            continue;
        }
        e.timestamp = *ts;
        double value = 0.0;
        if (!parse_double(fields[by_count ? c_count : c_ratio], value)) {
            fault(std::string("bad ") + (by_count ? "count" : "ratio") + " value");
            continue;
        }
        if (by_count) {
            if (value < 0.0) {
                fault("negative count clamped to 0");
                value = 0.0;
            }
            e.count = value;
            e.ratio = dome::crowd_ratio(value, capacity);
        } else {
            e.ratio = value;
            if (value < 0.0 || value > 100.0) {
                e.ratio = std::min(std::max(value, 0.0), 100.0);
                char note[96];
                std::snprintf(note, sizeof(note), "ratio %g clamped to %g", value, e.ratio);
                fault(note);
            }
        }
        if (have_prev && e.timestamp < prev_ts)
            fault("timestamp not monotone, profile will be re-sorted");
        prev_ts = e.timestamp;
        have_prev = true;
        profile.entries.push_back(std::move(e));
    }
    std::stable_sort(profile.entries.begin(), profile.entries.end(),
                     [](const CrowdProfileEntry& a, const CrowdProfileEntry& b) {
                         return a.timestamp < b.timestamp;
                     });
    return profile;
}

density::HeadAnnotations parse_annotations(std::istream& in) {
    density::HeadAnnotations ann;
    std::string line;
    std::size_t line_no = 0;
    bool have_size = false;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view s = trim(line);
        if (s.empty() || s.front() == '#') continue;
        const std::string where = "annotations:" + std::to_string(line_no) + ": ";
        if (!have_size) {
            int w = 0, h = 0;
            std::size_t space = s.find(' ');
            if (space == std::string_view::npos || !parse_int(s.substr(0, space), w) ||
                !parse_int(trim(s.substr(space + 1)), h) || w <= 0 || h <= 0)
                throw DataError(where + "expected 'width height'");
            ann.width = static_cast<std::uint32_t>(w);
            ann.height = static_cast<std::uint32_t>(h);
            have_size = true;
            continue;
        }
        double x = 0.0, y = 0.0;
        std::size_t space = s.find(' ');
        if (space == std::string_view::npos || !parse_double(s.substr(0, space), x) ||
            !parse_double(trim(s.substr(space + 1)), y))
            throw DataError(where + "expected 'x y'");
        ann.points.push_back({x, y});
    }
    if (!have_size) throw DataError("annotations: missing 'width height' line");
    ann.validate();
    return ann;
}

std::vector<double> parse_number_lines(std::istream& in) {
    std::vector<double> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view s = trim(line);
        if (s.empty() || s.front() == '#') continue;
        double v = 0.0;
        if (!parse_double(s, v))
            throw DataError("numbers:" + std::to_string(line_no) + ": not a number: '" +
                            std::string(s) + "'");
        out.push_back(v);
    }
    return out;
}

namespace {

void put_double(std::ostream& os, double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    os << buf;
}

} // namespace

void write_weather_csv(std::ostream& os, std::span<const WeatherRecord> records) {
    os << "date,hour,minute,day,temperature,humidity,wind,barometer,visibility,rain\n";
    for (const WeatherRecord& r : records) {
        char head[64];
        std::snprintf(head, sizeof(head), "%04d-%02d-%02d,%d,%d,", r.when.year, r.when.month,
                      r.when.day, r.when.hour, r.when.minute);
        os << head << r.day_name << ',';
        put_double(os, r.temperature);
        os << ',';
        put_double(os, r.humidity);
        os << ',';
        put_double(os, r.wind);
        os << ',';
        put_double(os, r.barometer);
        os << ',';
        put_double(os, r.visibility);
        os << ',' << (r.rain ? "true" : "false") << '\n';
    }
}

void write_crowd_profile(std::ostream& os, std::span<const CrowdProfileEntry> entries) {
    os << "timestamp,ratio\n";
    for (const CrowdProfileEntry& e : entries) {
        os << core::format_timestamp(e.timestamp) << ',';
        put_double(os, e.ratio);
        os << '\n';
    }
}

void write_annotations(std::ostream& os, const density::HeadAnnotations& annotations) {
    os << annotations.width << ' ' << annotations.height << '\n';
    for (const density::Point& p : annotations.points) {
        put_double(os, p.x);
        os << ' ';
        put_double(os, p.y);
        os << '\n';
    }
}

} // namespace domectl::ingest
