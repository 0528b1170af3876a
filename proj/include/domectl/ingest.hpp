#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "domectl/civiltime.hpp"
#include "domectl/density.hpp"
#include "domectl/errors.hpp"

// Fault-tolerant parsers for the external text formats: weather-history CSV,
// crowd-profile CSV and head-annotation lists. Schema problems are fatal
// (DataError); malformed data rows become fault entries and parsing goes on.

namespace domectl::ingest {

struct RowFault {
    std::size_t line = 0; // 1-based, header is line 1
    std::string message;
};

struct WeatherRecord {
    core::DateTime when{};   // second always 0 (source granularity is minutes)
    std::string day_name;    // optional column, empty when absent
    double temperature = 0.0; // °C
    double humidity = 0.0;    // %
    double wind = 0.0;        // opaque numeric passthroughs
    double barometer = 0.0;
    double visibility = 0.0;
    bool rain = false;        // optional column, false when absent
    core::Timestamp timestamp = 0; // derived from `when`
};

struct WeatherTable {
    std::vector<WeatherRecord> records;
    std::vector<RowFault> faults;
};

/// CSV dialect: comma separators, first row is the header, '.' decimal
/// point, no quoting. Columns resolve by (case-insensitive) header name;
/// required: date, hour, minute, temperature, humidity. Extras are ignored,
/// known optionals (day, wind, barometer, visibility, rain) are captured.
WeatherTable parse_weather_csv(std::istream& in); // throws DataError on schema faults

enum class CrowdSource { File, DensityMap, Synthetic };

struct CrowdProfileEntry {
    core::Timestamp timestamp = 0;
    double ratio = 0.0;            // %, clamped into [0,100]
    std::optional<double> count;   // original persons figure when file-born
    CrowdSource source = CrowdSource::File;
};

struct CrowdProfile {
    std::vector<CrowdProfileEntry> entries; // sorted by timestamp
    std::vector<RowFault> faults;
};

/// Header needs "timestamp" plus exactly one of "count"/"ratio"; counts are
/// converted through crowd_ratio(capacity) at load time. Out-of-range values
/// clamp with a fault note; non-monotone timestamps are noted and resorted.
CrowdProfile parse_crowd_profile(std::istream& in, std::int64_t capacity);

/// Annotation list: '#' comments, first data line "width height", then one
/// "x y" pair per line (pixels, origin top-left).
density::HeadAnnotations parse_annotations(std::istream& in); // throws DataError

/// One number per line, '#' comments allowed; for count-series fixtures.
std::vector<double> parse_number_lines(std::istream& in); // throws DataError

// Serializers for the same formats (round-trip fixtures, synthetic data).
void write_weather_csv(std::ostream& os, std::span<const WeatherRecord> records);
void write_crowd_profile(std::ostream& os, std::span<const CrowdProfileEntry> entries);
void write_annotations(std::ostream& os, const density::HeadAnnotations& annotations);

} // namespace domectl::ingest
