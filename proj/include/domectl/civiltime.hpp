#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace domectl::core {

/// Calendar timestamp as seconds since 1970-01-01 00:00:00, no time zone.
/// All controller and log timestamps are civil wall-clock values.
using Timestamp = std::int64_t;

constexpr std::int64_t kSecondsPerHour = 3600;

struct DateTime {
    int year = 1970;
    int month = 1; // 1..12
    int day = 1;   // 1..31
    int hour = 0;  // 0..23
    int minute = 0;
    int second = 0;
};

bool is_valid_date(int year, int month, int day);

Timestamp to_timestamp(const DateTime& dt);
DateTime to_datetime(Timestamp ts);

/// "YYYY-MM-DD"
std::optional<DateTime> parse_date(std::string_view text);
/// "YYYY-MM-DDTHH:MM" or "YYYY-MM-DDTHH:MM:SS" (also accepts ' ' instead of 'T')
std::optional<Timestamp> parse_datetime(std::string_view text);

/// "YYYY-MM-DDTHH:MM:SS"
std::string format_timestamp(Timestamp ts);

/// Largest hour head (top of hour shifted by head_minute) at or before ts.
Timestamp floor_to_head(Timestamp ts, int head_minute);
/// Smallest hour head at or after ts.
Timestamp ceil_to_head(Timestamp ts, int head_minute);

} // namespace domectl::core
