#include "domectl/civiltime.hpp"

#include <array>
#include <charconv>
#include <cstdio>

namespace domectl::core {

namespace {

bool is_leap(int y) {
    return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
}

int days_in_month(int y, int m) {
    static constexpr std::array<int, 12> kDays = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap(y)) {
        return 29;
    }
    return kDays[static_cast<std::size_t>(m - 1)];
}

// Howard Hinnant's civil-date algorithms, proleptic Gregorian calendar.
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = static_cast<unsigned>((153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1);
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yy + (m <= 2));
}

bool parse_int(std::string_view s, int& out) {
    const auto* begin = s.data();
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc{} && ptr == end;
}

} // namespace

bool is_valid_date(int year, int month, int day) {
    return month >= 1 && month <= 12 && day >= 1 && day <= days_in_month(year, month);
}

Timestamp to_timestamp(const DateTime& dt) {
    const std::int64_t days = days_from_civil(dt.year, dt.month, dt.day);
    return days * 86400 + dt.hour * 3600 + dt.minute * 60 + dt.second;
}

DateTime to_datetime(Timestamp ts) {
    std::int64_t days = ts / 86400;
    std::int64_t rem = ts % 86400;
    if (rem < 0) {
        days -= 1;
        rem += 86400;
    }
    DateTime dt;
    civil_from_days(days, dt.year, dt.month, dt.day);
    dt.hour = static_cast<int>(rem / 3600);
    dt.minute = static_cast<int>(rem % 3600 / 60);
    dt.second = static_cast<int>(rem % 60);
    return dt;
}

std::optional<DateTime> parse_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        return std::nullopt;
    }
    DateTime dt;
    if (!parse_int(text.substr(0, 4), dt.year) || !parse_int(text.substr(5, 2), dt.month) ||
        !parse_int(text.substr(8, 2), dt.day)) {
        return std::nullopt;
    }
    if (!is_valid_date(dt.year, dt.month, dt.day)) {
        return std::nullopt;
    }
    return dt;
}

std::optional<Timestamp> parse_datetime(std::string_view text) {
    if (text.size() < 16 || (text[10] != 'T' && text[10] != ' ')) {
        return std::nullopt;
    }
    auto date = parse_date(text.substr(0, 10));
    if (!date) {
        return std::nullopt;
    }
    std::string_view clock = text.substr(11);
    if (clock.size() != 5 && clock.size() != 8) {
        return std::nullopt;
    }
    if (clock[2] != ':' || (clock.size() == 8 && clock[5] != ':')) {
        return std::nullopt;
    }
    DateTime dt = *date;
    if (!parse_int(clock.substr(0, 2), dt.hour) || !parse_int(clock.substr(3, 2), dt.minute)) {
        return std::nullopt;
    }
    if (clock.size() == 8 && !parse_int(clock.substr(6, 2), dt.second)) {
        return std::nullopt;
    }
    if (dt.hour > 23 || dt.minute > 59 || dt.second > 59 || dt.hour < 0 || dt.minute < 0 || dt.second < 0) {
        return std::nullopt;
    }
    return to_timestamp(dt);
}

std::string format_timestamp(Timestamp ts) {
    const DateTime dt = to_datetime(ts);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d", dt.year, dt.month, dt.day, dt.hour,
                  dt.minute, dt.second);
    return buf;
}

Timestamp floor_to_head(Timestamp ts, int head_minute) {
    const std::int64_t offset = static_cast<std::int64_t>(head_minute) * 60;
    std::int64_t shifted = ts - offset;
    std::int64_t head = shifted / kSecondsPerHour * kSecondsPerHour;
    if (shifted < 0 && shifted % kSecondsPerHour != 0) {
        head -= kSecondsPerHour;
    }
    return head + offset;
}

Timestamp ceil_to_head(Timestamp ts, int head_minute) {
    const Timestamp floored = floor_to_head(ts, head_minute);
    return floored == ts ? ts : floored + kSecondsPerHour;
}

} // namespace domectl::core
