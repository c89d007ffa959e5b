#include "berthstay/timestamp.hpp"

#include <chrono>
#include <cstdio>

namespace berthstay {
namespace {

namespace chr = std::chrono;

constexpr std::int64_t kMinutesPerDay = 24 * 60;

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

chr::year_month_day civil(std::int64_t minutes) {
    return chr::year_month_day{chr::sys_days{chr::days{floor_div(minutes, kMinutesPerDay)}}};
}

bool parse_uint(std::string_view s, unsigned& out) {
    if (s.empty()) return false;
    unsigned v = 0;
    for (char c : s) {
        if (c < '0' || c > '9') return false;
        v = v * 10 + static_cast<unsigned>(c - '0');
    }
    out = v;
    return true;
}

}  // namespace

std::optional<Timestamp> Timestamp::from_civil(int year, unsigned month, unsigned day,
                                               unsigned hour, unsigned minute) {
    const chr::year_month_day ymd{chr::year{year}, chr::month{month}, chr::day{day}};
    if (!ymd.ok() || hour > 23 || minute > 59) return std::nullopt;
    const auto days = chr::sys_days{ymd}.time_since_epoch().count();
    return Timestamp{days * kMinutesPerDay + hour * 60 + minute};
}

int Timestamp::year() const { return static_cast<int>(civil(minutes_).year()); }
unsigned Timestamp::month() const { return static_cast<unsigned>(civil(minutes_).month()); }
unsigned Timestamp::day() const { return static_cast<unsigned>(civil(minutes_).day()); }

unsigned Timestamp::hour() const {
    return static_cast<unsigned>((minutes_ - floor_div(minutes_, kMinutesPerDay) * kMinutesPerDay) / 60);
}

unsigned Timestamp::minute() const {
    return static_cast<unsigned>((minutes_ - floor_div(minutes_, kMinutesPerDay) * kMinutesPerDay) % 60);
}

std::string Timestamp::to_string() const {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u %02u:%02u", year(), month(), day(), hour(), minute());
    return buf;
}

TimestampParse parse_timestamp(std::string_view text) {
    TimestampParse out;
    // YYYY-MM-DD HH:MM
    if (text.size() != 16 || text[4] != '-' || text[7] != '-' || text[10] != ' ' || text[13] != ':') {
        out.error = TimestampParseError::Malformed;
        return out;
    }
    unsigned y = 0, mo = 0, d = 0, h = 0, mi = 0;
    if (!parse_uint(text.substr(0, 4), y) || !parse_uint(text.substr(5, 2), mo) ||
        !parse_uint(text.substr(8, 2), d) || !parse_uint(text.substr(11, 2), h) ||
        !parse_uint(text.substr(14, 2), mi)) {
        out.error = TimestampParseError::Malformed;
        return out;
    }
    const chr::year_month_day ymd{chr::year{static_cast<int>(y)}, chr::month{mo}, chr::day{d}};
    if (!ymd.ok()) {
        out.error = TimestampParseError::InvalidDate;
        return out;
    }
    if (h > 23 || mi > 59) {
        out.error = TimestampParseError::InvalidTime;
        return out;
    }
    out.value = Timestamp::from_civil(static_cast<int>(y), mo, d, h, mi);
    return out;
}

std::optional<Timestamp> swap_month_day(Timestamp ts) {
    return Timestamp::from_civil(ts.year(), ts.day(), ts.month(), ts.hour(), ts.minute());
}

}  // namespace berthstay
