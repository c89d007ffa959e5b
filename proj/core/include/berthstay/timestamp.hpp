#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace berthstay {

// Calendar instant with minute resolution, stored as minutes since
// 1970-01-01 00:00 (UTC, no time zone handling).
class Timestamp {
public:
    constexpr Timestamp() = default;
    constexpr explicit Timestamp(std::int64_t minutes_since_epoch)
        : minutes_(minutes_since_epoch) {}

    // Returns nullopt for an impossible calendar date or time of day.
    static std::optional<Timestamp> from_civil(int year, unsigned month, unsigned day,
                                               unsigned hour, unsigned minute);

    constexpr std::int64_t minutes() const { return minutes_; }

    int year() const;
    unsigned month() const;
    unsigned day() const;
    unsigned hour() const;
    unsigned minute() const;

    // "YYYY-MM-DD HH:MM"
    std::string to_string() const;

    constexpr Timestamp plus_minutes(std::int64_t m) const { return Timestamp{minutes_ + m}; }

    friend constexpr auto operator<=>(const Timestamp&, const Timestamp&) = default;

private:
    std::int64_t minutes_ = 0;
};

// Signed difference (later - earlier) in hours.
inline double hours_between(Timestamp earlier, Timestamp later) {
    return static_cast<double>(later.minutes() - earlier.minutes()) / 60.0;
}

enum class TimestampParseError { Malformed, InvalidDate, InvalidTime };

struct TimestampParse {
    std::optional<Timestamp> value;
    TimestampParseError error = TimestampParseError::Malformed;
};

// Parses exactly "YYYY-MM-DD HH:MM".
TimestampParse parse_timestamp(std::string_view text);

// Same wall-clock time with month and day exchanged, if that is a valid date.
std::optional<Timestamp> swap_month_day(Timestamp ts);

}  // namespace berthstay
