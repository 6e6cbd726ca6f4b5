#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace cryptoval {

/// Calendar day (UTC) stored as a day count from 1970-01-01.
class Date {
public:
    constexpr Date() = default;
    constexpr explicit Date(std::int32_t days_since_epoch) : days_(days_since_epoch) {}

    static Date from_ymd(int year, unsigned month, unsigned day);

    /// Accepts `YYYY-MM-DD`, optionally followed by a `T...` or ` ...` time part
    /// (which is ignored). Returns nullopt for anything else or an invalid day.
    static std::optional<Date> parse(std::string_view text);

    constexpr std::int32_t days() const { return days_; }
    std::string to_string() const;

    constexpr Date operator+(std::int32_t n) const { return Date(days_ + n); }
    constexpr Date operator-(std::int32_t n) const { return Date(days_ - n); }
    constexpr std::int32_t operator-(Date other) const { return days_ - other.days_; }

    constexpr auto operator<=>(const Date&) const = default;

private:
    std::int32_t days_ = 0;
};

}  // namespace cryptoval
