#include "cryptoval/date.hpp"
#include "cryptoval/error.hpp"
#include "cryptoval/series.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace cryptoval {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::MissingDateColumn: return "MissingDateColumn";
        case ErrorKind::DuplicateDate: return "DuplicateDate";
        case ErrorKind::NonMonotoneDate: return "NonMonotoneDate";
        case ErrorKind::MalformedCsv: return "MalformedCsv";
        case ErrorKind::EmptyOverlap: return "EmptyOverlap";
        case ErrorKind::InvariantViolation: return "InvariantViolation";
        case ErrorKind::UnfilledGap: return "UnfilledGap";
        case ErrorKind::RangeOutOfBounds: return "RangeOutOfBounds";
        case ErrorKind::HorizonExceedsData: return "HorizonExceedsData";
        case ErrorKind::InsufficientData: return "InsufficientData";
        case ErrorKind::DegenerateRegressor: return "DegenerateRegressor";
        case ErrorKind::ZeroVarianceColumn: return "ZeroVarianceColumn";
        case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
        case ErrorKind::NoValidPoints: return "NoValidPoints";
        case ErrorKind::TooFewPoints: return "TooFewPoints";
        case ErrorKind::EmptySet: return "EmptySet";
        case ErrorKind::SingleClassTraining: return "SingleClassTraining";
        case ErrorKind::EmptySplit: return "EmptySplit";
        case ErrorKind::SignalDateMismatch: return "SignalDateMismatch";
        case ErrorKind::WindowOrder: return "WindowOrder";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::Io: return "Io";
    }
    return "Unknown";
}

Date Date::from_ymd(int year, unsigned month, unsigned day) {
    const std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{month},
                                          std::chrono::day{day}};
    if (!ymd.ok()) {
        throw Error(ErrorKind::InvalidArgument, "invalid calendar date");
    }
    return Date(static_cast<std::int32_t>(std::chrono::sys_days{ymd}.time_since_epoch().count()));
}

std::optional<Date> Date::parse(std::string_view text) {
    if (text.size() < 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    if (text.size() > 10 && text[10] != 'T' && text[10] != ' ') return std::nullopt;

    auto field = [&](std::size_t pos, std::size_t len, int& out) {
        const char* first = text.data() + pos;
        const char* last = first + len;
        auto [ptr, ec] = std::from_chars(first, last, out);
        return ec == std::errc{} && ptr == last;
    };
    int y = 0, m = 0, d = 0;
    if (!field(0, 4, y) || !field(5, 2, m) || !field(8, 2, d)) return std::nullopt;
    if (m < 1 || d < 1) return std::nullopt;

    const std::chrono::year_month_day ymd{std::chrono::year{y},
                                          std::chrono::month{static_cast<unsigned>(m)},
                                          std::chrono::day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    return Date(static_cast<std::int32_t>(std::chrono::sys_days{ymd}.time_since_epoch().count()));
}

std::string Date::to_string() const {
    const std::chrono::year_month_day ymd{std::chrono::sys_days{std::chrono::days{days_}}};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

std::optional<std::size_t> first_defined(const Series& s) {
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i]) return i;
    }
    return std::nullopt;
}

std::optional<std::size_t> last_defined(const Series& s) {
    for (std::size_t i = s.size(); i-- > 0;) {
        if (s[i]) return i;
    }
    return std::nullopt;
}

std::size_t count_defined(const Series& s) {
    std::size_t n = 0;
    for (const auto& v : s) n += v.has_value();
    return n;
}

std::vector<double> defined_values(const Series& s) {
    std::vector<double> out;
    out.reserve(s.size());
    for (const auto& v : s) {
        if (v) out.push_back(*v);
    }
    return out;
}

Series safe_divide(const Series& num, const Series& den) {
    Series out(num.size());
    for (std::size_t i = 0; i < num.size() && i < den.size(); ++i) {
        if (!num[i] || !den[i] || *den[i] == 0.0) continue;
        const double q = *num[i] / *den[i];
        if (std::isfinite(q)) out[i] = q;
    }
    return out;
}

Series to_series(const std::vector<double>& values) {
    return Series(values.begin(), values.end());
}

std::string format_number(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string format_number(const std::optional<double>& v) {
    return v ? format_number(*v) : std::string{};
}

}  // namespace cryptoval
