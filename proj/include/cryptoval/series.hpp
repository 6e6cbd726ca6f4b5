#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace cryptoval {

/// Daily series aligned with a dataset's date index. Days where the value
/// is not defined (incomplete lookback, zero denominator, ...) hold nullopt.
using Series = std::vector<std::optional<double>>;

/// Index of the first defined point, or nullopt if the series is empty.
std::optional<std::size_t> first_defined(const Series& s);
std::optional<std::size_t> last_defined(const Series& s);
std::size_t count_defined(const Series& s);

/// Defined values in index order.
std::vector<double> defined_values(const Series& s);

/// Pointwise quotient; undefined where either side is undefined, the
/// denominator is zero, or the result is not finite.
Series safe_divide(const Series& num, const Series& den);

Series to_series(const std::vector<double>& values);

/// Shortest decimal text that parses back to the same double.
std::string format_number(double v);
/// Empty string for an undefined point.
std::string format_number(const std::optional<double>& v);

}  // namespace cryptoval
