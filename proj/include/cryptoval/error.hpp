#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cryptoval {

enum class ErrorKind {
    // ingest
    MissingDateColumn,
    DuplicateDate,
    NonMonotoneDate,
    MalformedCsv,
    EmptyOverlap,
    InvariantViolation,
    UnfilledGap,
    RangeOutOfBounds,
    // metrics
    HorizonExceedsData,
    // stats
    InsufficientData,
    DegenerateRegressor,
    ZeroVarianceColumn,
    ConvergenceFailure,
    // explain
    NoValidPoints,
    TooFewPoints,
    EmptySet,
    SingleClassTraining,
    EmptySplit,
    // backtest
    SignalDateMismatch,
    WindowOrder,
    // shared
    InvalidArgument,
    Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

// All engine failures surface as this exception; `kind()` identifies the
// condition so callers (and the CLI) can branch without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace cryptoval
