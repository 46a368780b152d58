#pragma once
#include <stdexcept>
#include <string>

namespace sitlab {

/// Malformed input: bad number grammar, unknown JSON field, invalid flag.
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Input outside the mathematical domain of an operation
/// (eccentricity out of [0,1), negative radicand, gap below threshold, ...).
struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A budget ran out before the result could be certified.  Distinguishes
/// "not yet certified" from "wrong"; the computation may succeed with a
/// larger budget.
struct ResourceError : std::runtime_error {
    explicit ResourceError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Grid classifications violated an invariant that valid inputs cannot
/// violate (two undefined nodes in a row, adjacent same-sign runs, ambiguous
/// gap decoding).
struct InconsistencyError : std::runtime_error {
    explicit InconsistencyError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A 21-component state was not of the embedded Sitnikov shape.
struct ShapeError : DomainError {
    explicit ShapeError(const std::string& msg) : DomainError(msg) {}
};

/// Exit codes used by the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitParse = 2,
    kExitDomain = 3,
    kExitResource = 4,
    kExitInconsistency = 5,
};

} // namespace sitlab
