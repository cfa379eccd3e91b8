#ifndef STEPREG_ERRORS_HPP
#define STEPREG_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace stepreg {

// Base class for mathematically infeasible requests, as opposed to usage
// errors (std::invalid_argument). The CLI maps these to exit code 2.
struct InfeasibleError : std::runtime_error {
    explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

// The balanced partition set is empty for the requested (n, K, constraint).
struct NoBalancedPartitionError : InfeasibleError {
    explicit NoBalancedPartitionError(const std::string& what) : InfeasibleError(what) {}
};

// A breakpoint does not lie on the candidate split grid, so no finite
// complexity number can be certified.
struct OffGridError : InfeasibleError {
    explicit OffGridError(const std::string& what) : InfeasibleError(what) {}
};

// Every candidate model size was skipped; the posterior is undefined.
struct NoModelError : InfeasibleError {
    explicit NoModelError(const std::string& what) : InfeasibleError(what) {}
};

// An exhaustive computation was requested beyond its guard bound.
struct TooLargeError : std::runtime_error {
    explicit TooLargeError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace stepreg

#endif
