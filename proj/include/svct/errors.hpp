#pragma once

#include <stdexcept>
#include <string>

namespace svct {

// Iterative routine failed to converge, a matrix solve hit a singular /
// ill-conditioned system, or a result left its valid range. The message
// carries enough context (routine, parameters) to reproduce the failure.
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

// A group/leaf required by a statistic is empty, overlapping where it must be
// disjoint, or otherwise unusable as a partition of the sample.
class partition_error : public std::runtime_error {
public:
    explicit partition_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Data carries no information for the requested estimate (constant column,
// zero within-group variance, too few observations).
class degenerate_data_error : public std::runtime_error {
public:
    explicit degenerate_data_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Operation is not defined for the object it was asked of (e.g. the score of
// an independence copula, which has no parameter).
class unsupported_operation : public std::logic_error {
public:
    explicit unsupported_operation(const std::string& msg) : std::logic_error(msg) {}
};

} // namespace svct
