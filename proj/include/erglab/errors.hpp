#pragma once

#include <stdexcept>
#include <string>

namespace erglab {

// Input violates a structural requirement of the object being built
// (reducible matrix, broken bijection, dedup collision, bad relator).
struct StructuralError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Computation would exceed its configured window or support budget.
struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numerical routine finished without reaching the requested tolerance.
struct AccuracyError : std::runtime_error {
    double achieved;
    AccuracyError(const std::string& msg, double got)
        : std::runtime_error(msg), achieved(got) {}
};

// A certified (provably complete) sum cannot cover the requested range.
// `max_certifiable` is the largest parameter the current data supports.
struct CoverageError : std::runtime_error {
    double max_certifiable;
    CoverageError(const std::string& msg, double max_ok)
        : std::runtime_error(msg), max_certifiable(max_ok) {}
};

}  // namespace erglab
