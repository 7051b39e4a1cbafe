#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace erglab {

// Exact arithmetic backend. Used for oracle-grade computations at small n
// and for lossless model-file round trips.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// Accepts "3/4", "-2", "0.25", "1e-3"-free plain decimals. Decimals are
// converted exactly (0.9 -> 9/10).
Rational parse_rational(const std::string& text);

// Canonical form "p/q" (or "p" when q == 1); inverse of parse_rational.
std::string format_rational(const Rational& r);

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace erglab
