#pragma once

#include <cstdint>
#include <vector>

namespace erglab {

// Inclusive index range [lo, hi] over sequence indices (not array slots).
struct IndexRange {
    std::int64_t lo = 0;
    std::int64_t hi = 0;
};

// A finite prefix of a real sequence: values[i] is the entry at index
// offset + i. Every asymptotic verdict in the library is a statement about
// one of these over a declared window, never about the limit.
class SeqPrefix {
public:
    SeqPrefix() = default;
    SeqPrefix(std::int64_t offset, std::vector<double> values,
              bool nonnegative = false);

    std::int64_t offset() const { return offset_; }
    std::int64_t first_index() const { return offset_; }
    std::int64_t last_index() const;
    std::size_t size() const { return values_.size(); }
    bool nonnegative() const { return nonnegative_; }

    double at(std::int64_t n) const;            // throws out_of_range
    const std::vector<double>& values() const { return values_; }

private:
    std::int64_t offset_ = 0;
    std::vector<double> values_;
    bool nonnegative_ = false;
};

// Two-sided bound observed for a ratio over a window. The verdict
// "comparable on the window" means every measured ratio was in [low, high].
struct BandVerdict {
    double low = 0.0;
    double high = 0.0;
    IndexRange window;
};

// a(n) = sum_{k=1}^{n} u_k^d, compensated left-to-right. Entries of u below
// its offset are absent from the sum. Nondecreasing for nonnegative input.
SeqPrefix partial_power_sum(const SeqPrefix& u, int d);

// Min and max of x_n / y_n over the window. Both must be strictly positive
// there.
BandVerdict ratio_band(const SeqPrefix& x, const SeqPrefix& y,
                       IndexRange window);

// Band of a(2n)/a(n) for n in the window; a must be positive and
// nondecreasing on [window.lo, 2 * window.hi].
BandVerdict doubling_check(const SeqPrefix& a, IndexRange window);

// Least-squares slope of log a(n) against log n over the window: the
// empirical regular-variation index. Needs at least 3 points.
double rv_index(const SeqPrefix& a, IndexRange window);

}  // namespace erglab
