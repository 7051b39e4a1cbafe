#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace erglab {

// Neumaier-compensated accumulator. All partial sums in the library go
// through this in a fixed left-to-right order, so results are bit-identical
// across runs and thread counts.
class KahanSum {
public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double compensated_sum(const std::vector<double>& xs) {
    KahanSum acc;
    for (double x : xs) acc.add(x);
    return acc.value();
}

}  // namespace erglab
