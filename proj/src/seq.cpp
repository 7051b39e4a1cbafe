#include "erglab/seq.hpp"

#include "erglab/summation.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace erglab {

SeqPrefix::SeqPrefix(std::int64_t offset, std::vector<double> values,
                     bool nonnegative)
    : offset_(offset), values_(std::move(values)), nonnegative_(nonnegative) {
    if (offset_ < 0) throw std::domain_error("SeqPrefix offset must be >= 0");
    for (double v : values_) {
        if (!std::isfinite(v))
            throw std::domain_error("SeqPrefix entries must be finite");
        if (nonnegative_ && v < 0.0)
            throw std::domain_error("negative entry in nonnegative SeqPrefix");
    }
}

std::int64_t SeqPrefix::last_index() const {
    return offset_ + static_cast<std::int64_t>(values_.size()) - 1;
}

double SeqPrefix::at(std::int64_t n) const {
    if (n < offset_ || n > last_index())
        throw std::out_of_range("SeqPrefix index " + std::to_string(n) +
                                " outside [" + std::to_string(offset_) + ", " +
                                std::to_string(last_index()) + "]");
    return values_[static_cast<std::size_t>(n - offset_)];
}

SeqPrefix partial_power_sum(const SeqPrefix& u, int d) {
    if (d <= 0) throw std::domain_error("partial_power_sum: d must be >= 1");
    if (u.offset() > 1)
        throw std::domain_error("partial_power_sum: offset must be <= 1");
    for (double v : u.values())
        if (v < 0.0)
            throw std::domain_error("partial_power_sum: negative entry");

    if (u.last_index() < 1) return SeqPrefix(1, {}, true);

    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(u.last_index()));
    KahanSum acc;
    for (std::int64_t k = 1; k <= u.last_index(); ++k) {
        if (k >= u.offset()) acc.add(std::pow(u.at(k), d));
        out.push_back(acc.value());
    }
    return SeqPrefix(1, std::move(out), true);
}

namespace {

void require_window(const SeqPrefix& s, IndexRange w, const char* who) {
    if (w.lo > w.hi)
        throw std::out_of_range(std::string(who) + ": empty window");
    if (w.lo < s.first_index() || w.hi > s.last_index())
        throw std::out_of_range(std::string(who) +
                                ": window exceeds available data");
}

}  // namespace

BandVerdict ratio_band(const SeqPrefix& x, const SeqPrefix& y,
                       IndexRange window) {
    require_window(x, window, "ratio_band");
    require_window(y, window, "ratio_band");
    BandVerdict band;
    band.window = window;
    bool first = true;
    for (std::int64_t n = window.lo; n <= window.hi; ++n) {
        double denom = y.at(n);
        double numer = x.at(n);
        if (denom <= 0.0)
            throw std::domain_error(
                "ratio_band: nonpositive denominator at index " +
                std::to_string(n));
        if (numer <= 0.0)
            throw std::domain_error(
                "ratio_band: nonpositive numerator at index " +
                std::to_string(n));
        double r = numer / denom;
        if (first) {
            band.low = band.high = r;
            first = false;
        } else {
            if (r < band.low) band.low = r;
            if (r > band.high) band.high = r;
        }
    }
    return band;
}

BandVerdict doubling_check(const SeqPrefix& a, IndexRange window) {
    if (window.lo > window.hi)
        throw std::out_of_range("doubling_check: empty window");
    if (window.lo < a.first_index() || 2 * window.hi > a.last_index())
        throw std::out_of_range("doubling_check: window exceeds available data");

    double prev = a.at(window.lo);
    if (prev <= 0.0)
        throw std::domain_error("doubling_check: sequence not positive");
    for (std::int64_t n = window.lo; n <= 2 * window.hi; ++n) {
        double v = a.at(n);
        if (v <= 0.0)
            throw std::domain_error("doubling_check: sequence not positive");
        if (v < prev)
            throw std::domain_error("doubling_check: sequence not nondecreasing");
        prev = v;
    }

    BandVerdict band;
    band.window = window;
    bool first = true;
    for (std::int64_t n = window.lo; n <= window.hi; ++n) {
        double r = a.at(2 * n) / a.at(n);
        if (first) {
            band.low = band.high = r;
            first = false;
        } else {
            if (r < band.low) band.low = r;
            if (r > band.high) band.high = r;
        }
    }
    return band;
}

double rv_index(const SeqPrefix& a, IndexRange window) {
    require_window(a, window, "rv_index");
    std::int64_t count = window.hi - window.lo + 1;
    if (count < 3)
        throw std::out_of_range("rv_index: fewer than 3 points in window");

    // Plain least squares on (log n, log a_n), compensated accumulation.
    KahanSum sx, sy, sxx, sxy;
    for (std::int64_t n = window.lo; n <= window.hi; ++n) {
        double v = a.at(n);
        if (v <= 0.0 || n <= 0)
            throw std::domain_error("rv_index: requires positive data/indices");
        double lx = std::log(static_cast<double>(n));
        double ly = std::log(v);
        sx.add(lx);
        sy.add(ly);
        sxx.add(lx * lx);
        sxy.add(lx * ly);
    }
    double m = static_cast<double>(count);
    double denom = m * sxx.value() - sx.value() * sx.value();
    return (m * sxy.value() - sx.value() * sy.value()) / denom;
}

}  // namespace erglab
