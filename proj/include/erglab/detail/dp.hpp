#pragma once

// Dense dynamic-programming kernel shared by the lattice-extension
// computations. Windows are sized a priori from n * max_step, never grown
// dynamically, so memory use is predictable and runs are bit-identical.

#include "erglab/errors.hpp"
#include "erglab/markov.hpp"
#include "erglab/rational.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <vector>

namespace erglab::detail {

template <class S>
struct ScalarOps;

template <>
struct ScalarOps<double> {
    static double from(const Rational& r) { return to_double(r); }
    static bool positive(double x) { return x > 0.0; }
};

template <>
struct ScalarOps<Rational> {
    static Rational from(const Rational& r) { return r; }
    static bool positive(const Rational& x) { return x > 0; }
};

constexpr std::int64_t kMaxBoxCells = 1LL << 28;  // hard memory guard

template <class S>
struct CompiledChain {
    struct B {
        int to;
        S w;
        std::array<int, 3> step;  // unused coordinates zero
    };
    int nstates = 0;
    int kappa = 0;
    std::vector<std::vector<B>> br;
    std::vector<S> mu;
    int max_step = 0;

    static CompiledChain compile(const MarkovModel& m) {
        CompiledChain c;
        c.nstates = m.num_states();
        c.kappa = m.kappa();
        if (c.kappa > 3)
            throw ResourceError("lattice DP supports kappa <= 3");
        c.br.resize(c.nstates);
        for (int s = 0; s < c.nstates; ++s)
            for (const auto& b : m.branches()[s]) {
                B cb;
                cb.to = b.to;
                cb.w = ScalarOps<S>::from(b.weight);
                cb.step = {0, 0, 0};
                for (int i = 0; i < c.kappa; ++i) cb.step[i] = b.step[i];
                c.br[s].push_back(cb);
            }
        for (const auto& r : m.stationary_exact())
            c.mu.push_back(ScalarOps<S>::from(r));
        c.max_step = m.max_step_norm();
        return c;
    }
};

// Distribution over states x centered lattice box [-R, R]^kappa, state-major
// storage. `reach` tracks the provably supported sub-box so early steps stay
// cheap; skipped cells are exactly zero, so results do not depend on it.
template <class S>
class BoxDist {
public:
    BoxDist(int nstates, int kappa, int radius)
        : nstates_(nstates), kappa_(kappa), R_(radius) {
        side_ = 2 * static_cast<std::int64_t>(R_) + 1;
        cells_ = 1;
        for (int i = 0; i < kappa_; ++i) {
            cells_ *= side_;
            if (cells_ > kMaxBoxCells)
                throw ResourceError(
                    "lattice window too large: radius " + std::to_string(R_) +
                    ", kappa " + std::to_string(kappa_));
        }
        if (cells_ * nstates_ > kMaxBoxCells)
            throw ResourceError("lattice window too large");
        mass_.assign(static_cast<std::size_t>(cells_) * nstates_, S{});
        reach_ = 0;
    }

    int radius() const { return R_; }
    int reach() const { return reach_; }
    std::int64_t cells() const { return cells_; }

    std::int64_t zindex(const std::array<int, 3>& z) const {
        std::int64_t idx = 0;
        for (int i = 0; i < kappa_; ++i) idx = idx * side_ + (z[i] + R_);
        return idx;
    }

    S& at(int s, std::int64_t zi) {
        return mass_[static_cast<std::size_t>(s) * cells_ + zi];
    }
    const S& at(int s, std::int64_t zi) const {
        return mass_[static_cast<std::size_t>(s) * cells_ + zi];
    }

    void deposit(int s, const std::array<int, 3>& z, const S& w) {
        int n = 0;
        for (int i = 0; i < kappa_; ++i) n = std::max(n, std::abs(z[i]));
        if (n > R_) throw ResourceError("deposit outside lattice window");
        reach_ = std::max(reach_, n);
        at(s, zindex(z)) += w;
    }

    // One transition of the extended chain.
    void step(const CompiledChain<S>& chain) {
        int new_reach = std::min(R_, reach_ + chain.max_step);
        if (reach_ + chain.max_step > R_)
            throw ResourceError("lattice window overflow during step");
        BoxDist out(nstates_, kappa_, R_);
        out.reach_ = new_reach;
        for_each_reachable([&](std::int64_t zi, const std::array<int, 3>& z) {
            for (int s = 0; s < nstates_; ++s) {
                const S& m = at(s, zi);
                if (!(m != S{})) continue;
                for (const auto& b : chain.br[s]) {
                    std::array<int, 3> nz = z;
                    for (int i = 0; i < kappa_; ++i) nz[i] += b.step[i];
                    out.at(b.to, out.zindex(nz)) += m * b.w;
                }
            }
        });
        mass_.swap(out.mass_);
        reach_ = out.reach_;
    }

    // Keep only the given state (others zeroed).
    void require_state(int keep) {
        for (int s = 0; s < nstates_; ++s) {
            if (s == keep) continue;
            auto* p = &mass_[static_cast<std::size_t>(s) * cells_];
            std::fill(p, p + cells_, S{});
        }
    }

    // Keep only the given lattice point.
    void require_fiber(const std::array<int, 3>& z) {
        int n = 0;
        for (int i = 0; i < kappa_; ++i) n = std::max(n, std::abs(z[i]));
        if (n > R_) {
            std::fill(mass_.begin(), mass_.end(), S{});
            reach_ = 0;
            return;
        }
        std::int64_t keep = zindex(z);
        for (int s = 0; s < nstates_; ++s)
            for (std::int64_t zi = 0; zi < cells_; ++zi)
                if (zi != keep) at(s, zi) = S{};
        reach_ = n;
    }

    void zero_fiber_slice(const std::array<int, 3>& z) {
        int n = 0;
        for (int i = 0; i < kappa_; ++i) n = std::max(n, std::abs(z[i]));
        if (n > R_) return;
        std::int64_t zi = zindex(z);
        for (int s = 0; s < nstates_; ++s) at(s, zi) = S{};
    }

    S state_mass_at(int s, const std::array<int, 3>& z) const {
        int n = 0;
        for (int i = 0; i < kappa_; ++i) n = std::max(n, std::abs(z[i]));
        if (n > R_) return S{};
        return at(s, zindex(z));
    }

    // Fixed iteration order (state-major, lexicographic z): reductions are
    // deterministic.
    S total() const {
        S t{};
        for (const auto& m : mass_) t += m;
        return t;
    }

    template <class F>
    void for_each_reachable(F&& f) const {
        std::array<int, 3> z = {0, 0, 0};
        iterate(0, z, f);
    }

    int nstates() const { return nstates_; }
    int kappa() const { return kappa_; }

private:
    template <class F>
    void iterate(int dim, std::array<int, 3>& z, F& f) const {
        if (dim == kappa_) {
            std::array<int, 3> zz = z;
            for (int i = kappa_; i < 3; ++i) zz[i] = 0;
            f(const_cast<BoxDist*>(this)->zindex(zz), zz);
            return;
        }
        for (int v = -reach_; v <= reach_; ++v) {
            z[dim] = v;
            iterate(dim + 1, z, f);
        }
    }

    int nstates_, kappa_, R_;
    std::int64_t side_ = 1, cells_ = 1;
    std::vector<S> mass_;
    int reach_ = 0;
};

// Merged constraint set for one intersection of shifted fibered cylinders.
struct AnchoredQuery {
    std::map<std::int64_t, int> symbols;  // position -> required state
    // (time, fiber) sorted by time; fibers are kappa-long.
    std::vector<std::pair<std::int64_t, std::array<int, 3>>> anchors;
    bool contradictory = false;  // conflicting symbol constraints
};

// Builds the query for the intersection cap_j T^{-t_j} member_j. Returns a
// contradictory query when symbols clash or two anchors at one time demand
// different fibers.
AnchoredQuery build_query(const MarkovModel& model,
                          const std::vector<FiberedCylinder>& members,
                          const std::vector<std::int64_t>& times);

// Exact measure of the anchored query by a single left-to-right DP pass.
template <class S>
S anchored_measure(const MarkovModel& model, const CompiledChain<S>& chain,
                   const AnchoredQuery& q);

// Disjointify a finite union of fibered cylinders (refining overlapping
// members over their common span). Throws for unions mixing fibered and
// unfibered members with overlapping words.
std::vector<FiberedCylinder> disjointify(const MarkovModel& model,
                                         const CylinderSet& set);

}  // namespace erglab::detail
