#include "erglab/farey.hpp"

#include "erglab/detail/dp.hpp"
#include "erglab/errors.hpp"
#include "erglab/summation.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

namespace erglab {

FareySeq farey_sequence(int d) {
    if (d < 1) throw std::domain_error("farey_sequence: need d >= 1");
    FareySeq f;
    f.d = d;
    for (std::int64_t q = 1; q <= d; ++q)
        for (std::int64_t p = 0; p <= q; ++p)
            if (std::gcd(p, q) == 1) f.fractions.push_back({p, q});
    std::sort(f.fractions.begin(), f.fractions.end(),
              [](const Fraction& a, const Fraction& b) {
                  return a.p * b.q < b.p * a.q;
              });
    f.fractions.erase(
        std::unique(f.fractions.begin(), f.fractions.end(),
                    [](const Fraction& a, const Fraction& b) {
                        return a.p == b.p && a.q == b.q;
                    }),
        f.fractions.end());
    return f;
}

namespace {

// gap-count value of (kappa, eps) at the integer point (k, l)
std::int64_t gap_value(std::pair<int, int> pe, std::int64_t k,
                       std::int64_t l) {
    auto [kappa, eps] = pe;
    return eps ? static_cast<std::int64_t>(kappa) * l
               : static_cast<std::int64_t>(kappa) * k;
}

std::vector<std::pair<int, int>> canonical_order(int d, std::int64_t k,
                                                 std::int64_t l) {
    std::vector<std::pair<int, int>> pairs;
    for (int kappa = 1; kappa <= d; ++kappa)
        for (int eps = 0; eps <= 1; ++eps) pairs.emplace_back(kappa, eps);
    std::sort(pairs.begin(), pairs.end(),
              [&](std::pair<int, int> a, std::pair<int, int> b) {
                  std::int64_t va = gap_value(a, k, l), vb = gap_value(b, k, l);
                  if (va != vb) return va < vb;
                  if (a.second != b.second) return a.second < b.second;
                  return a.first < b.first;
              });
    return pairs;
}

}  // namespace

OrderingBijection build_ordering(int d, int j) {
    FareySeq f = farey_sequence(d);
    if (j < 0 || j + 1 >= static_cast<int>(f.fractions.size()))
        throw std::out_of_range("build_ordering: interval index out of range");
    OrderingBijection pi;
    pi.d = d;
    pi.slope_lo = f.fractions[j];
    pi.slope_hi = f.fractions[j + 1];
    pi.pairs = canonical_order(d, pi.slope_hi.p, pi.slope_hi.q);
    return pi;
}

bool orders_pair(const OrderingBijection& pi, std::int64_t k, std::int64_t l) {
    return pi.pairs == canonical_order(pi.d, k, l);
}

OrderingCheck verify_ordering_domain(const OrderingBijection& pi,
                                     std::int64_t bound) {
    if (bound < pi.d + 1)
        throw std::domain_error("verify_ordering_domain: bound too small");
    OrderingCheck out;
    for (std::int64_t l = 1; l <= bound; ++l)
        for (std::int64_t k = 1; k <= l; ++k) {
            bool in_interval = k * pi.slope_lo.q > pi.slope_lo.p * l &&
                               k * pi.slope_hi.q <= pi.slope_hi.p * l;
            if (orders_pair(pi, k, l) != in_interval) {
                out.ok = false;
                out.counterexample = std::make_pair(k, l);
                return out;
            }
        }
    out.ok = true;
    return out;
}

namespace {

bool find_pairing(const std::vector<std::array<std::int64_t, 2>>& v,
                  std::vector<char>& used,
                  std::vector<std::pair<int, int>>& out) {
    int first = -1;
    for (int i = 0; i < static_cast<int>(v.size()); ++i)
        if (!used[i]) {
            first = i;
            break;
        }
    if (first < 0) return true;
    used[first] = 1;
    for (int j = first + 1; j < static_cast<int>(v.size()); ++j) {
        if (used[j]) continue;
        std::int64_t det = v[first][0] * v[j][1] - v[first][1] * v[j][0];
        if (det == 0) continue;
        used[j] = 1;
        out.emplace_back(first, j);
        if (find_pairing(v, used, out)) return true;
        out.pop_back();
        used[j] = 0;
    }
    used[first] = 0;
    return false;
}

}  // namespace

StepVectors step_vectors(const OrderingBijection& pi) {
    StepVectors sv;
    const auto& p = pi.pairs;
    for (std::size_t j = 0; j < p.size(); ++j) {
        auto [kap, eps] = p[j];
        std::int64_t a0 = static_cast<std::int64_t>(kap) * (1 - eps);
        std::int64_t a1 = static_cast<std::int64_t>(kap) * eps;
        if (j > 0) {
            auto [pk, pe] = p[j - 1];
            a0 -= static_cast<std::int64_t>(pk) * (1 - pe);
            a1 -= static_cast<std::int64_t>(pk) * pe;
        }
        if (a0 == 0 && a1 == 0)
            throw StructuralError("zero step vector in ordering");
        sv.vectors.push_back({a0, a1});
    }
    std::vector<char> used(sv.vectors.size(), 0);
    if (!find_pairing(sv.vectors, used, sv.pairing))
        throw StructuralError(
            "no linearly independent pairing of step vectors exists");
    return sv;
}

namespace {

// Anchor atoms (state or any-state, lattice point) of a fibered set whose
// members are instantaneous (word length <= 1).
struct AnchorAtoms {
    std::vector<std::pair<int, std::array<int, 3>>> atoms;  // (state, z)
    int max_norm = 0;
};

AnchorAtoms anchor_atoms(const MarkovModel& model, const CylinderSet& omega) {
    if (model.kappa() < 1)
        throw std::domain_error("psi_moments: needs a lattice extension");
    AnchorAtoms out;
    std::set<std::pair<int, std::array<int, 3>>> seen;
    for (const auto& m : omega) {
        if (!m.fiber)
            throw std::domain_error("psi_moments: members must be fibered");
        if (m.word.size() > 1)
            throw std::domain_error(
                "psi_moments: members must have word length <= 1");
        std::array<int, 3> z = {0, 0, 0};
        for (int i = 0; i < model.kappa(); ++i) {
            z[i] = (*m.fiber)[i];
            out.max_norm = std::max(out.max_norm, std::abs(z[i]));
        }
        if (m.word.empty()) {
            for (int s = 0; s < model.num_states(); ++s)
                seen.emplace(s, z);
        } else {
            seen.emplace(m.word[0], z);
        }
    }
    out.atoms.assign(seen.begin(), seen.end());
    if (out.atoms.empty()) throw std::domain_error("psi_moments: empty set");
    return out;
}

// Return kernels between anchor atoms for every gap g <= G:
// K[g][(i,j)] = P(state_g = s_j, displacement = z_j - z_i | state_0 = s_i).
template <class S>
std::vector<std::vector<S>> gap_kernels(const MarkovModel& model,
                                        const AnchorAtoms& A, std::int64_t G) {
    auto chain = detail::CompiledChain<S>::compile(model);
    const int na = static_cast<int>(A.atoms.size());
    std::vector<std::vector<S>> K(G + 1, std::vector<S>(na * na, S{}));
    for (int i = 0; i < na; ++i) K[0][i * na + i] = S(1);

    const int radius =
        2 * A.max_norm +
        static_cast<int>(G * static_cast<std::int64_t>(model.max_step_norm()));
    for (int s = 0; s < model.num_states(); ++s) {
        bool needed = false;
        for (const auto& a : A.atoms) needed = needed || a.first == s;
        if (!needed) continue;
        detail::BoxDist<S> box(model.num_states(), model.kappa(), radius);
        std::array<int, 3> origin = {0, 0, 0};
        box.deposit(s, origin, S(1));
        for (std::int64_t g = 1; g <= G; ++g) {
            box.step(chain);
            for (int i = 0; i < na; ++i) {
                if (A.atoms[i].first != s) continue;
                for (int j = 0; j < na; ++j) {
                    std::array<int, 3> disp = {0, 0, 0};
                    for (int c = 0; c < model.kappa(); ++c)
                        disp[c] = A.atoms[j].second[c] - A.atoms[i].second[c];
                    K[g][i * na + j] =
                        box.state_mass_at(A.atoms[j].first, disp);
                }
            }
        }
    }
    return K;
}

// Measure of the intersection of Omega-anchors at the given times.
template <class S>
S anchored_chain_value(const MarkovModel& model, const AnchorAtoms& A,
                       const std::vector<std::vector<S>>& K,
                       std::vector<std::int64_t> times) {
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    const int na = static_cast<int>(A.atoms.size());
    std::vector<S> v(na);
    for (int i = 0; i < na; ++i)
        v[i] = detail::ScalarOps<S>::from(
            model.stationary_exact()[A.atoms[i].first]);
    for (std::size_t t = 1; t < times.size(); ++t) {
        std::int64_t g = times[t] - times[t - 1];
        const auto& Kg = K[g];
        std::vector<S> w(na, S{});
        for (int i = 0; i < na; ++i) {
            if (!(v[i] != S{})) continue;
            for (int j = 0; j < na; ++j) w[j] += v[i] * Kg[i * na + j];
        }
        v.swap(w);
    }
    S total{};
    for (const auto& x : v) total += x;
    return total;
}

template <class S>
std::array<S, 3> psi_moments_impl(const MarkovModel& model,
                                  const CylinderSet& omega, int d, int nu,
                                  std::int64_t n) {
    if (d < 1) throw std::domain_error("psi_moments: need d >= 1");
    if (nu < 0 || nu > d) throw std::domain_error("psi_moments: nu in 0..d");
    if (n < 1) throw std::domain_error("psi_moments: need n >= 1");
    AnchorAtoms A = anchor_atoms(model, omega);
    const std::int64_t G = static_cast<std::int64_t>(d) * n;
    auto K = gap_kernels<S>(model, A, G);

    auto times_of = [&](std::int64_t k) {
        std::vector<std::int64_t> t{0};
        for (int i = 1; i <= nu; ++i) t.push_back(-static_cast<std::int64_t>(i) * k);
        for (int j = 1; j <= d - nu; ++j) t.push_back(static_cast<std::int64_t>(j) * k);
        return t;
    };

    // m(Omega), for u(Omega, k)
    S m_omega = anchored_chain_value<S>(model, A, K, {0});

    S first{};
    S a_d{};
    for (std::int64_t k = 1; k <= n; ++k) {
        first += anchored_chain_value<S>(model, A, K, times_of(k));
        S u = anchored_chain_value<S>(model, A, K, {0, k}) / m_omega;
        S p = u;
        for (int i = 1; i < d; ++i) p *= u;
        a_d += p;
    }

    S second{};
    for (std::int64_t k = 1; k <= n; ++k)
        for (std::int64_t l = k; l <= n; ++l) {
            auto t = times_of(k);
            auto tl = times_of(l);
            t.insert(t.end(), tl.begin(), tl.end());
            S val = anchored_chain_value<S>(model, A, K, t);
            second += (l == k) ? val : S(2) * val;
        }

    return {first, second, a_d};
}

}  // namespace

PsiMoments psi_moments(const MarkovModel& model, const CylinderSet& omega,
                       int d, int nu, std::int64_t n) {
    if (model.backend() == Backend::Exact) {
        auto r = psi_moments_impl<Rational>(model, omega, d, nu, n);
        return {to_double(r[0]), to_double(r[1]), to_double(r[2])};
    }
    auto r = psi_moments_impl<double>(model, omega, d, nu, n);
    return {r[0], r[1], r[2]};
}

PsiMomentsExact psi_moments_exact(const MarkovModel& model,
                                  const CylinderSet& omega, int d, int nu,
                                  std::int64_t n) {
    auto r = psi_moments_impl<Rational>(model, omega, d, nu, n);
    return {r[0], r[1], r[2]};
}

}  // namespace erglab
