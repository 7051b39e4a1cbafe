#include "erglab/markov.hpp"

#include "erglab/detail/dp.hpp"
#include "erglab/errors.hpp"
#include "erglab/parallel.hpp"
#include "erglab/summation.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <stdexcept>

namespace erglab {

namespace {

const Rational kTol = Rational(1, BigInt("1000000000000"));  // 1e-12

bool strongly_connected(int n,
                        const std::vector<std::vector<int>>& adjacency) {
    auto reachable = [&](const std::vector<std::vector<int>>& adj) {
        std::vector<char> seen(n, 0);
        std::queue<int> q;
        q.push(0);
        seen[0] = 1;
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            for (int v : adj[u])
                if (!seen[v]) {
                    seen[v] = 1;
                    q.push(v);
                }
        }
        return std::all_of(seen.begin(), seen.end(), [](char c) { return c; });
    };
    std::vector<std::vector<int>> rev(n);
    for (int u = 0; u < n; ++u)
        for (int v : adjacency[u]) rev[v].push_back(u);
    return reachable(adjacency) && reachable(rev);
}

// gcd of cycle lengths in a strongly connected graph
int graph_period(int n, const std::vector<std::vector<int>>& adjacency) {
    std::vector<std::int64_t> level(n, -1);
    std::queue<int> q;
    q.push(0);
    level[0] = 0;
    std::int64_t g = 0;
    while (!q.empty()) {
        int u = q.front();
        q.pop();
        for (int v : adjacency[u]) {
            if (level[v] < 0) {
                level[v] = level[u] + 1;
                q.push(v);
            } else {
                g = std::gcd(g, level[u] + 1 - level[v]);
            }
        }
    }
    return static_cast<int>(g < 0 ? -g : g);
}

}  // namespace

std::vector<Rational> stationary_distribution(
    const std::vector<std::vector<Rational>>& P) {
    const int n = static_cast<int>(P.size());
    if (n == 0) throw StructuralError("empty matrix");
    std::vector<std::vector<int>> adj(n);
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(P[i].size()) != n)
            throw StructuralError("matrix not square");
        Rational row{};
        for (int j = 0; j < n; ++j) {
            if (P[i][j] < 0) throw std::domain_error("negative entry");
            row += P[i][j];
            if (P[i][j] > 0) adj[i].push_back(j);
        }
        if (abs(row - 1) > kTol)
            throw std::domain_error("row does not sum to 1");
    }
    if (!strongly_connected(n, adj))
        throw StructuralError("matrix is reducible");

    // solve x P = x, sum x = 1: (P^T - I) with the last row replaced by ones
    std::vector<std::vector<Rational>> A(n, std::vector<Rational>(n + 1));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A[i][j] = P[j][i] - (i == j ? 1 : 0);
    for (int j = 0; j < n; ++j) A[n - 1][j] = 1;
    A[n - 1][n] = 1;

    for (int col = 0; col < n; ++col) {
        int pivot = -1;
        for (int r = col; r < n; ++r)
            if (A[r][col] != 0) {
                pivot = r;
                break;
            }
        if (pivot < 0) throw StructuralError("singular balance system");
        std::swap(A[col], A[pivot]);
        for (int r = 0; r < n; ++r) {
            if (r == col || A[r][col] == 0) continue;
            Rational f = A[r][col] / A[col][col];
            for (int c = col; c <= n; ++c) A[r][c] -= f * A[col][c];
        }
    }
    std::vector<Rational> mu(n);
    for (int i = 0; i < n; ++i) {
        mu[i] = A[i][n] / A[i][i];
        if (!(mu[i] > 0))
            throw StructuralError("stationary vector not strictly positive");
    }
    return mu;
}

MarkovModel::MarkovModel(int num_states, int kappa,
                         std::vector<std::vector<Branch>> branches,
                         Backend backend, std::vector<std::string> state_names)
    : num_states_(num_states),
      kappa_(kappa),
      branches_(std::move(branches)),
      backend_(backend),
      names_(std::move(state_names)) {
    if (num_states_ < 1) throw StructuralError("need at least one state");
    if (kappa_ < 0 || kappa_ > 3)
        throw StructuralError("kappa must be in [0, 3]");
    if (static_cast<int>(branches_.size()) != num_states_)
        throw StructuralError("branch table size != number of states");
    if (names_.empty())
        for (int s = 0; s < num_states_; ++s)
            names_.push_back("s" + std::to_string(s));

    std::vector<std::vector<int>> adj(num_states_);
    std::vector<std::vector<Rational>> P(
        num_states_, std::vector<Rational>(num_states_, Rational{}));
    for (int s = 0; s < num_states_; ++s) {
        Rational row{};
        for (const auto& b : branches_[s]) {
            if (b.to < 0 || b.to >= num_states_)
                throw StructuralError("branch target outside state set");
            if (!(b.weight > 0))
                throw StructuralError("branch weights must be positive");
            if (static_cast<int>(b.step.size()) != kappa_)
                throw StructuralError("branch step dimension != kappa");
            row += b.weight;
            P[s][b.to] += b.weight;
            for (int v : b.step)
                max_step_norm_ = std::max(max_step_norm_, std::abs(v));
        }
        if (abs(row - 1) > kTol)
            throw StructuralError("outgoing weights of state " +
                                  std::to_string(s) + " do not sum to 1");
        for (int t = 0; t < num_states_; ++t)
            if (P[s][t] > 0) adj[s].push_back(t);
    }
    if (!strongly_connected(num_states_, adj))
        throw StructuralError("chain is reducible");
    if (graph_period(num_states_, adj) != 1)
        throw StructuralError("base chain is periodic");

    mu_exact_ = stationary_distribution(P);
    for (const auto& r : mu_exact_) mu_.push_back(to_double(r));

    // centered cocycle
    for (int i = 0; i < kappa_; ++i) {
        Rational drift{};
        for (int s = 0; s < num_states_; ++s)
            for (const auto& b : branches_[s])
                drift += mu_exact_[s] * b.weight * b.step[i];
        if (abs(drift) > kTol)
            throw StructuralError("cocycle is not centered (coordinate " +
                                  std::to_string(i) + ")");
    }
}

Rational MarkovModel::transition_exact(int s, int t) const {
    Rational p{};
    for (const auto& b : branches_[s])
        if (b.to == t) p += b.weight;
    return p;
}

double MarkovModel::transition(int s, int t) const {
    return to_double(transition_exact(s, t));
}

Rational cylinder_measure_exact(const MarkovModel& model,
                                const FiberedCylinder& c) {
    if (c.word.empty()) throw std::domain_error("empty cylinder word");
    for (int s : c.word)
        if (s < 0 || s >= model.num_states())
            throw std::domain_error("cylinder symbol outside state set");
    Rational m = model.stationary_exact()[c.word[0]];
    for (std::size_t i = 0; i + 1 < c.word.size(); ++i)
        m *= model.transition_exact(c.word[i], c.word[i + 1]);
    return m;
}

double cylinder_measure(const MarkovModel& model, const FiberedCylinder& c) {
    if (model.backend() == Backend::Exact)
        return to_double(cylinder_measure_exact(model, c));
    if (c.word.empty()) throw std::domain_error("empty cylinder word");
    for (int s : c.word)
        if (s < 0 || s >= model.num_states())
            throw std::domain_error("cylinder symbol outside state set");
    double m = model.stationary()[c.word[0]];
    for (std::size_t i = 0; i + 1 < c.word.size(); ++i)
        m *= model.transition(c.word[i], c.word[i + 1]);
    return m;
}

namespace {

Rational member_measure_exact(const MarkovModel& model,
                              const FiberedCylinder& c) {
    if (model.kappa() > 0 && !c.fiber)
        throw std::domain_error("unfibered set has infinite measure");
    if (c.word.empty()) return Rational(1);
    return cylinder_measure_exact(model, c);
}

}  // namespace

Rational set_measure_exact(const MarkovModel& model, const CylinderSet& set) {
    auto members = detail::disjointify(model, set);
    Rational total{};
    for (const auto& m : members) total += member_measure_exact(model, m);
    return total;
}

double set_measure(const MarkovModel& model, const CylinderSet& set) {
    if (model.backend() == Backend::Exact)
        return to_double(set_measure_exact(model, set));
    auto members = detail::disjointify(model, set);
    KahanSum total;
    for (const auto& m : members)
        total.add(to_double(member_measure_exact(model, m)));
    return total.value();
}

namespace {

template <class S>
BasicLatticeDistribution<S> step_distribution_impl(
    const MarkovModel& model, const BasicLatticeDistribution<S>& start,
    int n) {
    if (n < 0) throw std::domain_error("step count must be >= 0");
    const int kappa = model.kappa();
    auto chain = detail::CompiledChain<S>::compile(model);

    int start_norm = 0;
    for (const auto& kv : start.support) {
        if (static_cast<int>(kv.first.second.size()) != kappa)
            throw std::domain_error("lattice point dimension != kappa");
        for (int v : kv.first.second)
            start_norm = std::max(start_norm, std::abs(v));
    }
    const int radius = start_norm + n * model.max_step_norm();
    detail::BoxDist<S> box(model.num_states(), kappa, radius);
    for (const auto& kv : start.support) {
        std::array<int, 3> z = {0, 0, 0};
        for (int i = 0; i < kappa; ++i) z[i] = kv.first.second[i];
        if (kv.second != S{}) box.deposit(kv.first.first, z, kv.second);
    }
    for (int i = 0; i < n; ++i) box.step(chain);

    BasicLatticeDistribution<S> out;
    out.kappa = kappa;
    box.for_each_reachable([&](std::int64_t zi, const std::array<int, 3>& z) {
        for (int s = 0; s < model.num_states(); ++s) {
            const S& m = box.at(s, zi);
            if (m != S{}) {
                std::vector<int> zv(z.begin(), z.begin() + kappa);
                out.support[{s, zv}] = m;
            }
        }
    });
    return out;
}

}  // namespace

LatticeDistribution step_distribution(const MarkovModel& model,
                                      const LatticeDistribution& start,
                                      int n) {
    return step_distribution_impl<double>(model, start, n);
}

LatticeDistributionExact step_distribution_exact(
    const MarkovModel& model, const LatticeDistributionExact& start, int n) {
    return step_distribution_impl<Rational>(model, start, n);
}

namespace {

template <class S>
std::vector<S> return_sequence_impl(const MarkovModel& model, int s,
                                    std::int64_t N) {
    if (s < 0 || s >= model.num_states())
        throw std::domain_error("state outside state set");
    if (N < 1) throw std::domain_error("need N >= 1");
    auto chain = detail::CompiledChain<S>::compile(model);
    const int radius =
        static_cast<int>(N * static_cast<std::int64_t>(model.max_step_norm()));
    detail::BoxDist<S> box(model.num_states(), model.kappa(), radius);
    std::array<int, 3> origin = {0, 0, 0};
    box.deposit(s, origin, detail::ScalarOps<S>::from(Rational(1)));
    const S mu_s = detail::ScalarOps<S>::from(model.stationary_exact()[s]);
    std::vector<S> u;
    u.reserve(N);
    for (std::int64_t n = 1; n <= N; ++n) {
        box.step(chain);
        u.push_back(box.state_mass_at(s, origin) / mu_s);
    }
    return u;
}

}  // namespace

Rational return_probability_exact(const MarkovModel& model, int s,
                                  std::int64_t n) {
    if (n < 1) throw std::domain_error("need n >= 1");
    return return_sequence_impl<Rational>(model, s, n).back();
}

double return_probability(const MarkovModel& model, int s, std::int64_t n) {
    if (n < 1) throw std::domain_error("need n >= 1");
    if (model.backend() == Backend::Exact)
        return to_double(return_probability_exact(model, s, n));
    return return_sequence_impl<double>(model, s, n).back();
}

SeqPrefix return_sequence(const MarkovModel& model, int s, std::int64_t N) {
    if (model.backend() == Backend::Exact) {
        auto u = return_sequence_impl<Rational>(model, s, N);
        std::vector<double> v;
        v.reserve(u.size());
        for (const auto& r : u) v.push_back(to_double(r));
        return SeqPrefix(1, std::move(v), true);
    }
    return SeqPrefix(1, return_sequence_impl<double>(model, s, N), true);
}

namespace {

template <class S>
S multi_correlation_impl(const MarkovModel& model,
                         const detail::CompiledChain<S>& chain,
                         const std::vector<std::vector<FiberedCylinder>>& parts,
                         std::int64_t k,
                         const std::vector<std::int64_t>& shifts) {
    std::vector<std::int64_t> times(parts.size());
    for (std::size_t j = 0; j < parts.size(); ++j)
        times[j] = static_cast<std::int64_t>(j) * k + shifts[j];

    // disjoint unions make the tuple expansion additive
    S total{};
    std::vector<std::size_t> pick(parts.size(), 0);
    for (const auto& p : parts)
        if (p.empty()) return S{};
    while (true) {
        std::vector<FiberedCylinder> tuple;
        tuple.reserve(parts.size());
        for (std::size_t j = 0; j < parts.size(); ++j)
            tuple.push_back(parts[j][pick[j]]);
        auto q = detail::build_query(model, tuple, times);
        total += detail::anchored_measure<S>(model, chain, q);

        std::size_t j = 0;
        while (j < parts.size() && ++pick[j] == parts[j].size()) {
            pick[j] = 0;
            ++j;
        }
        if (j == parts.size()) break;
    }
    return total;
}

template <class S>
S multi_correlation_entry(const MarkovModel& model,
                          const std::vector<CylinderSet>& sets, std::int64_t k,
                          const std::vector<std::int64_t>& shifts) {
    if (sets.empty()) throw std::domain_error("need at least one set");
    if (shifts.size() != sets.size())
        throw std::domain_error("shifts size must match sets size");
    auto chain = detail::CompiledChain<S>::compile(model);
    std::vector<std::vector<FiberedCylinder>> parts;
    parts.reserve(sets.size());
    for (const auto& s : sets) parts.push_back(detail::disjointify(model, s));
    return multi_correlation_impl<S>(model, chain, parts, k, shifts);
}

}  // namespace

Rational multi_correlation_exact(const MarkovModel& model,
                                 const std::vector<CylinderSet>& sets,
                                 std::int64_t k,
                                 const std::vector<std::int64_t>& shifts) {
    return multi_correlation_entry<Rational>(model, sets, k, shifts);
}

double multi_correlation(const MarkovModel& model,
                         const std::vector<CylinderSet>& sets, std::int64_t k,
                         const std::vector<std::int64_t>& shifts) {
    if (model.backend() == Backend::Exact)
        return to_double(multi_correlation_entry<Rational>(model, sets, k, shifts));
    return multi_correlation_entry<double>(model, sets, k, shifts);
}

std::vector<double> multi_correlation_sweep(
    const MarkovModel& model, const std::vector<CylinderSet>& sets,
    const std::vector<std::int64_t>& shifts, std::int64_t n, int threads) {
    if (n < 1) throw std::domain_error("need n >= 1");
    auto chain = detail::CompiledChain<double>::compile(model);
    std::vector<std::vector<FiberedCylinder>> parts;
    for (const auto& s : sets) parts.push_back(detail::disjointify(model, s));
    std::vector<double> out(static_cast<std::size_t>(n));
    parallel_for(n, threads, [&](std::int64_t i) {
        out[static_cast<std::size_t>(i)] =
            multi_correlation_impl<double>(model, chain, parts, i + 1, shifts);
    });
    return out;
}

double rwm_defect(const MarkovModel& model,
                  const std::vector<CylinderSet>& sets, int d,
                  const std::vector<std::int64_t>& shifts, std::int64_t n,
                  int threads) {
    if (d < 1) throw std::domain_error("need d >= 1");
    if (static_cast<int>(sets.size()) != d + 1)
        throw std::domain_error("need d+1 sets");
    auto u = return_sequence(model, 0, n);
    auto a = partial_power_sum(u, d);
    double a_n = a.at(n);
    if (a_n <= 0.0) throw std::domain_error("a_d(n) = 0");

    double product = 1.0;
    for (const auto& s : sets) product *= set_measure(model, s);

    auto corr = multi_correlation_sweep(model, sets, shifts, n, threads);
    KahanSum defect;
    for (std::int64_t k = 1; k <= n; ++k) {
        double ud = std::pow(u.at(k), d);
        defect.add(std::abs(corr[static_cast<std::size_t>(k - 1)] -
                            product * ud));
    }
    return defect.value() / a_n;
}

RecurrenceVerdict recurrence_classify(const MarkovModel& model, int d,
                                      std::int64_t n_max, double tol) {
    if (d < 1) throw std::domain_error("need d >= 1");
    RecurrenceVerdict v;
    if (n_max <= 0) n_max = model.kappa() >= 2 ? 600 : 10000;
    v.prefix_length = n_max;
    if (n_max < 64) {
        v.note = "insufficient prefix length";
        return v;
    }
    auto u = return_sequence(model, 0, n_max);

    // fit decay exponent over the positive entries of the top decade
    std::int64_t lo = std::max<std::int64_t>(1, n_max / 10);
    KahanSum sx, sy, sxx, sxy;
    std::int64_t count = 0;
    for (std::int64_t k = lo; k <= n_max; ++k) {
        double uv = u.at(k);
        if (uv <= 0.0) continue;  // parity sublattice: skip dead indices
        double lx = std::log(static_cast<double>(k));
        double ly = std::log(uv);
        sx.add(lx);
        sy.add(ly);
        sxx.add(lx * lx);
        sxy.add(lx * ly);
        ++count;
    }
    if (count < 8) {
        v.note = "insufficient positive return mass in fit window";
        return v;
    }
    double m = static_cast<double>(count);
    double slope = (m * sxy.value() - sx.value() * sy.value()) /
                   (m * sxx.value() - sx.value() * sx.value());
    v.decay_exponent = -slope;
    v.exponent_times_d = v.decay_exponent * d;

    if (v.exponent_times_d < 1.0 - tol) {
        v.kind = RecurrenceKind::Recurrent;
        v.note = "fitted exponent below divergence boundary";
        return v;
    }
    if (v.exponent_times_d > 1.0 + tol) {
        v.kind = RecurrenceKind::Dissipative;
        v.note = "fitted exponent above convergence boundary";
        return v;
    }

    // boundary band: test for harmonic-type growth of a_d over dyadic blocks
    v.boundary_case = true;
    auto a = partial_power_sum(u, d);
    double i1 = a.at(n_max) - a.at(n_max / 2);
    double i2 = a.at(n_max / 2) - a.at(n_max / 4);
    double i3 = a.at(n_max / 4) - a.at(n_max / 8);
    if (i2 <= 0.0 || i3 <= 0.0) {
        v.note = "degenerate dyadic increments";
        return v;
    }
    double r1 = i1 / i2, r2 = i2 / i3;
    v.dyadic_increment_ratio = r1;
    if (r1 >= 0.75 && r2 >= 0.75) {
        v.kind = RecurrenceKind::Recurrent;
        v.note = "boundary case with harmonic-type (non-shrinking) increments";
    } else {
        v.note = "boundary case, increments shrink; divergence undecidable";
    }
    return v;
}

std::optional<std::int64_t> recurrence_witness(const MarkovModel& model,
                                               const CylinderSet& A, int d,
                                               std::int64_t n_max) {
    if (!(set_measure(model, A) > 0.0))
        throw std::domain_error("witness requires m(A) > 0");
    std::vector<CylinderSet> sets(d + 1, A);
    std::vector<std::int64_t> shifts(d + 1, 0);
    for (std::int64_t n = 1; n <= n_max; ++n) {
        // nonnegative-path DP: the float value is zero iff the measure is zero
        if (multi_correlation(model, sets, n, shifts) > 0.0) return n;
    }
    return std::nullopt;
}

AdmissibilityReport admissibility_band(const MarkovModel& model,
                                       const CylinderSet& omega, int d,
                                       IndexRange window, int threads) {
    if (d < 1) throw std::domain_error("need d >= 1");
    if (window.lo < 1 || window.lo > window.hi)
        throw std::out_of_range("bad window");
    double m_omega = set_measure(model, omega);
    if (!(m_omega > 0.0)) throw std::domain_error("need m(Omega) > 0");

    std::int64_t count = window.hi - window.lo + 1;
    std::vector<double> num(count), uval(count);
    std::vector<CylinderSet> pair_sets{omega, omega};
    std::vector<std::int64_t> pair_shifts{0, 0};
    std::vector<CylinderSet> chain_sets(d + 1, omega);
    std::vector<std::int64_t> chain_shifts(d + 1, 0);
    parallel_for(count, threads, [&](std::int64_t i) {
        std::int64_t n = window.lo + i;
        uval[i] = multi_correlation(model, pair_sets, n, pair_shifts) / m_omega;
        num[i] = multi_correlation(model, chain_sets, n, chain_shifts);
    });

    AdmissibilityReport rep;
    rep.band.window = window;
    bool first = true;
    for (std::int64_t i = 0; i < count; ++i) {
        if (uval[i] <= 0.0) {
            rep.skipped.push_back(window.lo + i);
            continue;
        }
        double r = num[i] / std::pow(uval[i], d);
        if (first) {
            rep.band.low = rep.band.high = r;
            first = false;
        } else {
            rep.band.low = std::min(rep.band.low, r);
            rep.band.high = std::max(rep.band.high, r);
        }
    }
    if (first) throw std::domain_error("no usable window points (all skipped)");
    return rep;
}

SeqPrefix induced_return_distribution(const MarkovModel& model,
                                      std::int64_t n_max) {
    if (model.kappa() < 1)
        throw std::domain_error("induced return needs a lattice extension");
    if (n_max < 1) throw std::domain_error("need n_max >= 1");
    auto chain = detail::CompiledChain<double>::compile(model);
    const int radius = static_cast<int>(n_max * model.max_step_norm());
    detail::BoxDist<double> box(model.num_states(), model.kappa(), radius);
    std::array<int, 3> origin = {0, 0, 0};
    for (int s = 0; s < model.num_states(); ++s)
        box.deposit(s, origin, model.stationary()[s]);

    std::vector<double> law;
    law.reserve(n_max);
    for (std::int64_t n = 1; n <= n_max; ++n) {
        box.step(chain);
        KahanSum hit;
        for (int s = 0; s < model.num_states(); ++s)
            hit.add(box.state_mass_at(s, origin));
        law.push_back(hit.value());
        box.zero_fiber_slice(origin);  // taboo: survivors stay off the fiber
    }
    return SeqPrefix(1, std::move(law), true);
}

}  // namespace erglab
