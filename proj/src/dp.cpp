#include "erglab/detail/dp.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <stdexcept>

namespace erglab::detail {

AnchoredQuery build_query(const MarkovModel& model,
                          const std::vector<FiberedCylinder>& members,
                          const std::vector<std::int64_t>& times) {
    AnchoredQuery q;
    const int kappa = model.kappa();
    for (std::size_t j = 0; j < members.size(); ++j) {
        const auto& m = members[j];
        const std::int64_t t = times[j];
        for (std::size_t i = 0; i < m.word.size(); ++i) {
            int state = m.word[i];
            if (state < 0 || state >= model.num_states())
                throw std::domain_error("cylinder symbol outside state set");
            std::int64_t pos = m.position + t + static_cast<std::int64_t>(i);
            auto it = q.symbols.find(pos);
            if (it == q.symbols.end())
                q.symbols.emplace(pos, state);
            else if (it->second != state)
                q.contradictory = true;
        }
        if (kappa > 0 && m.fiber) {
            if (static_cast<int>(m.fiber->size()) != kappa)
                throw std::domain_error("fiber dimension != kappa");
            std::array<int, 3> z = {0, 0, 0};
            for (int i = 0; i < kappa; ++i) z[i] = (*m.fiber)[i];
            bool merged = false;
            for (auto& a : q.anchors)
                if (a.first == t) {
                    if (a.second != z) q.contradictory = true;
                    merged = true;
                }
            if (!merged) q.anchors.emplace_back(t, z);
        }
    }
    std::sort(q.anchors.begin(), q.anchors.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return q;
}

template <class S>
S anchored_measure(const MarkovModel& model, const CompiledChain<S>& chain,
                   const AnchoredQuery& q) {
    if (q.contradictory) return S{};
    const int kappa = model.kappa();
    if (kappa > 0 && q.anchors.empty())
        throw std::domain_error(
            "intersection has infinite measure: no fibered constraint");
    if (q.symbols.empty() && q.anchors.empty()) {
        // whole space, kappa = 0
        S one{};
        for (const auto& m : chain.mu) one += m;
        return one;
    }

    std::int64_t p0, p1;
    {
        bool have = false;
        p0 = p1 = 0;
        auto see = [&](std::int64_t p) {
            if (!have) {
                p0 = p1 = p;
                have = true;
            } else {
                p0 = std::min(p0, p);
                p1 = std::max(p1, p);
            }
        };
        for (const auto& kv : q.symbols) see(kv.first);
        for (const auto& a : q.anchors) see(a.first);
    }

    auto symbol_at = [&](std::int64_t p) -> int {
        auto it = q.symbols.find(p);
        return it == q.symbols.end() ? -1 : it->second;
    };

    if (kappa == 0) {
        std::vector<S> state(chain.mu);
        for (std::int64_t p = p0;; ++p) {
            int req = symbol_at(p);
            if (req >= 0)
                for (int s = 0; s < chain.nstates; ++s)
                    if (s != req) state[s] = S{};
            if (p == p1) break;
            std::vector<S> next(chain.nstates, S{});
            for (int s = 0; s < chain.nstates; ++s) {
                if (!(state[s] != S{})) continue;
                for (const auto& b : chain.br[s]) next[b.to] += state[s] * b.w;
            }
            state.swap(next);
        }
        S total{};
        for (const auto& v : state) total += v;
        return total;
    }

    const std::int64_t t_first = q.anchors.front().first;
    int max_anchor_norm = 0;
    for (const auto& a : q.anchors)
        for (int i = 0; i < kappa; ++i)
            max_anchor_norm = std::max(max_anchor_norm, std::abs(a.second[i]));
    const std::int64_t span_after = p1 - t_first;
    const std::int64_t radius64 =
        max_anchor_norm + span_after * static_cast<std::int64_t>(chain.max_step);
    if (radius64 > (1 << 24))
        throw ResourceError("anchored query lattice window too large");
    const int radius = static_cast<int>(radius64);

    // state-only phase up to the first anchor
    std::vector<S> state(chain.mu);
    std::int64_t p = p0;
    for (; p < t_first; ++p) {
        int req = symbol_at(p);
        if (req >= 0)
            for (int s = 0; s < chain.nstates; ++s)
                if (s != req) state[s] = S{};
        std::vector<S> next(chain.nstates, S{});
        for (int s = 0; s < chain.nstates; ++s) {
            if (!(state[s] != S{})) continue;
            for (const auto& b : chain.br[s]) next[b.to] += state[s] * b.w;
        }
        state.swap(next);
    }

    BoxDist<S> box(chain.nstates, kappa, radius);
    for (int s = 0; s < chain.nstates; ++s)
        if (state[s] != S{}) box.deposit(s, q.anchors.front().second, state[s]);

    std::size_t next_anchor = 0;
    for (;; ++p) {
        int req = symbol_at(p);
        if (req >= 0) box.require_state(req);
        while (next_anchor < q.anchors.size() &&
               q.anchors[next_anchor].first == p) {
            box.require_fiber(q.anchors[next_anchor].second);
            ++next_anchor;
        }
        if (p == p1) break;
        box.step(chain);
    }
    return box.total();
}

template double anchored_measure<double>(const MarkovModel&,
                                         const CompiledChain<double>&,
                                         const AnchoredQuery&);
template Rational anchored_measure<Rational>(const MarkovModel&,
                                             const CompiledChain<Rational>&,
                                             const AnchoredQuery&);

namespace {

// Set-level overlap test for two fibered cylinders.
bool members_overlap(const FiberedCylinder& a, const FiberedCylinder& b) {
    if (a.fiber && b.fiber && *a.fiber != *b.fiber) return false;
    std::int64_t lo = std::max(a.position, b.position);
    std::int64_t hi = std::min(a.position + static_cast<std::int64_t>(a.word.size()),
                               b.position + static_cast<std::int64_t>(b.word.size()));
    for (std::int64_t p = lo; p < hi; ++p)
        if (a.word[p - a.position] != b.word[p - b.position]) return false;
    return true;
}

bool tuple_less(const FiberedCylinder& a, const FiberedCylinder& b) {
    if (a.position != b.position) return a.position < b.position;
    if (a.word != b.word) return a.word < b.word;
    bool af = a.fiber.has_value(), bf = b.fiber.has_value();
    if (af != bf) return af < bf;
    if (af && *a.fiber != *b.fiber) return *a.fiber < *b.fiber;
    return false;
}

bool tuple_eq(const FiberedCylinder& a, const FiberedCylinder& b) {
    return !tuple_less(a, b) && !tuple_less(b, a);
}

}  // namespace

std::vector<FiberedCylinder> disjointify(const MarkovModel& model,
                                         const CylinderSet& set) {
    std::vector<FiberedCylinder> members = set;
    if (model.kappa() == 0)
        for (auto& m : members) m.fiber = std::vector<int>{};

    std::sort(members.begin(), members.end(), tuple_less);
    members.erase(std::unique(members.begin(), members.end(), tuple_eq),
                  members.end());

    bool need_refine = false;
    for (std::size_t i = 0; i < members.size() && !need_refine; ++i)
        for (std::size_t j = i + 1; j < members.size() && !need_refine; ++j)
            if (members_overlap(members[i], members[j])) need_refine = true;
    if (!need_refine) return members;

    bool any_fibered = false, any_unfibered = false;
    for (const auto& m : members)
        (m.fiber ? any_fibered : any_unfibered) = true;
    if (any_fibered && any_unfibered)
        throw std::domain_error(
            "cannot disjointify a union mixing fibered and unfibered members");

    std::int64_t lo = members.front().position, hi = lo;
    for (const auto& m : members) {
        lo = std::min(lo, m.position);
        hi = std::max(hi, m.position + static_cast<std::int64_t>(m.word.size()));
    }
    if (hi - lo > 16)
        throw ResourceError("union refinement span too wide");

    const int span = static_cast<int>(hi - lo);
    std::set<std::pair<std::vector<int>, std::vector<int>>> atoms;  // (word, fiber key)
    std::vector<int> word(span);

    // All admissible span-words extending a member; inadmissible words have
    // measure zero and are dropped.
    std::function<void(int, const FiberedCylinder&)> extend =
        [&](int i, const FiberedCylinder& m) {
            if (i == span) {
                std::vector<int> fiber_key;
                if (m.fiber) fiber_key = *m.fiber;
                atoms.emplace(word, fiber_key);
                if (atoms.size() > 200000)
                    throw ResourceError("union refinement too large");
                return;
            }
            std::int64_t p = lo + i;
            std::int64_t rel = p - m.position;
            bool constrained =
                rel >= 0 && rel < static_cast<std::int64_t>(m.word.size());
            for (int s = 0; s < model.num_states(); ++s) {
                if (constrained && m.word[rel] != s) continue;
                if (i > 0 && !(model.transition_exact(word[i - 1], s) > 0))
                    continue;
                word[i] = s;
                extend(i + 1, m);
            }
        };
    for (const auto& m : members) extend(0, m);

    std::vector<FiberedCylinder> out;
    out.reserve(atoms.size());
    for (const auto& a : atoms) {
        FiberedCylinder c;
        c.position = lo;
        c.word = a.first;
        if (any_fibered)
            c.fiber = a.second;
        else if (model.kappa() == 0)
            c.fiber = std::vector<int>{};
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace erglab::detail
