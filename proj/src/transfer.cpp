#include "erglab/transfer.hpp"

#include "erglab/detail/dp.hpp"
#include "erglab/errors.hpp"
#include "erglab/summation.hpp"

#include <stdexcept>

namespace erglab {

namespace {

template <class S>
using SF = BasicStepFunction<S>;

template <class S>
S scalar_from(const Rational& r) {
    return detail::ScalarOps<S>::from(r);
}

template <class S>
std::vector<int> shifted_fiber(const std::vector<int>& fiber,
                               const std::vector<int>& step) {
    std::vector<int> out(fiber);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += step[i];
    return out;
}

template <class S>
SF<S> transfer_step_impl(const MarkovModel& model, const SF<S>& f) {
    const auto& mu = model.stationary_exact();
    SF<S> out;
    for (const auto& [atom, coeff] : f.terms) {
        if (atom.word.empty()) {
            // whole-base support: preimages split by the first symbol
            for (int s = 0; s < model.num_states(); ++s)
                for (const auto& b : model.branches()[s]) {
                    StepAtom na;
                    na.word = {b.to};
                    if (atom.fiber)
                        na.fiber = shifted_fiber<S>(*atom.fiber, b.step);
                    out.add_term(na,
                                 coeff * scalar_from<S>(mu[s] * b.weight /
                                                        mu[b.to]));
                }
            continue;
        }
        const int head = atom.word[0];
        if (atom.word.size() == 1) {
            for (const auto& b : model.branches()[head]) {
                StepAtom na;
                na.word = {b.to};
                if (atom.fiber)
                    na.fiber = shifted_fiber<S>(*atom.fiber, b.step);
                out.add_term(na, coeff * scalar_from<S>(mu[head] * b.weight /
                                                        mu[b.to]));
            }
        } else {
            const int second = atom.word[1];
            std::vector<int> tail(atom.word.begin() + 1, atom.word.end());
            for (const auto& b : model.branches()[head]) {
                if (b.to != second) continue;
                StepAtom na;
                na.word = tail;
                if (atom.fiber)
                    na.fiber = shifted_fiber<S>(*atom.fiber, b.step);
                out.add_term(na, coeff * scalar_from<S>(mu[head] * b.weight /
                                                        mu[second]));
            }
        }
    }
    return out;
}

template <class S>
SF<S> transfer_apply_impl(const MarkovModel& model, SF<S> f, std::int64_t n,
                          std::size_t budget) {
    if (n < 0) throw std::domain_error("transfer power must be >= 0");
    for (std::int64_t i = 0; i < n; ++i) {
        f = transfer_step_impl<S>(model, f);
        if (f.size() > budget)
            throw ResourceError(
                "transfer support exceeded budget; reduce n or shrink the "
                "input support");
    }
    return f;
}

// product of two indicator atoms, or nullopt when disjoint
std::optional<StepAtom> atom_intersection(const StepAtom& a,
                                          const StepAtom& b) {
    const auto& shorter = a.word.size() <= b.word.size() ? a.word : b.word;
    const auto& longer = a.word.size() <= b.word.size() ? b.word : a.word;
    for (std::size_t i = 0; i < shorter.size(); ++i)
        if (shorter[i] != longer[i]) return std::nullopt;
    StepAtom out;
    out.word = longer;
    if (a.fiber && b.fiber) {
        if (*a.fiber != *b.fiber) return std::nullopt;
        out.fiber = a.fiber;
    } else if (a.fiber) {
        out.fiber = a.fiber;
    } else if (b.fiber) {
        out.fiber = b.fiber;
    }
    return out;
}

template <class S>
SF<S> mask_impl(const SF<S>& f, const std::vector<StepAtom>& set) {
    SF<S> out;
    for (const auto& [atom, coeff] : f.terms)
        for (const auto& mask : set)
            if (auto cut = atom_intersection(atom, mask))
                out.add_term(*cut, coeff);
    return out;
}

template <class S>
SF<S> transfer_nested_impl(const MarkovModel& model,
                           const std::vector<std::vector<StepAtom>>& sets,
                           const std::vector<std::int64_t>& exponents,
                           std::size_t budget) {
    if (sets.empty() || sets.size() != exponents.size())
        throw std::domain_error("need matching sets and exponents");
    SF<S> g;
    for (const auto& a : sets.back()) g.add_term(a, S(1));
    for (std::size_t i = sets.size() - 1; i-- > 0;) {
        g = transfer_apply_impl<S>(model, std::move(g), exponents[i + 1],
                                   budget);
        g = mask_impl<S>(g, sets[i]);
    }
    return transfer_apply_impl<S>(model, std::move(g), exponents[0], budget);
}

template <class S>
S atom_integral(const MarkovModel& model, const StepAtom& a) {
    if (model.kappa() > 0 && !a.fiber)
        throw std::domain_error("unfibered atom has infinite integral");
    if (a.word.empty()) return S(1);
    Rational m = model.stationary_exact()[a.word[0]];
    for (std::size_t i = 0; i + 1 < a.word.size(); ++i)
        m *= model.transition_exact(a.word[i], a.word[i + 1]);
    return scalar_from<S>(m);
}

template <class S>
S integrate_impl(const MarkovModel& model, const SF<S>& f) {
    S total{};
    for (const auto& [atom, coeff] : f.terms)
        total += coeff * atom_integral<S>(model, atom);
    return total;
}

template <class S>
S pair_impl(const MarkovModel& model, const SF<S>& f, const StepAtom& b) {
    S total{};
    for (const auto& [atom, coeff] : f.terms)
        if (auto cut = atom_intersection(atom, b))
            total += coeff * atom_integral<S>(model, *cut);
    return total;
}

template <class S>
S eval_impl(const SF<S>& f, const std::vector<int>& prefix,
            const std::vector<int>& fiber) {
    S total{};
    for (const auto& [atom, coeff] : f.terms) {
        if (atom.word.size() > prefix.size())
            throw std::domain_error("point prefix too short to decide atom");
        bool match = true;
        for (std::size_t i = 0; i < atom.word.size() && match; ++i)
            match = atom.word[i] == prefix[i];
        if (!match) continue;
        if (atom.fiber && *atom.fiber != fiber) continue;
        total += coeff;
    }
    return total;
}

}  // namespace

StepFunction transfer_step(const MarkovModel& model, const StepFunction& f) {
    return transfer_step_impl<double>(model, f);
}
StepFunctionExact transfer_step_exact(const MarkovModel& model,
                                      const StepFunctionExact& f) {
    return transfer_step_impl<Rational>(model, f);
}

StepFunction transfer_apply(const MarkovModel& model, const StepFunction& f,
                            std::int64_t n) {
    return transfer_apply_impl<double>(model, f, n, 2'000'000);
}
StepFunctionExact transfer_apply_exact(const MarkovModel& model,
                                       const StepFunctionExact& f,
                                       std::int64_t n) {
    return transfer_apply_impl<Rational>(model, f, n, 2'000'000);
}

StepFunction transfer_nested(const MarkovModel& model,
                             const std::vector<std::vector<StepAtom>>& sets,
                             const std::vector<std::int64_t>& exponents,
                             std::size_t support_budget) {
    return transfer_nested_impl<double>(model, sets, exponents,
                                        support_budget);
}
StepFunctionExact transfer_nested_exact(
    const MarkovModel& model, const std::vector<std::vector<StepAtom>>& sets,
    const std::vector<std::int64_t>& exponents, std::size_t support_budget) {
    return transfer_nested_impl<Rational>(model, sets, exponents,
                                          support_budget);
}

StepFunction mask_by_set(const StepFunction& f,
                         const std::vector<StepAtom>& set) {
    return mask_impl<double>(f, set);
}
StepFunctionExact mask_by_set_exact(const StepFunctionExact& f,
                                    const std::vector<StepAtom>& set) {
    return mask_impl<Rational>(f, set);
}

double integrate(const MarkovModel& model, const StepFunction& f) {
    return integrate_impl<double>(model, f);
}
Rational integrate_exact(const MarkovModel& model,
                         const StepFunctionExact& f) {
    return integrate_impl<Rational>(model, f);
}

double pair_with_indicator(const MarkovModel& model, const StepFunction& f,
                           const StepAtom& b) {
    return pair_impl<double>(model, f, b);
}
Rational pair_with_indicator_exact(const MarkovModel& model,
                                   const StepFunctionExact& f,
                                   const StepAtom& b) {
    return pair_impl<Rational>(model, f, b);
}

double eval_at(const StepFunction& f, const std::vector<int>& prefix,
               const std::vector<int>& fiber) {
    return eval_impl<double>(f, prefix, fiber);
}
Rational eval_at_exact(const StepFunctionExact& f,
                       const std::vector<int>& prefix,
                       const std::vector<int>& fiber) {
    return eval_impl<Rational>(f, prefix, fiber);
}

}  // namespace erglab
