#pragma once

// Transfer operator of the one-sided shift extension, acting on finite
// linear combinations of fibered-cylinder indicators. The class of such
// step functions is closed under the operator: words shrink by one symbol
// per application while fiber support spreads by the cocycle steps.

#include "erglab/markov.hpp"
#include "erglab/rational.hpp"

#include <map>
#include <optional>
#include <vector>

namespace erglab {

// Indicator support atom: cylinder [word]_0 on the one-sided shift, times
// one lattice copy (fiber absent = every copy; empty word = whole base).
struct StepAtom {
    std::vector<int> word;
    std::optional<std::vector<int>> fiber;

    bool operator<(const StepAtom& o) const {
        if (word != o.word) return word < o.word;
        bool f = fiber.has_value(), g = o.fiber.has_value();
        if (f != g) return f < g;
        if (f) return *fiber < *o.fiber;
        return false;
    }
};

template <class S>
class BasicStepFunction {
public:
    std::map<StepAtom, S> terms;

    static BasicStepFunction indicator(const StepAtom& a) {
        BasicStepFunction f;
        f.terms[a] = S(1);
        return f;
    }
    static BasicStepFunction one() { return indicator(StepAtom{}); }

    void add_term(const StepAtom& a, const S& c) {
        if (!(c != S{})) return;
        auto [it, fresh] = terms.emplace(a, c);
        if (!fresh) {
            it->second += c;
            if (!(it->second != S{})) terms.erase(it);
        }
    }
    std::size_t size() const { return terms.size(); }
};

using StepFunction = BasicStepFunction<double>;
using StepFunctionExact = BasicStepFunction<Rational>;

// One application of the transfer operator.
StepFunction transfer_step(const MarkovModel& model, const StepFunction& f);
StepFunctionExact transfer_step_exact(const MarkovModel& model,
                                      const StepFunctionExact& f);

// n-fold application.
StepFunction transfer_apply(const MarkovModel& model, const StepFunction& f,
                            std::int64_t n);
StepFunctionExact transfer_apply_exact(const MarkovModel& model,
                                       const StepFunctionExact& f,
                                       std::int64_t n);

// Nested resolvent-style expression
//   T^{e_1}( 1_{A_1} * T^{e_2}( 1_{A_2} * ... T^{e_d}( 1_{A_d} ) ... ) )
// with exponents e_i and support sets A_i given as unions of step atoms.
StepFunction transfer_nested(const MarkovModel& model,
                             const std::vector<std::vector<StepAtom>>& sets,
                             const std::vector<std::int64_t>& exponents,
                             std::size_t support_budget = 2'000'000);
StepFunctionExact transfer_nested_exact(
    const MarkovModel& model, const std::vector<std::vector<StepAtom>>& sets,
    const std::vector<std::int64_t>& exponents,
    std::size_t support_budget = 2'000'000);

// Pointwise product f * 1_{union of atoms}; atoms in one set must be
// pairwise disjoint.
StepFunction mask_by_set(const StepFunction& f,
                         const std::vector<StepAtom>& set);
StepFunctionExact mask_by_set_exact(const StepFunctionExact& f,
                                    const std::vector<StepAtom>& set);

// Integral against the sigma-finite extension measure; requires every atom
// with nonzero coefficient to be fibered when kappa > 0.
double integrate(const MarkovModel& model, const StepFunction& f);
Rational integrate_exact(const MarkovModel& model, const StepFunctionExact& f);

// <f, 1_B> for a fibered cylinder at position 0.
double pair_with_indicator(const MarkovModel& model, const StepFunction& f,
                           const StepAtom& b);
Rational pair_with_indicator_exact(const MarkovModel& model,
                                   const StepFunctionExact& f,
                                   const StepAtom& b);

// Evaluate at a point given by a word prefix (long enough to decide every
// atom) and a fiber coordinate.
double eval_at(const StepFunction& f, const std::vector<int>& prefix,
               const std::vector<int>& fiber);
Rational eval_at_exact(const StepFunctionExact& f,
                       const std::vector<int>& prefix,
                       const std::vector<int>& fiber);

}  // namespace erglab
