#include "erglab/builtin.hpp"

#include <stdexcept>

namespace erglab {

namespace {

Branch br(int to, const Rational& w, std::vector<int> step) {
    return Branch{to, w, std::move(step)};
}

MarkovModel lazy_walk(Backend b) {
    std::vector<std::vector<Branch>> edges(1);
    edges[0] = {br(0, Rational(1, 4), {-1}), br(0, Rational(1, 2), {0}),
                br(0, Rational(1, 4), {1})};
    return MarkovModel(1, 1, std::move(edges), b);
}

MarkovModel nonlazy_walk(Backend b) {
    std::vector<std::vector<Branch>> edges(1);
    edges[0] = {br(0, Rational(1, 2), {-1}), br(0, Rational(1, 2), {1})};
    return MarkovModel(1, 1, std::move(edges), b);
}

MarkovModel z2_walk(Backend b) {
    std::vector<std::vector<Branch>> edges(1);
    const Rational p[3] = {Rational(1, 4), Rational(1, 2), Rational(1, 4)};
    for (int dx = -1; dx <= 1; ++dx)
        for (int dy = -1; dy <= 1; ++dy)
            edges[0].push_back(br(0, p[dx + 1] * p[dy + 1], {dx, dy}));
    return MarkovModel(1, 2, std::move(edges), b);
}

MarkovModel biased_2state(Backend b) {
    std::vector<std::vector<Branch>> edges(2);
    edges[0] = {br(0, Rational(9, 10), {}), br(1, Rational(1, 10), {})};
    edges[1] = {br(0, Rational(1, 5), {}), br(1, Rational(4, 5), {})};
    return MarkovModel(2, 0, std::move(edges), b);
}

MarkovModel uniform_2state(Backend b) {
    std::vector<std::vector<Branch>> edges(2);
    for (int s = 0; s < 2; ++s)
        edges[s] = {br(0, Rational(1, 2), {}), br(1, Rational(1, 2), {})};
    return MarkovModel(2, 0, std::move(edges), b);
}

// Uniform full shift on two symbols; every edge carries the lazy step law.
// Base of the two-valued-roof semiflow: roof depends on the state, steps
// stay aperiodic jointly with it.
MarkovModel two_roof_base(Backend b) {
    std::vector<std::vector<Branch>> edges(2);
    for (int s = 0; s < 2; ++s)
        for (int t = 0; t < 2; ++t) {
            edges[s].push_back(br(t, Rational(1, 8), {-1}));
            edges[s].push_back(br(t, Rational(1, 4), {0}));
            edges[s].push_back(br(t, Rational(1, 8), {1}));
        }
    return MarkovModel(2, 1, std::move(edges), b);
}

MarkovModel cycle_3state(Backend b) {
    std::vector<std::vector<Branch>> edges(3);
    for (int s = 0; s < 3; ++s) {
        edges[s].push_back(br(s, Rational(1, 2), {0}));
        edges[s].push_back(br((s + 1) % 3, Rational(1, 4), {1}));
        edges[s].push_back(br((s + 2) % 3, Rational(1, 4), {-1}));
    }
    return MarkovModel(3, 1, std::move(edges), b);
}

}  // namespace

MarkovModel builtin_model(const std::string& name, Backend backend) {
    if (name == "lazy-walk") return lazy_walk(backend);
    if (name == "nonlazy-walk") return nonlazy_walk(backend);
    if (name == "z2-walk") return z2_walk(backend);
    if (name == "biased-2state") return biased_2state(backend);
    if (name == "uniform-2state") return uniform_2state(backend);
    if (name == "two-roof-base") return two_roof_base(backend);
    if (name == "cycle-3state") return cycle_3state(backend);
    throw std::domain_error("unknown builtin model: " + name);
}

std::vector<std::string> builtin_model_names() {
    return {"lazy-walk",      "nonlazy-walk",  "z2-walk",     "biased-2state",
            "uniform-2state", "two-roof-base", "cycle-3state"};
}

}  // namespace erglab
