#pragma once

#include "erglab/markov.hpp"

#include <string>
#include <vector>

namespace erglab {

// Desk model library. Names accepted by the CLI's `model` field:
//   lazy-walk      single state, kappa 1, steps -1/0/+1 with mass 1/4,1/2,1/4
//   nonlazy-walk   single state, kappa 1, steps +-1 with mass 1/2 (parity)
//   z2-walk        single state, kappa 2, product of two lazy walks
//   biased-2state  kappa 0, P = [[9/10,1/10],[1/5,4/5]]
//   uniform-2state kappa 0, full shift on two symbols
//   two-roof-base  uniform 2-state full shift with lazy steps on every edge
//   cycle-3state   kappa 1, symmetric 3-state chain with rotation steps
MarkovModel builtin_model(const std::string& name, Backend backend);

std::vector<std::string> builtin_model_names();

}  // namespace erglab
