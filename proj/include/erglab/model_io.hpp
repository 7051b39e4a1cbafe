#pragma once

#include "erglab/fuchsian.hpp"
#include "erglab/markov.hpp"
#include "erglab/semiflow.hpp"

#include <optional>
#include <string>

namespace erglab {

// Chain definition file (JSON): states, edge branches with exact rational
// weights and lattice steps. Round-trips losslessly in exact mode.
MarkovModel parse_model_json(const std::string& text, Backend backend);
std::string model_to_json(const MarkovModel& model);
MarkovModel load_model(const std::string& path, Backend backend);

// Suspension file: inline base model plus a roof table of exact rationals.
SemiflowModel parse_semiflow_json(const std::string& text, Backend backend);
std::string semiflow_to_json(const SemiflowModel& model);
SemiflowModel load_semiflow(const std::string& path, Backend backend);

// Group file: generator pair matrices, optional relator word, theta rows.
struct GroupFile {
    FuchsianGroup group;
    std::optional<ThetaMap> theta;
};
GroupFile parse_group_json(const std::string& text);
std::string group_to_json(const FuchsianGroup& group,
                          const std::optional<ThetaMap>& theta);
GroupFile load_group(const std::string& path);

// Enumeration cache under $ERGLAB_CACHE_DIR (no caching when unset), keyed
// by a hash of the generator matrices and the depth. Loads reproduce the
// fresh enumeration bit for bit.
std::optional<Enumeration> load_enumeration_cache(const FuchsianGroup& G,
                                                  int max_len);
void store_enumeration_cache(const FuchsianGroup& G, int max_len,
                             const Enumeration& E);

// Enumerate with cache when available.
Enumeration enumerate_cached(const FuchsianGroup& G, int max_len);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace erglab
