#pragma once

#include <map>
#include <string>
#include <utility>

#include "laneemden/ground_state.hpp"

namespace laneemden::testing {

/// Ground states shared by all tests of one binary; solved once on first use.
inline const GroundStateProfile& ground_state(int N, const std::string& p) {
  static std::map<std::pair<int, std::string>, GroundStateProfile> cache;
  auto it = cache.find({N, p});
  if (it == cache.end()) it = cache.emplace(std::make_pair(N, p), solve_ground_state(pair_from_text(N, p))).first;
  return it->second;
}

inline double bubble(double r) { return 1.0 / (1.0 + r * r / 8.0); }

}  // namespace laneemden::testing
