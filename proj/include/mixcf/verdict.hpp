#pragma once

// Result records shared by the condition checkers, the diagnostics and the
// solver report.

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "mixcf/geodesic.hpp"

namespace mixcf {

struct ConditionVerdict {
  std::string name;
  bool pass = false;
  /// Smallest value of the tested quantity over every sample.
  double margin = 0.0;
  double tol = 0.0;
  std::size_t witness_node = 0;
  /// Index of the sampled frame or direction at the witness (0 = node frame).
  int witness_frame = 0;
  /// Tangent direction (ambient) of the witness frame's first vector.
  Vec3 witness_direction = Vec3::Zero();
  std::size_t samples = 0;
  /// How frames or directions were quantified, e.g. "16 sampled frames".
  std::string quantifier;
  bool resampled = false;
};

struct RankProfile {
  double tau = 0.0;
  std::vector<std::array<double, 2>> eigenvalues;  // ascending per node
  double min_eig = 0.0;
  std::size_t min_node = 0;
  std::vector<int> ranks;
  std::array<std::size_t, 3> histogram{};
  /// Smallest rank observed; the test function uses sigma_{l+1}, sigma_{l+2}.
  int l = 0;
  /// False when l = n and the test function has nothing to measure.
  bool phi_applicable = false;
  std::vector<double> phi_values;
};

}  // namespace mixcf
