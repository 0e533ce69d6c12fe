#pragma once

// Experiment configuration: one JSON document, optionally patched with
// dot-path overrides such as grid.n_theta=24 or bodies.0.r=2.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mixcf/bodies.hpp"

namespace mixcf {

using json = nlohmann::json;

/// Band-limited function: constant + sum value Y_l^m + sum a_k P_k(x3).
struct HarmonicSpec {
  double constant = 0.0;
  struct Term {
    int l, m;
    double value;
  };
  std::vector<Term> terms;
  std::vector<double> legendre;

  int degree() const;
  std::vector<double> coeffs() const;  // packed by sh_index up to degree()
};

struct DensitySpec {
  enum class Kind { Constant, Harmonic, ReciprocalHarmonic, ReciprocalLinear };
  Kind kind = Kind::Constant;
  double value = 1.0;           // Constant
  HarmonicSpec harmonic;        // Harmonic, ReciprocalHarmonic
  double a = 1.0;               // ReciprocalLinear: 1 / (a + <v, x>)
  Vec3 v = Vec3::Zero();

  ScalarFn function() const;
  /// Nodal values, with harmonic coefficients when the density is band-limited.
  SphericalField field(const GridPtr& grid) const;
};

struct Tolerances {
  double compat = 1e-8;
  double residual = 1e-6;
  double psd = 1e-8;
  double rank = 0.0;  // 0: 1e-6 times the largest eigenvalue of W
};

struct Sampling {
  int frames_per_node = 16;
  int n_dirs = 64;
  int n_samples = 2048;
};

struct ExperimentConfig {
  std::vector<BodySpec> bodies;
  std::optional<DensitySpec> density;
  std::optional<HarmonicSpec> target;
  int n_theta = 32;
  int n_phi = 64;
  int L_max = 16;
  Tolerances tol;
  std::vector<std::string> checks;
  std::uint64_t seed = 0;
  Sampling sampling;
};

/// Names accepted in "checks".
const std::vector<std::string>& known_checks();

/// Applies "a.b.c=value"; the value is parsed as JSON when possible and kept
/// as a string otherwise. Missing objects are created.
void apply_override(json& doc, const std::string& assignment);

BodySpec parse_body(const json& j);
HarmonicSpec parse_harmonic(const json& j);
DensitySpec parse_density(const json& j);
/// Throws ConfigurationError with the offending key on any schema violation.
ExperimentConfig parse_config(const json& doc);

json to_json(const BodySpec& body);

}  // namespace mixcf
