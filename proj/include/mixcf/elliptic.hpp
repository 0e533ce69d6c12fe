#pragma once

// The linear equation tr(A W[u]) = f on S^2 with A a positive definite
// tangential tensor field: forward operator, compatibility moments and a
// least-squares collocation solver in real spherical harmonics.

#include <optional>
#include <vector>

#include "mixcf/sphere.hpp"
#include "mixcf/verdict.hpp"

namespace mixcf {

/// Smallest eigenvalue of A over the nodes and where it is attained.
struct EllipticityMargin {
  double margin = 0.0;
  std::size_t node = 0;
};
EllipticityMargin ellipticity_margin(const SymTensorField& A);
/// Throws EllipticityError unless the margin is positive.
EllipticityMargin require_elliptic(const SymTensorField& A);

/// Node values of sum a_ab (u_ab + delta_ab u) = tr(A W[u]). u needs harmonic
/// coefficients.
SphericalField operator_apply(const SymTensorField& A, const SphericalField& u,
                              const GridPtr& grid);

struct CompatibilityResult {
  Vec3 moments = Vec3::Zero();  // integral of x_j f
  double scale = 0.0;           // integral of |f|
  bool pass = false;
};
/// pass iff every |moment| <= tol * scale.
CompatibilityResult check_compatibility(const SphericalField& f, const GridPtr& grid,
                                        double tol = 1e-8);

struct SolveOptions {
  int L_max = 16;
  double residual_tol = 1e-6;  // relative to the weighted L2 norm of f
  double compat_tol = 1e-8;
  /// Columns with weighted norm below this fraction of the largest one carry
  /// no information on the grid and are pinned to zero.
  double null_column_tol = 1e-10;
  /// Threshold of the rank-revealing QR, relative to the largest pivot.
  double rank_tol = 1e-11;
  int threads = 1;
};

struct SolveReport {
  int L_max = 0;
  /// Packed by sh_index up to L_max; the degree-1 block is exactly zero.
  std::vector<double> u_coeffs;
  double residual_l2 = 0.0;
  double f_l2 = 0.0;
  Vec3 compat_moments = Vec3::Zero();
  double ellipticity_margin = 0.0;
  std::size_t ellipticity_node = 0;
  double w_min_eig = 0.0;
  std::size_t unknowns = 0;
  /// Packed indices of basis functions that vanish on the grid.
  std::vector<int> null_columns;
  std::vector<ConditionVerdict> condition_verdicts;
  std::optional<RankProfile> rank_profile;

  SphericalField solution(const GridPtr& grid) const;
};

/// Degrees {0} and [2, L_max]. Requires L_max <= grid->resolvable_degree().
SolveReport solve(const SymTensorField& A, const SphericalField& f, const GridPtr& grid,
                  const SolveOptions& options);

/// Threads from MIXCF_THREADS (default 1).
int default_threads();

}  // namespace mixcf
