#pragma once

// Sufficient conditions for the mixed Christoffel problem, checked on a grid
// over sampled frames or directions. Every checker returns the smallest value
// of its test quantity together with where it was attained.
//
// Coefficient tensors and densities are passed as functions on the sphere
// because the conditions involve their derivatives between nodes.
//
// Frame sampling: frame 0 is the node frame of the grid, further frames are
// rotated by angles drawn from a stream seeded with (seed, node). Asking for
// more frames extends the same sequence, so margins can only decrease. When
// the margin lands within 1e-6 of zero the sweep is repeated once with four
// times as many frames.

#include <cstdint>
#include <span>

#include "mixcf/bodies.hpp"
#include "mixcf/mixed_algebra.hpp"
#include "mixcf/verdict.hpp"

namespace mixcf {

struct CheckOptions {
  double tol = 1e-8;
  std::uint64_t seed = 0;
  int threads = 1;
  bool resample = true;
};

/// Refuses densities that are not bounded away from zero on the grid
/// (min f < 1e-10 max f, or min f <= 0).
void require_positive_density(const ScalarFn& f, const FramedGrid& grid);

/// Rotation angle of frame k at `node`: 0 for k = 0, seeded in [0, pi) otherwise.
std::vector<double> frame_angles(std::uint64_t seed, std::size_t node, int count);

/// W[1/f] >= 0 pointwise.
ConditionVerdict check_gm(const ScalarFn& f, const GridPtr& grid, const CheckOptions& opt = {});

/// n = 2: W[a_qq / f] >= 0 for q = 1, 2 in every sampled frame.
ConditionVerdict check_cond_n2(const TensorFn& A, const ScalarFn& f, const GridPtr& grid,
                               int n_dirs = 64, const CheckOptions& opt = {});

/// The structure matrix of the constant rank condition for one (l, q), in a
/// frame of order n:
///   delta + Hess(s)/s + (1/2) grad a_qq grad a_qq^T / a_qq^2
///         - (1/2) sum_{a,b < l} inv(A)_ab grad a_qa grad a_qb^T / a_qq
/// with s = a_qq / f. grad_a[k] is the derivative of the entries of A along
/// frame vector k; q and the sum run over 0-based indices.
Matrix cond_l_matrix(int l, int q, const Matrix& a, std::span<const Matrix> grad_a, double s,
                     const Matrix& hess_s);

ConditionVerdict check_cond_l(const TensorFn& A, const ScalarFn& f, const GridPtr& grid,
                              int frames_per_node = 16, const CheckOptions& opt = {});

/// psi(t) = W(g(t))[g'(t), g'(t)] / f(g(t)) along the great circle g through
/// x with direction alpha; returns psi''(0) + psi(0) (five-point rule,
/// h = 5e-3).
double new_form_value(const TensorFn& W, const ScalarFn& f, const Vec3& x, const Vec3& alpha);

ConditionVerdict check_new_form_3d(const TensorFn& W, const ScalarFn& f, const GridPtr& grid,
                                   int n_dirs = 64, const CheckOptions& opt = {});
ConditionVerdict check_new_form_3d(const BodySpec& h_body, const ScalarFn& f,
                                   const GridPtr& grid, int n_dirs = 64,
                                   const CheckOptions& opt = {});

/// M(x) = W(x) / f(x) on the sphere; the checkers below extend it as
/// M(p) = |p| M(p/|p|).
TensorFn convexity_tensor(const TensorFn& W, const ScalarFn& f);

/// Second differences M(p+sv) + M(p-sv) - 2M(p), s in {1e-2, 1e-3}, divided by
/// s^2. p runs over the nodes, v over seeded unit vectors; n_samples pairs.
ConditionVerdict check_matrix_convexity(const TensorFn& M, const GridPtr& grid,
                                        int n_samples = 2048, const CheckOptions& opt = {});
/// Same samples, scalar test xi^T (second difference) xi for a seeded unit xi.
ConditionVerdict check_diagonal_convexity(const TensorFn& M, const GridPtr& grid,
                                          int n_samples = 2048, const CheckOptions& opt = {});

struct PerturbationVerdict {
  double c4_norm = 0.0;
  ConditionVerdict bound;     // pass iff c4_norm < C/4
  ConditionVerdict new_form;  // body C + psi, f = 1
  bool implication_holds = true;
};
PerturbationVerdict check_perturbation_bound(double C, const SphericalField& psi,
                                             const GridPtr& grid, const CheckOptions& opt = {});

}  // namespace mixcf
