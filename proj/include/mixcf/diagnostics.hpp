#pragma once

// Checks on computed solutions: ranks of W, densities recovered from the
// solved support function, first moments, symmetry of mixed volumes and the
// Minkowski integral identities.

#include <string>
#include <vector>

#include "mixcf/bodies.hpp"
#include "mixcf/verdict.hpp"

namespace mixcf {

/// 1e-6 times the largest eigenvalue of W over the grid.
double default_rank_threshold(const SymTensorField& W);

/// Eigenvalues, numeric ranks (eigenvalues > tau) and the test function
/// phi = sigma_{l+1} + sigma_{l+2} / sigma_{l+1}, l = smallest rank, set to 0
/// where sigma_{l+1} <= tau.
RankProfile rank_profile(const SymTensorField& W, double tau);

/// Node values of n D(W_1, ..., W_{n-1}, W[u]) = tr(christoffel_cofactor(W_1..) W[u]).
/// On S^2 exactly one body is expected.
SphericalField recovered_density(std::span<const BodySpec> bodies, const SphericalField& u,
                                 const GridPtr& grid);

/// Integral of x_j times the density.
Vec3 density_moments(const SphericalField& density, const GridPtr& grid);

struct PairingResult {
  double I1 = 0.0;  // integral of u' n D(W_1.., W)
  double I2 = 0.0;  // integral of u n D(W_1.., W')
  double residual = 0.0;
  double relative() const;
};
PairingResult mixed_volume_pairing(std::span<const BodySpec> bodies, const BodySpec& omega,
                                   const BodySpec& omega_prime, const GridPtr& grid);

struct MinkowskiResult {
  /// C with C * int sigma_{l+1} = int u sigma_l on the unit ball.
  double calibrated_constant = 0.0;
  double lhs = 0.0;  // C * int sigma_{l+1}(W)
  double rhs = 0.0;  // int u sigma_l(W)
  double residual = 0.0;  // |lhs - rhs| / |rhs|
};
MinkowskiResult minkowski_identity_check(const BodySpec& body, int l, const GridPtr& grid);

/// CSV with header "node,theta,phi,value".
std::string field_csv(std::span<const double> values, const FramedGrid& grid);
/// CSV with header "node,theta,phi,lambda1,lambda2".
std::string eigen_csv(const RankProfile& profile, const FramedGrid& grid);

}  // namespace mixcf
