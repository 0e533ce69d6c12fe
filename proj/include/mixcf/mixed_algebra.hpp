#pragma once

// Multilinear algebra on symmetric matrices of any (small) order n:
// normalized mixed discriminants, mixed cofactor matrices, elementary
// symmetric functions and PSD margins.
//
// Normalization: mixed_discriminant(M, ..., M) = det M, i.e. the 1/n!
// polarization. With this convention mixed_discriminant(M^(k), I^(n-k)) equals
// sigma_k(M) / binom(n, k), and the coefficient tensor of the mixed
// Christoffel equation is n times the mixed cofactor matrix
// (christoffel_cofactor), which is the identity when every body is a ball.

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "mixcf/geodesic.hpp"

namespace mixcf {

using Matrix = Eigen::MatrixXd;

/// Largest order accepted by the permutation formula (n! determinants).
inline constexpr int kMaxMixedOrder = 6;

/// (1/n!) sum over permutations s of det[column j of M_s(j)].
double mixed_discriminant(std::span<const Matrix> ms);

/// Coefficients c_ij with mixed_discriminant(M_1..M_{n-1}, M) = sum c_ij m_ij
/// for every symmetric M. Takes n-1 matrices of order n.
Matrix mixed_cofactor(std::span<const Matrix> ms);

/// n * mixed_cofactor(ms): the coefficient tensor of the mixed Christoffel
/// equation, so that tr(christoffel_cofactor(W_1..W_{n-1}) W) is the density
/// n * D(W_1, ..., W_{n-1}, W).
Matrix christoffel_cofactor(std::span<const Matrix> ms);

/// Order-2 specialisation of christoffel_cofactor: the adjugate.
inline Mat2 adjugate(const Mat2& b) {
  Mat2 a;
  a << b(1, 1), -b(0, 1), -b(1, 0), b(0, 0);
  return a;
}
/// Ambient form of the adjugate of a tangential tensor at the unit vector x:
/// tr(B) (I - x x^T) - B.
inline Mat3 tangential_adjugate(const Mat3& b, const Vec3& x) {
  return b.trace() * tangential_projector(x) - b;
}

/// All elementary symmetric functions sigma_0..sigma_n of the eigenvalues,
/// from the characteristic polynomial (Faddeev-LeVerrier).
std::vector<double> elementary_symmetric(const Matrix& m);
double sigma_k(const Matrix& m, int k);

/// Smallest eigenvalue of a symmetric matrix.
double psd_margin(const Matrix& m);
double psd_margin(const Mat2& m);
double psd_margin(const Mat3& m);

/// Throws unless m is square and symmetric within 1e-12 (relative).
void require_symmetric(const Matrix& m);

}  // namespace mixcf
