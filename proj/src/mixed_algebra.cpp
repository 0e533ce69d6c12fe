#include "mixcf/mixed_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mixcf/error.hpp"

namespace mixcf {

void require_symmetric(const Matrix& m) {
  if (m.rows() != m.cols())
    throw DimensionError("expected a square matrix, got " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()));
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw DomainError("matrix is not symmetric");
}

namespace {

int common_order(std::span<const Matrix> ms) {
  if (ms.empty()) throw DimensionError("no matrices supplied");
  const auto n = ms.front().rows();
  for (const auto& m : ms) {
    if (m.rows() != n || m.cols() != n)
      throw DimensionError("all matrices must have the same order " + std::to_string(n));
    require_symmetric(m);
  }
  if (n > kMaxMixedOrder)
    throw DimensionError("mixed discriminants are limited to order " +
                         std::to_string(kMaxMixedOrder) + " (got " + std::to_string(n) + ")");
  return static_cast<int>(n);
}

}  // namespace

double mixed_discriminant(std::span<const Matrix> ms) {
  const int n = common_order(ms);
  if (static_cast<int>(ms.size()) != n)
    throw DimensionError("mixed discriminant of order " + std::to_string(n) + " needs " +
                         std::to_string(n) + " matrices, got " + std::to_string(ms.size()));
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Matrix cols(n, n);
  double sum = 0.0;
  double count = 0.0;
  do {
    for (int j = 0; j < n; ++j) cols.col(j) = ms[perm[j]].col(j);
    sum += cols.determinant();
    count += 1.0;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return sum / count;
}

Matrix mixed_cofactor(std::span<const Matrix> ms) {
  const int n = common_order(ms);
  if (static_cast<int>(ms.size()) != n - 1)
    throw DimensionError("mixed cofactor of order " + std::to_string(n) + " needs " +
                         std::to_string(n - 1) + " matrices, got " + std::to_string(ms.size()));
  std::vector<Matrix> args(ms.begin(), ms.end());
  args.emplace_back(Matrix::Zero(n, n));
  Matrix c(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      Matrix& basis = args.back();
      basis.setZero();
      if (i == j) {
        basis(i, i) = 1.0;
        c(i, i) = mixed_discriminant(args);
      } else {
        // Symmetrized basis element: D(.., S_ij) = (c_ij + c_ji) / 2 = c_ij.
        basis(i, j) = basis(j, i) = 0.5;
        c(i, j) = c(j, i) = mixed_discriminant(args);
      }
    }
  return c;
}

Matrix christoffel_cofactor(std::span<const Matrix> ms) {
  const double n = static_cast<double>(ms.size() + 1);
  return n * mixed_cofactor(ms);
}

std::vector<double> elementary_symmetric(const Matrix& m) {
  require_symmetric(m);
  const int n = static_cast<int>(m.rows());
  // det(t I - M) = sum_i c[i] t^i, c[n] = 1.
  std::vector<double> c(n + 1, 0.0);
  c[n] = 1.0;
  Matrix mk = Matrix::Zero(n, n);
  for (int k = 1; k <= n; ++k) {
    mk = m * mk + c[n - k + 1] * Matrix::Identity(n, n);
    c[n - k] = -(m * mk).trace() / k;
  }
  std::vector<double> sigma(n + 1);
  for (int k = 0; k <= n; ++k) sigma[k] = (k % 2 == 0 ? 1.0 : -1.0) * c[n - k];
  return sigma;
}

double sigma_k(const Matrix& m, int k) {
  if (k < 0 || k > m.rows())
    throw DomainError("sigma_k needs 0 <= k <= n (k = " + std::to_string(k) +
                      ", n = " + std::to_string(m.rows()) + ")");
  return elementary_symmetric(m)[k];
}

double psd_margin(const Matrix& m) {
  require_symmetric(m);
  if (m.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double psd_margin(const Mat2& m) { return min_eigenvalue(m); }

double psd_margin(const Mat3& m) {
  Eigen::SelfAdjointEigenSolver<Mat3> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace mixcf
