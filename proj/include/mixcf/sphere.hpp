#pragma once

// Discretization of S^2: Gauss-Legendre x equiangular grids with a tangent
// frame per node, quadrature, and real spherical-harmonic analysis/synthesis.

#include <cstddef>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "mixcf/geodesic.hpp"

namespace mixcf {

inline constexpr double kPi = std::numbers::pi;

/// Packed index of the real harmonic Y_l^m, -l <= m <= l. m < 0 selects the
/// sine branch.
constexpr int sh_index(int l, int m) { return l * l + l + m; }
constexpr int sh_count(int degree) { return (degree + 1) * (degree + 1); }

/// Orthonormal associated Legendre functions (no Condon-Shortley phase) and
/// their first two colatitude derivatives at one colatitude.
class LegendreTable {
 public:
  LegendreTable(int degree, double theta);

  int degree() const { return degree_; }
  double p(int l, int m) const { return p_[idx(l, m)]; }
  double dp(int l, int m) const { return dp_[idx(l, m)]; }
  double d2p(int l, int m) const { return d2p_[idx(l, m)]; }

 private:
  static int idx(int l, int m) { return l * (l + 1) / 2 + m; }
  int degree_;
  std::vector<double> p_, dp_, d2p_;
};

/// 1 for m = 0, sqrt(2) otherwise: the factor between P_l^m T(phi) and Y_l^m.
double branch_factor(int m);

/// Ring-local factors of Hess(Y) + Y I for the separable harmonic
/// P(theta) T(phi): W11 = alpha T, W12 = beta T', W22 = gamma T.
struct WeingartenFactors {
  double alpha, beta, gamma;
};
WeingartenFactors weingarten_factors(const LegendreTable& t, int l, int m, double cos_theta,
                                     double sin_theta);

/// Real orthonormal harmonic Y_l^m at a unit vector.
double real_harmonic(int l, int m, const Vec3& x);

/// Quadrature nodes on S^2 with weights and the frame e1 = d/dtheta,
/// e2 = d/dphi (normalized). Node index = ring * n_phi + column.
struct FramedGrid {
  int n_theta = 0;
  int n_phi = 0;
  std::vector<double> theta;
  std::vector<double> cos_theta;
  std::vector<double> sin_theta;
  /// Gauss-Legendre weight times 2*pi/n_phi, i.e. the weight of every node of the ring.
  std::vector<double> ring_weight;
  std::vector<double> phi;
  /// cos(m phi_j), sin(m phi_j) for m = 0..n_phi/2, row-major by m.
  std::vector<double> cos_table;
  std::vector<double> sin_table;

  std::vector<Vec3> nodes;
  std::vector<double> weights;
  std::vector<TangentFrame> frames;
  int exactness_degree = 0;

  std::size_t size() const { return nodes.size(); }
  std::size_t node(int ring, int column) const {
    return static_cast<std::size_t>(ring) * n_phi + column;
  }
  /// Largest degree that analysis resolves without aliasing.
  int band_limit() const { return exactness_degree / 2; }
  /// Largest degree whose nodal samples are meaningful for synthesis and
  /// collocation on this grid.
  int resolvable_degree() const { return std::min(n_theta, n_phi / 2); }
  const double* cos_row(int m) const { return cos_table.data() + static_cast<std::size_t>(m) * n_phi; }
  const double* sin_row(int m) const { return sin_table.data() + static_cast<std::size_t>(m) * n_phi; }
};

using GridPtr = std::shared_ptr<const FramedGrid>;

/// n_theta >= 4 Gauss nodes in cos(theta), n_phi >= 8 equiangular longitudes.
GridPtr build_grid(int n_theta, int n_phi);

/// Symmetric 2x2 tensor per node, in the node frame of the grid, stored as
/// three component arrays.
class SymTensorField {
 public:
  explicit SymTensorField(GridPtr grid, std::string frame_tag = "theta-phi");

  static SymTensorField sample(GridPtr grid, const TensorFn& fn);

  std::size_t size() const { return xx_.size(); }
  const FramedGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  const std::string& frame_tag() const { return frame_tag_; }

  Mat2 at(std::size_t node) const;
  void set(std::size_t node, const Mat2& m);
  Mat3 ambient(std::size_t node) const;

  const std::vector<double>& xx() const { return xx_; }
  const std::vector<double>& xy() const { return xy_; }
  const std::vector<double>& yy() const { return yy_; }
  std::vector<double>& xx() { return xx_; }
  std::vector<double>& xy() { return xy_; }
  std::vector<double>& yy() { return yy_; }

 private:
  GridPtr grid_;
  std::string frame_tag_;
  std::vector<double> xx_, xy_, yy_;
};

/// Nodal synthesis of a band-limited expansion (coeffs packed by sh_index).
std::vector<double> sh_synthesis(std::span<const double> coeffs, int degree,
                                 const FramedGrid& grid);
/// Quadrature projection onto the orthonormal real basis up to `degree`.
/// Refuses degrees above grid.band_limit().
std::vector<double> sh_analysis(std::span<const double> values, int degree,
                                const FramedGrid& grid);
/// Hess g + g I of a band-limited expansion, per node in the node frame.
SymTensorField sh_weingarten(std::span<const double> coeffs, int degree, const GridPtr& grid);

double sh_evaluate(std::span<const double> coeffs, int degree, const Vec3& x);
/// Ambient form of Hess g + g I at a unit vector (the Euclidean Hessian of the
/// 1-homogeneous extension).
Mat3 sh_weingarten_at(std::span<const double> coeffs, int degree, const Vec3& x);

/// Scalar function on S^2: real harmonic coefficients (when known) plus the
/// nodal values on one grid.
class SphericalField {
 public:
  static SphericalField from_coeffs(GridPtr grid, int degree, std::vector<double> coeffs);
  /// Nodal values only; no off-grid evaluation.
  static SphericalField from_values(GridPtr grid, std::vector<double> values);
  static SphericalField analyze(GridPtr grid, std::vector<double> values, int degree);
  static SphericalField sample(GridPtr grid, const ScalarFn& fn);
  /// sum_k a_k P_k(x3), expanded exactly in zonal harmonics.
  static SphericalField zonal_legendre(GridPtr grid, std::span<const double> legendre_coeffs);

  bool has_coeffs() const { return degree_ >= 0; }
  int degree() const { return degree_; }
  std::span<const double> coeffs() const { return coeffs_; }
  std::span<const double> values() const { return values_; }
  double value(std::size_t node) const { return values_[node]; }
  const FramedGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }

  double evaluate(const Vec3& x) const;
  Mat3 weingarten_at(const Vec3& x) const;
  SymTensorField weingarten() const;
  ScalarFn function() const;

 private:
  SphericalField(GridPtr grid, int degree, std::vector<double> coeffs, std::vector<double> values);
  GridPtr grid_;
  int degree_ = -1;
  std::vector<double> coeffs_;
  std::vector<double> values_;
};

/// sum_i w_i g(x_i)
double quadrature(std::span<const double> values, const FramedGrid& grid);
double quadrature(const SphericalField& g, const FramedGrid& grid);

/// x cos t + alpha sin t; alpha must be a unit tangent at x.
Vec3 great_circle_point(const Vec3& x, const Vec3& alpha, double t);

}  // namespace mixcf
