#include "mixcf/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "mixcf/error.hpp"
#include "mixcf/mixed_algebra.hpp"

namespace mixcf {

namespace {

std::array<double, 2> eigenvalues(const Mat2& m) {
  const double mean = 0.5 * (m(0, 0) + m(1, 1));
  const double rad = std::hypot(0.5 * (m(0, 0) - m(1, 1)), m(0, 1));
  return {mean - rad, mean + rad};
}

std::vector<Mat2> cofactors(std::span<const BodySpec> bodies, const GridPtr& grid) {
  if (bodies.size() != 1)
    throw DimensionError("on S^2 the mixed equation takes exactly one body, got " +
                         std::to_string(bodies.size()));
  const SymTensorField w = weingarten_form(bodies[0], grid);
  std::vector<Mat2> out(grid->size());
  for (std::size_t k = 0; k < grid->size(); ++k) {
    const Matrix wk = w.at(k);
    out[k] = christoffel_cofactor(std::span<const Matrix>(&wk, 1));
  }
  return out;
}

double density_integral(const std::vector<Mat2>& cof, const SymTensorField& w,
                        std::span<const double> weight_fn, const FramedGrid& grid) {
  double s = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k)
    s += grid.weights[k] * weight_fn[k] * (cof[k].cwiseProduct(w.at(k))).sum();
  return s;
}

std::vector<double> support_values(const BodySpec& body, const FramedGrid& grid) {
  std::vector<double> v(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) v[k] = support(body, grid.nodes[k]);
  return v;
}

}  // namespace

double default_rank_threshold(const SymTensorField& W) {
  double hi = 0.0;
  for (std::size_t k = 0; k < W.size(); ++k) hi = std::max(hi, eigenvalues(W.at(k))[1]);
  return 1e-6 * hi;
}

RankProfile rank_profile(const SymTensorField& W, double tau) {
  if (!(tau > 0.0)) throw DomainError("rank threshold must be positive");
  RankProfile p;
  p.tau = tau;
  p.eigenvalues.resize(W.size());
  p.ranks.resize(W.size());
  p.min_eig = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < W.size(); ++k) {
    const auto e = eigenvalues(W.at(k));
    p.eigenvalues[k] = e;
    if (e[0] < p.min_eig) {
      p.min_eig = e[0];
      p.min_node = k;
    }
    p.ranks[k] = (e[0] > tau) + (e[1] > tau);
    ++p.histogram[p.ranks[k]];
  }
  p.l = W.size() == 0 ? 0 : *std::min_element(p.ranks.begin(), p.ranks.end());
  p.phi_applicable = p.l < 2;
  p.phi_values.assign(W.size(), 0.0);
  if (!p.phi_applicable) return p;
  for (std::size_t k = 0; k < W.size(); ++k) {
    const auto& e = p.eigenvalues[k];
    const double sigma[4] = {1.0, e[0] + e[1], e[0] * e[1], 0.0};
    const double lead = sigma[p.l + 1];
    p.phi_values[k] = lead <= tau ? 0.0 : lead + sigma[p.l + 2] / lead;
  }
  return p;
}

SphericalField recovered_density(std::span<const BodySpec> bodies, const SphericalField& u,
                                 const GridPtr& grid) {
  if (!u.has_coeffs()) throw DomainError("u needs harmonic coefficients");
  const auto cof = cofactors(bodies, grid);
  const SymTensorField w = sh_weingarten(u.coeffs(), u.degree(), grid);
  std::vector<double> out(grid->size());
  for (std::size_t k = 0; k < grid->size(); ++k) out[k] = cof[k].cwiseProduct(w.at(k)).sum();
  return SphericalField::from_values(grid, std::move(out));
}

Vec3 density_moments(const SphericalField& density, const GridPtr& grid) {
  const auto v = density.values();
  if (v.size() != grid->size()) throw DimensionError("density lives on a different grid");
  Vec3 m = Vec3::Zero();
  for (std::size_t k = 0; k < grid->size(); ++k) m += grid->weights[k] * v[k] * grid->nodes[k];
  return m;
}

double PairingResult::relative() const {
  const double scale = std::max(std::abs(I1), std::abs(I2));
  return scale > 0.0 ? residual / scale : residual;
}

PairingResult mixed_volume_pairing(std::span<const BodySpec> bodies, const BodySpec& omega,
                                   const BodySpec& omega_prime, const GridPtr& grid) {
  const auto cof = cofactors(bodies, grid);
  PairingResult r;
  r.I1 = density_integral(cof, weingarten_form(omega, grid), support_values(omega_prime, *grid),
                          *grid);
  r.I2 = density_integral(cof, weingarten_form(omega_prime, grid), support_values(omega, *grid),
                          *grid);
  r.residual = std::abs(r.I1 - r.I2);
  return r;
}

namespace {

// (int sigma_{l+1}(W), int u sigma_l(W)) for a body on the grid.
std::pair<double, double> minkowski_integrals(const BodySpec& body, int l, const GridPtr& grid) {
  const SymTensorField w = weingarten_form(body, grid);
  double a = 0.0, b = 0.0;
  for (std::size_t k = 0; k < grid->size(); ++k) {
    const auto sig = elementary_symmetric(Matrix(w.at(k)));
    a += grid->weights[k] * sig[l + 1];
    b += grid->weights[k] * support(body, grid->nodes[k]) * sig[l];
  }
  return {a, b};
}

}  // namespace

MinkowskiResult minkowski_identity_check(const BodySpec& body, int l, const GridPtr& grid) {
  if (l < 0 || l > 1) throw DomainError("on S^2 the Minkowski identity needs 0 <= l <= 1");
  MinkowskiResult r;
  const auto [ball_a, ball_b] = minkowski_integrals(Ball{1.0}, l, grid);
  r.calibrated_constant = ball_b / ball_a;
  const auto [a, b] = minkowski_integrals(body, l, grid);
  r.lhs = r.calibrated_constant * a;
  r.rhs = b;
  r.residual = std::abs(r.lhs - r.rhs) / std::abs(r.rhs);
  return r;
}

namespace {

void append_prefix(std::string& out, std::size_t node, const FramedGrid& grid) {
  const int ring = static_cast<int>(node / grid.n_phi);
  const int col = static_cast<int>(node % grid.n_phi);
  char buf[96];
  std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g", node, grid.theta[ring], grid.phi[col]);
  out += buf;
}

}  // namespace

std::string field_csv(std::span<const double> values, const FramedGrid& grid) {
  if (values.size() != grid.size()) throw DimensionError("values do not match the grid");
  std::string out = "node,theta,phi,value\n";
  char buf[40];
  for (std::size_t k = 0; k < values.size(); ++k) {
    append_prefix(out, k, grid);
    std::snprintf(buf, sizeof buf, ",%.17g\n", values[k]);
    out += buf;
  }
  return out;
}

std::string eigen_csv(const RankProfile& profile, const FramedGrid& grid) {
  if (profile.eigenvalues.size() != grid.size())
    throw DimensionError("profile does not match the grid");
  std::string out = "node,theta,phi,lambda1,lambda2\n";
  char buf[64];
  for (std::size_t k = 0; k < grid.size(); ++k) {
    append_prefix(out, k, grid);
    std::snprintf(buf, sizeof buf, ",%.17g,%.17g\n", profile.eigenvalues[k][0],
                  profile.eigenvalues[k][1]);
    out += buf;
  }
  return out;
}

}  // namespace mixcf
