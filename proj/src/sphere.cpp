#include "mixcf/sphere.hpp"

#include <cmath>
#include <string>

#include "mixcf/error.hpp"
#include "mixcf/kernels.hpp"

namespace mixcf {

LegendreTable::LegendreTable(int degree, double theta) : degree_(degree) {
  const std::size_t n = static_cast<std::size_t>((degree + 1) * (degree + 2) / 2);
  p_.assign(n, 0.0);
  dp_.assign(n, 0.0);
  d2p_.assign(n, 0.0);
  const double x = std::cos(theta);
  const double s = std::sin(theta);

  double pmm = std::sqrt(1.0 / (4.0 * kPi));
  for (int m = 0; m <= degree; ++m) {
    if (m > 0) pmm *= std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s;
    p_[idx(m, m)] = pmm;
    if (m + 1 <= degree) p_[idx(m + 1, m)] = std::sqrt(2.0 * m + 3.0) * x * pmm;
    for (int l = m + 2; l <= degree; ++l) {
      const double a = std::sqrt((4.0 * l * l - 1.0) / (double(l) * l - double(m) * m));
      const double b = std::sqrt((double(l - 1) * (l - 1) - double(m) * m) /
                                 (4.0 * double(l - 1) * (l - 1) - 1.0));
      p_[idx(l, m)] = a * (x * p_[idx(l - 1, m)] - b * p_[idx(l - 2, m)]);
    }
  }

  // d/dtheta through neighbouring orders; free of the 1/sin(theta)
  // cancellation of the three-term formula near the poles.
  auto derive = [&](const std::vector<double>& f, std::vector<double>& out) {
    for (int l = 1; l <= degree; ++l) {
      out[idx(l, 0)] = -std::sqrt(double(l) * (l + 1)) * f[idx(l, 1)];
      for (int m = 1; m <= l; ++m) {
        double v = std::sqrt(double(l + m) * (l - m + 1)) * f[idx(l, m - 1)];
        if (m < l) v -= std::sqrt(double(l + m + 1) * (l - m)) * f[idx(l, m + 1)];
        out[idx(l, m)] = 0.5 * v;
      }
    }
  };
  derive(p_, dp_);
  derive(dp_, d2p_);
}

double real_harmonic(int l, int m, const Vec3& x) {
  const double theta = std::atan2(std::hypot(x.x(), x.y()), x.z());
  const double phi = std::atan2(x.y(), x.x());
  const int am = std::abs(m);
  LegendreTable table(l, theta);
  const double p = table.p(l, am);
  if (m == 0) return p;
  return std::sqrt(2.0) * p * (m > 0 ? std::cos(am * phi) : std::sin(am * phi));
}

namespace {

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // Final derivative at the converged root.
    double p0 = 1.0;
    double p1 = z;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (z * p1 - p0) / (z * z - 1.0);
    x[i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

}  // namespace

double branch_factor(int m) { return m == 0 ? 1.0 : std::sqrt(2.0); }

GridPtr build_grid(int n_theta, int n_phi) {
  if (n_theta < 4 || n_phi < 8)
    throw ConfigurationError("grid needs n_theta >= 4 and n_phi >= 8 (got " +
                             std::to_string(n_theta) + " x " + std::to_string(n_phi) + ")");
  auto g = std::make_shared<FramedGrid>();
  g->n_theta = n_theta;
  g->n_phi = n_phi;
  g->exactness_degree = std::min(2 * n_theta - 1, n_phi - 1);

  std::vector<double> x, w;
  gauss_legendre(n_theta, x, w);
  const double dphi = 2.0 * kPi / n_phi;
  for (int i = 0; i < n_theta; ++i) {
    g->cos_theta.push_back(x[i]);
    g->sin_theta.push_back(std::sqrt((1.0 - x[i]) * (1.0 + x[i])));
    g->theta.push_back(std::acos(x[i]));
    g->ring_weight.push_back(w[i] * dphi);
  }
  for (int j = 0; j < n_phi; ++j) g->phi.push_back(j * dphi);

  const int mmax = n_phi / 2;
  g->cos_table.resize(static_cast<std::size_t>(mmax + 1) * n_phi);
  g->sin_table.resize(g->cos_table.size());
  for (int m = 0; m <= mmax; ++m)
    for (int j = 0; j < n_phi; ++j) {
      // Reduce the angle exactly in integer arithmetic before the trig call.
      const double a = 2.0 * kPi * double((static_cast<long>(m) * j) % n_phi) / n_phi;
      g->cos_table[static_cast<std::size_t>(m) * n_phi + j] = std::cos(a);
      g->sin_table[static_cast<std::size_t>(m) * n_phi + j] = std::sin(a);
    }

  g->nodes.reserve(static_cast<std::size_t>(n_theta) * n_phi);
  for (int i = 0; i < n_theta; ++i) {
    const double ct = g->cos_theta[i];
    const double st = g->sin_theta[i];
    for (int j = 0; j < n_phi; ++j) {
      const double cp = g->cos_row(1)[j];
      const double sp = g->sin_row(1)[j];
      g->nodes.emplace_back(st * cp, st * sp, ct);
      g->weights.push_back(g->ring_weight[i]);
      g->frames.push_back({Vec3(ct * cp, ct * sp, -st), Vec3(-sp, cp, 0.0)});
    }
  }
  return g;
}

// ---------------------------------------------------------------------------

SymTensorField::SymTensorField(GridPtr grid, std::string frame_tag)
    : grid_(std::move(grid)),
      frame_tag_(std::move(frame_tag)),
      xx_(grid_->size(), 0.0),
      xy_(grid_->size(), 0.0),
      yy_(grid_->size(), 0.0) {}

SymTensorField SymTensorField::sample(GridPtr grid, const TensorFn& fn) {
  SymTensorField out(grid);
  for (std::size_t k = 0; k < grid->size(); ++k)
    out.set(k, to_frame(fn(grid->nodes[k]), grid->frames[k]));
  return out;
}

Mat2 SymTensorField::at(std::size_t node) const {
  Mat2 m;
  m << xx_[node], xy_[node], xy_[node], yy_[node];
  return m;
}

void SymTensorField::set(std::size_t node, const Mat2& m) {
  xx_[node] = m(0, 0);
  xy_[node] = 0.5 * (m(0, 1) + m(1, 0));
  yy_[node] = m(1, 1);
}

Mat3 SymTensorField::ambient(std::size_t node) const {
  return from_frame(at(node), grid_->frames[node]);
}

// ---------------------------------------------------------------------------

namespace {

void check_coeffs(std::span<const double> coeffs, int degree) {
  if (degree < 0 || coeffs.size() != static_cast<std::size_t>(sh_count(degree)))
    throw DimensionError("coefficient vector of size " + std::to_string(coeffs.size()) +
                         " does not match degree " + std::to_string(degree));
}

void check_resolvable(int degree, const FramedGrid& grid) {
  if (degree > grid.resolvable_degree())
    throw AliasingError("degree " + std::to_string(degree) + " exceeds what a " +
                        std::to_string(grid.n_theta) + "x" + std::to_string(grid.n_phi) +
                        " grid resolves (" + std::to_string(grid.resolvable_degree()) + ")");
}

}  // namespace

std::vector<double> sh_synthesis(std::span<const double> coeffs, int degree,
                                 const FramedGrid& grid) {
  check_coeffs(coeffs, degree);
  check_resolvable(degree, grid);
  const auto& k = kernels::active();
  const std::size_t nphi = grid.n_phi;
  std::vector<double> values(grid.size(), 0.0);
  for (int i = 0; i < grid.n_theta; ++i) {
    LegendreTable table(degree, grid.theta[i]);
    double* ring = values.data() + i * nphi;
    for (int m = 0; m <= degree; ++m) {
      double a = 0.0;
      double b = 0.0;
      for (int l = m; l <= degree; ++l) {
        a += coeffs[sh_index(l, m)] * table.p(l, m);
        if (m > 0) b += coeffs[sh_index(l, -m)] * table.p(l, m);
      }
      const double f = branch_factor(m);
      k.axpy(f * a, grid.cos_row(m), ring, nphi);
      if (m > 0) k.axpy(f * b, grid.sin_row(m), ring, nphi);
    }
  }
  return values;
}

std::vector<double> sh_analysis(std::span<const double> values, int degree,
                                const FramedGrid& grid) {
  if (values.size() != grid.size())
    throw DimensionError("analysis expects " + std::to_string(grid.size()) + " nodal values, got " +
                         std::to_string(values.size()));
  if (degree < 0 || degree > grid.band_limit())
    throw AliasingError("analysis degree " + std::to_string(degree) +
                        " exceeds the grid band limit " + std::to_string(grid.band_limit()));
  const auto& k = kernels::active();
  const std::size_t nphi = grid.n_phi;
  std::vector<double> coeffs(sh_count(degree), 0.0);
  std::vector<double> fc(degree + 1), fs(degree + 1);
  for (int i = 0; i < grid.n_theta; ++i) {
    const double* ring = values.data() + i * nphi;
    for (int m = 0; m <= degree; ++m) {
      fc[m] = k.dot(ring, grid.cos_row(m), nphi);
      fs[m] = m > 0 ? k.dot(ring, grid.sin_row(m), nphi) : 0.0;
    }
    LegendreTable table(degree, grid.theta[i]);
    const double w = grid.ring_weight[i];
    for (int l = 0; l <= degree; ++l)
      for (int m = 0; m <= l; ++m) {
        const double pw = w * table.p(l, m) * branch_factor(m);
        coeffs[sh_index(l, m)] += pw * fc[m];
        if (m > 0) coeffs[sh_index(l, -m)] += pw * fs[m];
      }
  }
  return coeffs;
}

WeingartenFactors weingarten_factors(const LegendreTable& t, int l, int m, double ct, double st) {
  const double p = t.p(l, m);
  const double dp = t.dp(l, m);
  const double cot = ct / st;
  return {t.d2p(l, m) + p, (dp - cot * p) / st, -double(m) * m * p / (st * st) + cot * dp + p};
}

SymTensorField sh_weingarten(std::span<const double> coeffs, int degree, const GridPtr& grid) {
  check_coeffs(coeffs, degree);
  check_resolvable(degree, *grid);
  const auto& k = kernels::active();
  const std::size_t nphi = grid->n_phi;
  SymTensorField out(grid);
  for (int i = 0; i < grid->n_theta; ++i) {
    LegendreTable table(degree, grid->theta[i]);
    double* w11 = out.xx().data() + i * nphi;
    double* w12 = out.xy().data() + i * nphi;
    double* w22 = out.yy().data() + i * nphi;
    for (int m = 0; m <= degree; ++m) {
      double c11 = 0, c12 = 0, c22 = 0, s11 = 0, s12 = 0, s22 = 0;
      for (int l = m; l <= degree; ++l) {
        const auto f = weingarten_factors(table, l, m, grid->cos_theta[i], grid->sin_theta[i]);
        const double cc = coeffs[sh_index(l, m)];
        c11 += cc * f.alpha;
        c12 += cc * f.beta;
        c22 += cc * f.gamma;
        if (m > 0) {
          const double cs = coeffs[sh_index(l, -m)];
          s11 += cs * f.alpha;
          s12 += cs * f.beta;
          s22 += cs * f.gamma;
        }
      }
      const double fm = branch_factor(m);
      k.axpy(fm * c11, grid->cos_row(m), w11, nphi);
      k.axpy(fm * c22, grid->cos_row(m), w22, nphi);
      if (m > 0) {
        k.axpy(fm * s11, grid->sin_row(m), w11, nphi);
        k.axpy(fm * s22, grid->sin_row(m), w22, nphi);
        // T' of the cosine branch is -m sin, of the sine branch m cos.
        k.axpy(-fm * m * c12, grid->sin_row(m), w12, nphi);
        k.axpy(fm * m * s12, grid->cos_row(m), w12, nphi);
      }
    }
  }
  return out;
}

double sh_evaluate(std::span<const double> coeffs, int degree, const Vec3& x) {
  check_coeffs(coeffs, degree);
  const double theta = std::atan2(std::hypot(x.x(), x.y()), x.z());
  const double phi = std::atan2(x.y(), x.x());
  LegendreTable table(degree, theta);
  double v = 0.0;
  for (int m = 0; m <= degree; ++m) {
    double a = 0.0;
    double b = 0.0;
    for (int l = m; l <= degree; ++l) {
      a += coeffs[sh_index(l, m)] * table.p(l, m);
      if (m > 0) b += coeffs[sh_index(l, -m)] * table.p(l, m);
    }
    v += branch_factor(m) * (a * std::cos(m * phi) + b * std::sin(m * phi));
  }
  return v;
}

namespace {

Mat3 weingarten_away_from_pole(std::span<const double> coeffs, int degree, double theta,
                               double phi) {
  LegendreTable table(degree, theta);
  const double ct = std::cos(theta);
  const double st = std::sin(theta);
  double w11 = 0, w12 = 0, w22 = 0;
  for (int m = 0; m <= degree; ++m) {
    const double cm = std::cos(m * phi);
    const double sm = std::sin(m * phi);
    const double fm = branch_factor(m);
    for (int l = m; l <= degree; ++l) {
      const auto f = weingarten_factors(table, l, m, ct, st);
      const double cc = coeffs[sh_index(l, m)];
      w11 += fm * cc * f.alpha * cm;
      w22 += fm * cc * f.gamma * cm;
      w12 -= fm * m * cc * f.beta * sm;
      if (m > 0) {
        const double cs = coeffs[sh_index(l, -m)];
        w11 += fm * cs * f.alpha * sm;
        w22 += fm * cs * f.gamma * sm;
        w12 += fm * m * cs * f.beta * cm;
      }
    }
  }
  const double cp = std::cos(phi);
  const double sp = std::sin(phi);
  const TangentFrame frame{Vec3(ct * cp, ct * sp, -st), Vec3(-sp, cp, 0.0)};
  Mat2 w;
  w << w11, w12, w12, w22;
  return from_frame(w, frame);
}

}  // namespace

Mat3 sh_weingarten_at(std::span<const double> coeffs, int degree, const Vec3& x) {
  check_coeffs(coeffs, degree);
  const double rho = std::hypot(x.x(), x.y());
  constexpr double kPoleBand = 1e-6;
  if (rho >= kPoleBand) {
    return weingarten_away_from_pole(coeffs, degree, std::atan2(rho, x.z()),
                                     std::atan2(x.y(), x.x()));
  }
  // The coordinate frame degenerates at the poles. The ambient tensor is
  // smooth, so average four symmetric neighbours (error O(delta^2)).
  constexpr double delta = 4e-6;
  Mat3 acc = Mat3::Zero();
  const Vec3 offsets[4] = {Vec3(delta, 0, 0), Vec3(-delta, 0, 0), Vec3(0, delta, 0),
                           Vec3(0, -delta, 0)};
  for (const auto& o : offsets) {
    const Vec3 y = (x + o).normalized();
    acc += weingarten_away_from_pole(coeffs, degree, std::atan2(std::hypot(y.x(), y.y()), y.z()),
                                     std::atan2(y.y(), y.x()));
  }
  const Mat3 avg = 0.25 * acc;
  const Mat3 p = tangential_projector(x);
  return p * avg * p;
}

// ---------------------------------------------------------------------------

SphericalField::SphericalField(GridPtr grid, int degree, std::vector<double> coeffs,
                               std::vector<double> values)
    : grid_(std::move(grid)),
      degree_(degree),
      coeffs_(std::move(coeffs)),
      values_(std::move(values)) {}

SphericalField SphericalField::from_coeffs(GridPtr grid, int degree, std::vector<double> coeffs) {
  check_coeffs(coeffs, degree);
  auto values = sh_synthesis(coeffs, degree, *grid);
  return SphericalField(std::move(grid), degree, std::move(coeffs), std::move(values));
}

SphericalField SphericalField::from_values(GridPtr grid, std::vector<double> values) {
  if (values.size() != grid->size())
    throw DimensionError("field has " + std::to_string(values.size()) + " values for a grid of " +
                         std::to_string(grid->size()) + " nodes");
  return SphericalField(std::move(grid), -1, {}, std::move(values));
}

SphericalField SphericalField::analyze(GridPtr grid, std::vector<double> values, int degree) {
  auto coeffs = sh_analysis(values, degree, *grid);
  return from_coeffs(std::move(grid), degree, std::move(coeffs));
}

SphericalField SphericalField::sample(GridPtr grid, const ScalarFn& fn) {
  std::vector<double> values(grid->size());
  for (std::size_t k = 0; k < grid->size(); ++k) values[k] = fn(grid->nodes[k]);
  return from_values(std::move(grid), std::move(values));
}

SphericalField SphericalField::zonal_legendre(GridPtr grid, std::span<const double> a) {
  const int degree = a.empty() ? 0 : static_cast<int>(a.size()) - 1;
  std::vector<double> coeffs(sh_count(degree), 0.0);
  for (int l = 0; l <= degree; ++l)
    coeffs[sh_index(l, 0)] = a[l] * std::sqrt(4.0 * kPi / (2.0 * l + 1.0));
  return from_coeffs(std::move(grid), degree, std::move(coeffs));
}

double SphericalField::evaluate(const Vec3& x) const {
  if (!has_coeffs()) throw DomainError("field has nodal values only; cannot evaluate off-grid");
  return sh_evaluate(coeffs_, degree_, x);
}

Mat3 SphericalField::weingarten_at(const Vec3& x) const {
  if (!has_coeffs()) throw DomainError("field has nodal values only; no derivatives available");
  return sh_weingarten_at(coeffs_, degree_, x);
}

SymTensorField SphericalField::weingarten() const {
  if (!has_coeffs()) throw DomainError("field has nodal values only; no derivatives available");
  return sh_weingarten(coeffs_, degree_, grid_);
}

ScalarFn SphericalField::function() const {
  if (!has_coeffs()) throw DomainError("field has nodal values only; cannot evaluate off-grid");
  return [coeffs = coeffs_, degree = degree_](const Vec3& x) {
    return sh_evaluate(coeffs, degree, x);
  };
}

double quadrature(std::span<const double> values, const FramedGrid& grid) {
  if (values.size() != grid.size())
    throw DimensionError("quadrature expects " + std::to_string(grid.size()) + " values, got " +
                         std::to_string(values.size()));
  return kernels::active().dot(values.data(), grid.weights.data(), values.size());
}

double quadrature(const SphericalField& g, const FramedGrid& grid) {
  if (g.grid().n_theta != grid.n_theta || g.grid().n_phi != grid.n_phi)
    throw DimensionError("field sampled on a different grid");
  return quadrature(g.values(), grid);
}

Vec3 great_circle_point(const Vec3& x, const Vec3& alpha, double t) {
  if (std::abs(x.dot(alpha)) > 1e-12 || std::abs(alpha.norm() - 1.0) > 1e-12 ||
      std::abs(x.norm() - 1.0) > 1e-12)
    throw GeometryError("great circle needs a unit point and a unit tangent direction");
  return geodesic_point(x, alpha, t);
}

}  // namespace mixcf
