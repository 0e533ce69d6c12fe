#include <doctest.h>

#include <cmath>
#include <random>

#include "mixcf/error.hpp"
#include "mixcf/sphere.hpp"
#include "support.hpp"

using namespace mixcf;

TEST_CASE("Legendre table matches std::sph_legendre") {
  for (double theta : {0.01, 0.4, 1.1, kPi / 2, 2.3, 3.1}) {
    LegendreTable t(24, theta);
    for (int l = 0; l <= 24; ++l)
      for (int m = 0; m <= l; ++m) {
        const double ref = (m % 2 ? -1.0 : 1.0) * std::sph_legendre(l, m, theta);
        CHECK(t.p(l, m) == doctest::Approx(ref).epsilon(1e-12).scale(1.0));
      }
  }
}

TEST_CASE("Legendre derivatives against central differences of the oracle") {
  const double h = 1e-4;
  for (double theta : {0.3, 1.0, 2.0}) {
    LegendreTable t(12, theta);
    for (int l = 0; l <= 12; ++l)
      for (int m = 0; m <= l; ++m) {
        auto p = [&](double th) { return (m % 2 ? -1.0 : 1.0) * std::sph_legendre(l, m, th); };
        const double d1 = (p(theta + h) - p(theta - h)) / (2 * h);
        const double d2 = (p(theta + h) - 2 * p(theta) + p(theta - h)) / (h * h);
        CHECK(std::abs(t.dp(l, m) - d1) < 1e-6 * (1 + l * l));
        CHECK(std::abs(t.d2p(l, m) - d2) < 1e-4 * (1 + l * l));
      }
  }
}

TEST_CASE("grid weights, frames and quadrature exactness") {
  auto grid = build_grid(12, 24);
  CHECK(grid->size() == 288u);
  CHECK(grid->exactness_degree == 23);
  CHECK(grid->band_limit() == 11);
  CHECK(grid->resolvable_degree() == 12);
  std::vector<double> one(grid->size(), 1.0);
  CHECK(quadrature(one, *grid) == doctest::Approx(4 * kPi).epsilon(1e-14));
  for (std::size_t k = 0; k < grid->size(); ++k) {
    const auto& x = grid->nodes[k];
    const auto& f = grid->frames[k];
    CHECK(std::abs(x.norm() - 1) < 1e-15);
    CHECK(std::abs(f.e1.dot(x)) < 1e-15);
    CHECK(std::abs(f.e2.dot(x)) < 1e-15);
    CHECK(std::abs(f.e1.dot(f.e2)) < 1e-15);
    CHECK(f.e1.cross(f.e2).dot(x) == doctest::Approx(1.0));
  }
  // integral of x3^k = 4 pi / (k + 1) for even k
  for (int k = 0; k <= 22; k += 2) {
    std::vector<double> v(grid->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::pow(grid->nodes[i].z(), k);
    CHECK(quadrature(v, *grid) == doctest::Approx(4 * kPi / (k + 1)).epsilon(1e-13));
  }
  CHECK_THROWS_AS(build_grid(3, 24), ConfigurationError);
  CHECK_THROWS_AS(build_grid(8, 6), ConfigurationError);
}

TEST_CASE("real harmonics are orthonormal under the grid quadrature") {
  auto grid = build_grid(16, 32);
  const int L = grid->band_limit();
  std::vector<std::vector<double>> y;
  for (int l = 0; l <= L; ++l)
    for (int m = -l; m <= l; ++m) {
      std::vector<double> v(grid->size());
      for (std::size_t i = 0; i < v.size(); ++i) v[i] = real_harmonic(l, m, grid->nodes[i]);
      y.push_back(v);
    }
  double worst = 0.0;
  for (std::size_t a = 0; a < y.size(); ++a)
    for (std::size_t b = 0; b <= a; ++b) {
      std::vector<double> p(grid->size());
      for (std::size_t i = 0; i < p.size(); ++i) p[i] = y[a][i] * y[b][i];
      worst = std::max(worst, std::abs(quadrature(p, *grid) - (a == b ? 1.0 : 0.0)));
    }
  CHECK(worst < 1e-12);
}

TEST_CASE("real harmonic conventions") {
  const Vec3 x = Vec3(0.3, -0.5, 0.7).normalized();
  const double theta = std::acos(x.z()), phi = std::atan2(x.y(), x.x());
  CHECK(real_harmonic(0, 0, x) == doctest::Approx(1 / std::sqrt(4 * kPi)));
  CHECK(real_harmonic(1, 0, x) == doctest::Approx(std::sqrt(3 / (4 * kPi)) * x.z()));
  CHECK(real_harmonic(1, 1, x) == doctest::Approx(std::sqrt(3 / (4 * kPi)) * x.x()));
  CHECK(real_harmonic(1, -1, x) == doctest::Approx(std::sqrt(3 / (4 * kPi)) * x.y()));
  CHECK(real_harmonic(3, -2, x) ==
        doctest::Approx(std::sqrt(2.0) * std::sph_legendre(3, 2, theta) * std::sin(2 * phi)));
}

TEST_CASE("synthesis and analysis invert each other up to the band limit") {
  auto grid = build_grid(18, 36);
  std::mt19937_64 g(5);
  const int L = grid->band_limit();
  auto c = testing::random_vector(g, sh_count(L));
  auto values = sh_synthesis(c, L, *grid);
  auto back = sh_analysis(values, L, *grid);
  for (std::size_t i = 0; i < c.size(); ++i) CHECK(std::abs(back[i] - c[i]) < 1e-12);
  for (int k = 0; k < 20; ++k) {
    const std::size_t node = g() % grid->size();
    CHECK(values[node] == doctest::Approx(sh_evaluate(c, L, grid->nodes[node])).epsilon(1e-12));
  }
  CHECK_THROWS_AS(sh_analysis(values, L + 1, *grid), AliasingError);
  CHECK_THROWS_AS(sh_synthesis(testing::random_vector(g, sh_count(19)), 19, *grid), AliasingError);
  CHECK_THROWS_AS(sh_synthesis(c, L + 1, *grid), DimensionError);
  std::vector<double> short_values(10);
  CHECK_THROWS_AS(sh_analysis(short_values, 2, *grid), DimensionError);
}

TEST_CASE("Weingarten form of harmonics: trace identity and an independent route") {
  auto grid = build_grid(16, 32);
  for (int l = 0; l <= 10; ++l)
    for (int m = -l; m <= l; ++m) {
      std::vector<double> c(sh_count(l), 0.0);
      c[sh_index(l, m)] = 1.0;
      auto w = sh_weingarten(c, l, grid);
      for (std::size_t k = 0; k < grid->size(); k += 7) {
        const double y = real_harmonic(l, m, grid->nodes[k]);
        CHECK(std::abs(w.at(k).trace() - (2.0 - l * (l + 1)) * y) < 1e-10);
      }
    }
  std::mt19937_64 g(6);
  auto c = testing::random_vector(g, sh_count(6));
  auto w = sh_weingarten(c, 6, grid);
  ScalarFn fn = [&](const Vec3& x) { return sh_evaluate(c, 6, x); };
  for (std::size_t k = 0; k < grid->size(); k += 13) {
    const Mat2 fd = weingarten_of_jet(scalar_jet(fn, grid->nodes[k], grid->frames[k]));
    CHECK((fd - w.at(k)).cwiseAbs().maxCoeff() < 1e-7);
    const Mat3 amb = sh_weingarten_at(c, 6, grid->nodes[k]);
    CHECK((amb - w.ambient(k)).cwiseAbs().maxCoeff() < 1e-11);
  }
}

TEST_CASE("ambient Weingarten form is continuous through the pole") {
  std::vector<double> c(sh_count(4), 0.0);
  c[sh_index(2, 1)] = 0.7;
  c[sh_index(3, -2)] = 0.4;
  c[sh_index(4, 0)] = 0.2;
  const Mat3 at_pole = sh_weingarten_at(c, 4, Vec3(0, 0, 1));
  const Mat3 near = sh_weingarten_at(c, 4, Vec3(1e-4, 2e-4, 1).normalized());
  CHECK((at_pole - near).cwiseAbs().maxCoeff() < 1e-3);
  CHECK((at_pole * Vec3(0, 0, 1)).norm() < 1e-12);
}

TEST_CASE("zonal Legendre expansion and field accessors") {
  auto grid = build_grid(10, 20);
  const std::vector<double> a{0.5, 0.0, 0.6, -0.1};
  auto f = SphericalField::zonal_legendre(grid, a);
  for (std::size_t k = 0; k < grid->size(); k += 5) {
    const double z = grid->nodes[k].z();
    double ref = 0;
    for (int l = 0; l < 4; ++l) ref += a[l] * std::legendre(l, z);
    CHECK(f.value(k) == doctest::Approx(ref).epsilon(1e-13));
  }
  auto g = SphericalField::from_values(grid, std::vector<double>(grid->size(), 1.0));
  CHECK_FALSE(g.has_coeffs());
  CHECK_THROWS_AS(g.evaluate(Vec3(0, 0, 1)), DomainError);
  CHECK_THROWS_AS(SphericalField::from_values(grid, std::vector<double>(3)), DimensionError);
  auto other = build_grid(12, 24);
  CHECK_THROWS_AS(quadrature(f, *other), DimensionError);
}

TEST_CASE("great circle validation") {
  const Vec3 x(0, 0, 1);
  CHECK((great_circle_point(x, Vec3(1, 0, 0), kPi / 2) - Vec3(1, 0, 0)).norm() < 1e-15);
  CHECK_THROWS_AS(great_circle_point(x, Vec3(1, 0, 0.1), 0.3), GeometryError);
  CHECK_THROWS_AS(great_circle_point(x, Vec3(2, 0, 0), 0.3), GeometryError);
}

TEST_CASE("parallel transport keeps tangency and length") {
  std::mt19937_64 g(8);
  for (int i = 0; i < 20; ++i) {
    const Vec3 x = testing::random_unit(g);
    Vec3 d = testing::random_unit(g);
    d = (d - d.dot(x) * x).normalized();
    Vec3 v = testing::random_unit(g);
    v = v - v.dot(x) * x;
    const double t = 0.7;
    const Vec3 y = geodesic_point(x, d, t);
    const Vec3 pv = parallel_transport(x, d, v, t);
    CHECK(std::abs(pv.dot(y)) < 1e-14);
    CHECK(pv.norm() == doctest::Approx(v.norm()));
    CHECK(pv.dot(geodesic_velocity(x, d, t)) == doctest::Approx(v.dot(d)));
  }
}

TEST_CASE("rotated jets equal jets taken in the rotated frame") {
  auto grid = build_grid(8, 16);
  TensorFn fn = [](const Vec3& y) {
    Mat3 b;
    b << 1 + y.x() * y.x(), y.y(), 0.2 * y.z(), y.y(), 2 + y.z(), 0.1, 0.2 * y.z(), 0.1,
        1.5 - y.x();
    const Mat3 p = tangential_projector(y);
    return Mat3(p * b * p);
  };
  const std::size_t node = 37;
  const auto& x = grid->nodes[node];
  const double angle = 0.8;
  const TensorJet direct = tensor_jet(fn, x, rotate_frame(grid->frames[node], angle));
  const TensorJet rotated = tensor_jet(fn, x, grid->frames[node]).rotated(angle);
  CHECK((direct.value - rotated.value).cwiseAbs().maxCoeff() < 1e-12);
  for (int k = 0; k < 2; ++k) CHECK((direct.grad[k] - rotated.grad[k]).cwiseAbs().maxCoeff() < 1e-8);
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 2; ++l)
      CHECK((direct.hess[k][l] - rotated.hess[k][l]).cwiseAbs().maxCoeff() < 1e-6);
}
