// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <Eigen/Eigenvalues>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "mixcf/bodies.hpp"
#include "mixcf/conditions.hpp"
#include "mixcf/diagnostics.hpp"
#include "mixcf/elliptic.hpp"
#include "mixcf/mixed_algebra.hpp"

using namespace mixcf;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Matrix random_symmetric(std::mt19937_64& g, int n) {
  std::normal_distribution<double> nd;
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) m(i, j) = m(j, i) = nd(g);
  return m;
}

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

double binom(int n, int k) { return factorial(n) / (factorial(k) * factorial(n - k)); }

// (1/n!) sum over subsets S of (-1)^(n-|S|) det(sum_{i in S} M_i)
double inclusion_exclusion(const std::vector<Matrix>& ms) {
  const int n = static_cast<int>(ms.size());
  double total = 0.0;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    Matrix s = Matrix::Zero(n, n);
    int bits = 0;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) {
        s += ms[i];
        ++bits;
      }
    total += ((n - bits) % 2 ? -1.0 : 1.0) * s.determinant();
  }
  return total / factorial(n);
}

// sigma_k from the eigenvalues via prod (1 + t lambda_i)
std::vector<double> sigma_from_eigenvalues(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  const int n = static_cast<int>(m.rows());
  std::vector<double> s(n + 1, 0.0);
  s[0] = 1.0;
  for (int i = 0; i < n; ++i)
    for (int k = i + 1; k >= 1; --k) s[k] += es.eigenvalues()(i) * s[k - 1];
  return s;
}

SymTensorField identity_field(const GridPtr& grid) {
  SymTensorField a(grid);
  for (std::size_t k = 0; k < grid->size(); ++k) a.set(k, Mat2::Identity());
  return a;
}

HarmonicPerturbation perturbation(double C, std::vector<std::pair<int, double>> terms, int m = 0) {
  HarmonicPerturbation h;
  h.C = C;
  for (auto [l, v] : terms) h.degree = std::max(h.degree, l);
  h.psi.assign(sh_count(h.degree), 0.0);
  for (auto [l, v] : terms) h.psi[sh_index(l, std::min(m, l))] = v;
  return h;
}

std::vector<BodySpec> catalog() {
  MinkowskiSum s;
  s.terms.push_back({Ellipsoid{Vec3(1.0, 0.8, 1.3)}, 1.0});
  s.terms.push_back({TranslatedBall{0.5, Vec3(0.1, 0.0, -0.2)}, 2.0});
  return {Ball{1.0},
          TranslatedBall{1.0, Vec3(0.3, -0.2, 0.1)},
          Ellipsoid{Vec3(1.0, 1.1, 1.2)},
          Ellipsoid{Vec3(1.0, 1.0, 3.0)},
          perturbation(1.0, {{2, 0.02}}),
          perturbation(1.0, {{2, 0.05}}),
          perturbation(1.0, {{2, 0.03}, {3, 0.02}}, 1),
          s};
}

Outcome christoffel_ball() {
  auto grid = build_grid(16, 32);
  const auto t0 = std::chrono::steady_clock::now();
  SolveOptions opt;
  opt.L_max = 16;
  std::vector<double> two{2.0 * std::sqrt(4 * kPi)};
  const auto report = solve(identity_field(grid), SphericalField::from_coeffs(grid, 0, two), grid, opt);
  const auto u = report.solution(grid);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  double err = 0;
  for (double v : u.values()) err = std::max(err, std::abs(v - 1.0));
  return {err <= 1e-8 && secs <= 10.0, fmt("max|u-1| = %.2e", err) + fmt(", %.3f s", secs)};
}

Outcome operator_identity() {
  auto grid = build_grid(16, 32);
  const auto a = identity_field(grid);
  double err = 0;
  for (int l = 0; l <= 12; ++l)
    for (int m = -l; m <= l; ++m) {
      std::vector<double> c(sh_count(l), 0.0);
      c[sh_index(l, m)] = 1.0;
      const auto u = SphericalField::from_coeffs(grid, l, c);
      const auto lu = operator_apply(a, u, grid);
      for (std::size_t k = 0; k < grid->size(); ++k) {
        const double y = real_harmonic(l, m, grid->nodes[k]);
        err = std::max(err, std::abs(lu.value(k) - (2.0 - l * (l + 1)) * y));
      }
    }
  return {err <= 1e-8, fmt("max node error %.2e", err)};
}

Outcome mixed_discriminant_oracle() {
  std::mt19937_64 g(1003);
  double worst = 0, worst_det = 0;
  for (int t = 0; t < 200; ++t) {
    const int n = 2 + t % 4;
    std::vector<Matrix> ms;
    for (int i = 0; i < n; ++i) ms.push_back(random_symmetric(g, n));
    const double ref = inclusion_exclusion(ms);
    worst = std::max(worst, std::abs(mixed_discriminant(ms) - ref) / std::max(1.0, std::abs(ref)));
    std::vector<Matrix> same(n, ms[0]);
    const double det = ms[0].determinant();
    worst_det = std::max(worst_det, std::abs(mixed_discriminant(same) - det) / std::max(1.0, std::abs(det)));
  }
  return {worst <= 1e-10 && worst_det <= 1e-10,
          fmt("polarization %.2e", worst) + fmt(", det %.2e", worst_det)};
}

Outcome cofactor_identities() {
  std::mt19937_64 g(1004);
  double worst = 0;
  for (int n = 2; n <= 5; ++n)
    for (int t = 0; t < 20; ++t) {
      std::vector<Matrix> ms;
      for (int i = 0; i < n - 1; ++i) ms.push_back(random_symmetric(g, n));
      const Matrix c = mixed_cofactor(ms);
      const Matrix m = random_symmetric(g, n);
      auto all = ms;
      all.push_back(m);
      const double ref = mixed_discriminant(all);
      worst = std::max(worst, std::abs((c.array() * m.array()).sum() - ref) / std::max(1.0, std::abs(ref)));
    }
  bool identity_exact = true;
  for (int n = 2; n <= 5; ++n) {
    std::vector<Matrix> ids(n - 1, Matrix::Identity(n, n));
    identity_exact = identity_exact && christoffel_cofactor(ids) == Matrix::Identity(n, n);
  }
  double adj_err = 0;
  for (int t = 0; t < 20; ++t) {
    const Matrix b = random_symmetric(g, 2);
    Matrix adj(2, 2);
    adj << b(1, 1), -b(0, 1), -b(1, 0), b(0, 0);
    std::vector<Matrix> one{b};
    adj_err = std::max(adj_err, (christoffel_cofactor(one) - adj).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-10 && identity_exact && adj_err <= 1e-14,
          fmt("sum c_ij m_ij %.2e", worst) + (identity_exact ? ", I -> I exact" : ", I -> I inexact") +
              fmt(", adj %.2e", adj_err)};
}

Outcome sigma_polarization() {
  std::mt19937_64 g(1005);
  double worst = 0;
  for (int n = 1; n <= 5; ++n)
    for (int t = 0; t < 10; ++t) {
      const Matrix m = random_symmetric(g, n);
      const auto ref = sigma_from_eigenvalues(m);
      for (int k = 0; k <= n; ++k) {
        std::vector<Matrix> ms;
        for (int i = 0; i < k; ++i) ms.push_back(m);
        for (int i = k; i < n; ++i) ms.push_back(Matrix::Identity(n, n));
        const double v = binom(n, k) * mixed_discriminant(ms);
        worst = std::max(worst, std::abs(v - ref[k]) / std::max(1.0, std::abs(ref[k])));
      }
    }
  return {worst <= 1e-10, fmt("max relative error %.2e", worst)};
}

Outcome roundtrip() {
  auto grid = build_grid(32, 64);
  const BodySpec body = Ellipsoid{Vec3(1.0, 1.1, 1.2)};
  const auto a = coefficient_field(body, grid);
  std::vector<double> target(sh_count(3), 0.0);
  target[0] = std::sqrt(4 * kPi);
  target[sh_index(3, 1)] = 0.1;
  const auto u_star = SphericalField::from_coeffs(grid, 3, target);
  const auto f = operator_apply(a, u_star, grid);
  SolveOptions opt;
  opt.L_max = 24;
  const auto rep = solve(a, f, grid, opt);
  const auto u = rep.solution(grid);
  std::vector<BodySpec> bodies{body};
  const auto density = recovered_density(bodies, u, grid);
  double e2 = 0, u2 = 0, d2 = 0, f2 = 0;
  for (std::size_t k = 0; k < grid->size(); ++k) {
    const double w = grid->weights[k];
    e2 += w * std::pow(u.value(k) - u_star.value(k), 2);
    u2 += w * std::pow(u_star.value(k), 2);
    d2 += w * std::pow(density.value(k) - f.value(k), 2);
    f2 += w * std::pow(f.value(k), 2);
  }
  const double eu = std::sqrt(e2 / u2), ed = std::sqrt(d2 / f2);
  return {eu <= 1e-6 && ed <= 1e-6 && rep.w_min_eig > 0,
          fmt("u error %.2e", eu) + fmt(", density error %.2e", ed) + fmt(", min eig W %.4f", rep.w_min_eig)};
}

Outcome checker_calibration() {
  auto grid = build_grid(32, 64);
  const ScalarFn one = [](const Vec3&) { return 1.0; };
  const TensorFn eye = [](const Vec3& x) { return tangential_projector(x); };
  const auto gm = check_gm(one, grid);
  const auto n2 = check_cond_n2(eye, one, grid);
  const auto cl = check_cond_l(eye, one, grid);
  const bool ones = gm.pass && n2.pass && cl.pass && std::abs(gm.margin - 1) <= 1e-8 &&
                    std::abs(n2.margin - 1) <= 1e-8 && std::abs(cl.margin - 1) <= 1e-8;
  const auto bad = check_gm([](const Vec3& x) { return 1.0 / (1.0 + 0.3 * (3 * x.z() * x.z() - 1)); }, grid);
  const double polar = std::acos(std::abs(grid->nodes[bad.witness_node].z())) * 180 / kPi;
  const bool fails = !bad.pass && std::abs(bad.margin + 0.2) <= 0.02 && polar <= 5.0;
  return {ones && fails, fmt("identity margins %.10f", std::min({gm.margin, n2.margin, cl.margin})) +
                             fmt(", 1+0.6P2 margin %.4f", bad.margin) + fmt(" at %.2f deg from pole", polar)};
}

Outcome reduction_consistency() {
  auto grid = build_grid(16, 32);
  const TensorFn eye = [](const Vec3& x) { return tangential_projector(x); };
  std::mt19937_64 g(1008);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int agree = 0, fails = 0;
  for (int t = 0; t < 10; ++t) {
    std::vector<double> c(sh_count(4), 0.0);
    c[0] = std::sqrt(4 * kPi);
    const double amp = 0.01 + 0.015 * t;
    for (int i = sh_index(2, -2); i < sh_count(4); ++i) c[i] = amp * u(g);
    const ScalarFn f = [c](const Vec3& x) { return 1.0 / sh_evaluate(c, 4, x); };
    const auto a = check_gm(f, grid);
    const auto b = check_cond_n2(eye, f, grid);
    if (a.pass == b.pass && a.witness_node == b.witness_node) ++agree;
    if (!a.pass) ++fails;
  }
  return {agree == 10, std::to_string(agree) + "/10 agree (" + std::to_string(fails) + " failing f)"};
}

Outcome implication_suite() {
  auto grid = build_grid(16, 32);
  const ScalarFn one = [](const Vec3&) { return 1.0; };
  int passes = 0, violations = 0;
  for (const auto& body : catalog()) {
    const auto mc = check_matrix_convexity(convexity_tensor(weingarten_fn(body), one), grid);
    if (!mc.pass) continue;
    ++passes;
    if (!check_new_form_3d(body, one, grid).pass) ++violations;
  }
  return {violations == 0, std::to_string(catalog().size()) + " bodies, " + std::to_string(passes) +
                               " matrix-convexity passes, " + std::to_string(violations) + " violations"};
}

Outcome symmetries() {
  auto grid = build_grid(16, 32);
  double codazzi = 0;
  for (const auto& b : {BodySpec(Ellipsoid{Vec3(1.0, 1.1, 1.2)}), BodySpec(Ellipsoid{Vec3(1.0, 1.0, 3.0)}),
                        BodySpec(perturbation(1.0, {{2, 0.03}, {3, 0.02}}, 1))})
    codazzi = std::max(codazzi, codazzi_residual(b, grid));

  MinkowskiSum moved, still;
  moved.terms.push_back({Ellipsoid{Vec3(1.0, 0.8, 1.3)}, 1.0});
  moved.terms.push_back({TranslatedBall{0.5, Vec3(0.1, 0.3, -0.2)}, 2.0});
  still.terms.push_back({Ellipsoid{Vec3(1.0, 0.8, 1.3)}, 1.0});
  still.terms.push_back({Ball{0.5}, 2.0});
  double translation = 0;
  for (std::size_t k = 0; k < grid->size(); ++k) {
    const auto& x = grid->nodes[k];
    translation = std::max(translation, (weingarten_ambient(moved, x) - weingarten_ambient(still, x)).cwiseAbs().maxCoeff());
    translation = std::max(translation, (weingarten_ambient(TranslatedBall{1.2, Vec3(0.5, -0.4, 0.3)}, x) -
                                         weingarten_ambient(Ball{1.2}, x)).cwiseAbs().maxCoeff());
  }

  const BodySpec b0 = Ellipsoid{Vec3(1.0, 1.5, 0.7)};
  const BodySpec b1 = perturbation(1.0, {{2, 0.03}, {3, 0.02}}, 1);
  const auto a = coefficient_field(b0, grid);
  const auto w = weingarten_form(b1, grid);
  std::mt19937_64 g(1010);
  std::uniform_real_distribution<double> angle(0.0, 2 * kPi);
  double frame = 0;
  for (std::size_t k = 0; k < grid->size(); ++k) {
    const double ref = (a.at(k) * w.at(k)).trace();
    const TangentFrame f = rotate_frame(grid->frames[k], angle(g));
    const double rotated = (to_frame(a.ambient(k), f) * to_frame(w.ambient(k), f)).trace();
    frame = std::max(frame, std::abs(rotated - ref) / std::max(1.0, std::abs(ref)));
  }
  return {codazzi <= 1e-6 && translation <= 1e-10 && frame <= 1e-10,
          fmt("codazzi %.2e", codazzi) + fmt(", translation %.2e", translation) + fmt(", frame %.2e", frame)};
}

Outcome minkowski_identities() {
  // the eccentric ellipsoid is not band-limited; 32x64 leaves ~1e-8 of quadrature error
  auto grid = build_grid(48, 96);
  const auto cal = minkowski_identity_check(Ball{1.0}, 1, grid);
  double worst = 0;
  for (const auto& b : {BodySpec(Ellipsoid{Vec3(1.0, 1.1, 1.2)}), BodySpec(Ellipsoid{Vec3(1.0, 1.0, 3.0)}),
                        BodySpec(perturbation(1.0, {{2, 0.05}})),
                        BodySpec(perturbation(1.0, {{2, 0.03}, {3, 0.02}}, 1))})
    for (int l : {0, 1}) worst = std::max(worst, minkowski_identity_check(b, l, grid).residual);
  return {std::abs(cal.calibrated_constant - 2.0) <= 1e-12 && worst <= 1e-8,
          fmt("C = %.15g", cal.calibrated_constant) + fmt(", max residual %.2e", worst)};
}

Outcome pairing_and_moments() {
  auto grid = build_grid(48, 96);
  const auto cat = catalog();
  std::mt19937_64 g(1012);
  double pairing = 0, moments = 0;
  for (int t = 0; t < 20; ++t) {
    std::vector<BodySpec> bodies{cat[g() % cat.size()]};
    const BodySpec& a = cat[g() % cat.size()];
    const BodySpec& b = cat[g() % cat.size()];
    pairing = std::max(pairing, mixed_volume_pairing(bodies, a, b, grid).relative());
    // density of the pair (bodies[0], a) is tr(adj W_0 W_a)
    const auto w0 = weingarten_form(bodies[0], grid);
    const auto wa = weingarten_form(a, grid);
    std::vector<double> d(grid->size());
    double scale = 0;
    for (std::size_t k = 0; k < d.size(); ++k) {
      d[k] = (adjugate(w0.at(k)) * wa.at(k)).trace();
      scale += grid->weights[k] * std::abs(d[k]);
    }
    const Vec3 m = density_moments(SphericalField::from_values(grid, d), grid);
    moments = std::max(moments, m.cwiseAbs().maxCoeff() / scale);
  }
  return {pairing <= 1e-8 && moments <= 1e-9, fmt("pairing %.2e", pairing) + fmt(", moments %.2e", moments)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"christoffel ball", christoffel_ball},
      {"spectral operator identity", operator_identity},
      {"mixed discriminant oracle", mixed_discriminant_oracle},
      {"cofactor identities", cofactor_identities},
      {"sigma_k polarization", sigma_polarization},
      {"ellipsoid roundtrip", roundtrip},
      {"condition checker calibration", checker_calibration},
      {"reduction consistency", reduction_consistency},
      {"implication suite", implication_suite},
      {"Codazzi, translation and frame invariance", symmetries},
      {"Minkowski identities", minkowski_identities},
      {"mixed volume pairing and moments", pairing_and_moments},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
