#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "mixcf/elliptic.hpp"
#include "mixcf/kernels.hpp"
#include "mixcf/sphere.hpp"
#include "support.hpp"

using namespace mixcf;
namespace k = mixcf::kernels;

namespace {

// Restores the active table after a test that switches ISAs.
struct IsaGuard {
  k::Isa saved = k::active().isa;
  ~IsaGuard() { k::select(saved); }
};

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("scalar kernels match naive loops") {
  std::mt19937_64 g(1);
  const auto& s = k::scalar_table();
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 16u, 33u, 130u}) {
    auto a = testing::random_vector(g, n), b = testing::random_vector(g, n),
         w = testing::random_vector(g, n);
    double dot = 0, wdot = 0;
    for (std::size_t i = 0; i < n; ++i) {
      dot += a[i] * b[i];
      wdot += w[i] * a[i] * b[i];
    }
    CHECK(rel(s.dot(a.data(), b.data(), n), dot) < 1e-14);
    CHECK(rel(s.wdot(w.data(), a.data(), b.data(), n), wdot) < 1e-14);
  }
}

TEST_CASE("AVX2 kernels agree with the scalar reference") {
  const k::KernelTable* v = k::avx2_table();
  if (v == nullptr || !k::cpu_has_avx2()) {
    MESSAGE("AVX2 not available; equivalence test skipped");
    return;
  }
  const auto& s = k::scalar_table();
  std::mt19937_64 g(2);
  for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 8u, 13u, 64u, 67u, 1001u}) {
    auto a = testing::random_vector(g, n), b = testing::random_vector(g, n),
         c = testing::random_vector(g, n), w1 = testing::random_vector(g, n),
         w2 = testing::random_vector(g, n), w3 = testing::random_vector(g, n),
         t = testing::random_vector(g, n), tp = testing::random_vector(g, n);
    CHECK(rel(v->dot(a.data(), b.data(), n), s.dot(a.data(), b.data(), n)) < 1e-13);
    CHECK(rel(v->wdot(c.data(), a.data(), b.data(), n), s.wdot(c.data(), a.data(), b.data(), n)) <
          1e-13);

    std::vector<double> y1 = b, y2 = b;
    s.axpy(0.37, a.data(), y1.data(), n);
    v->axpy(0.37, a.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(y1[i] - y2[i]) < 1e-15);

    std::vector<double> o1(n), o2(n);
    s.contract_sym2(a.data(), b.data(), c.data(), w1.data(), w2.data(), w3.data(), o1.data(), n);
    v->contract_sym2(a.data(), b.data(), c.data(), w1.data(), w2.data(), w3.data(), o2.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(o1[i] - o2[i]) < 1e-14);

    s.ring_column(a.data(), b.data(), c.data(), t.data(), tp.data(), 0.3, -1.7, 2.2, 0.9,
                  o1.data(), n);
    v->ring_column(a.data(), b.data(), c.data(), t.data(), tp.data(), 0.3, -1.7, 2.2, 0.9,
                   o2.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(o1[i] - o2[i]) < 1e-14);
  }
}

TEST_CASE("ring_column follows its definition") {
  std::vector<double> a11{1, 2}, a12{0.5, -1}, a22{3, 4}, t{1, -2}, tp{0.25, 2}, out(2);
  k::scalar_table().ring_column(a11.data(), a12.data(), a22.data(), t.data(), tp.data(), 2, 3, 5,
                                0.5, out.data(), 2);
  CHECK(out[0] == doctest::Approx(0.5 * (1 * (2 * 1 + 5 * 3) + 2 * 3 * 0.25 * 0.5)));
  CHECK(out[1] == doctest::Approx(0.5 * (-2 * (2 * 2 + 5 * 4) + 2 * 3 * 2 * -1)));
}

TEST_CASE("runtime selection") {
  IsaGuard guard;
  CHECK(k::select(k::Isa::Scalar));
  CHECK(k::active().isa == k::Isa::Scalar);
  const bool have = k::avx2_table() != nullptr && k::cpu_has_avx2();
  CHECK(k::select(k::Isa::Avx2) == have);
  CHECK(k::isa_name(k::Isa::Avx2) == "avx2");
}

TEST_CASE("transforms and solves agree across ISAs") {
  if (k::avx2_table() == nullptr || !k::cpu_has_avx2()) return;
  IsaGuard guard;
  auto grid = build_grid(20, 40);
  std::mt19937_64 g(3);
  auto coeffs = testing::random_vector(g, sh_count(9));

  auto run = [&] {
    auto values = sh_synthesis(coeffs, 9, *grid);
    auto back = sh_analysis(values, 9, *grid);
    auto w = sh_weingarten(coeffs, 9, grid);
    SymTensorField A = SymTensorField::sample(grid, [](const Vec3& x) {
      return Mat3(tangential_projector(x) * (1.2 + 0.1 * x.z()));
    });
    std::vector<double> fvals(grid->size(), 2.0);
    auto f = SphericalField::from_values(grid, fvals);
    SolveOptions opt;
    opt.L_max = 12;
    opt.residual_tol = 1.0;
    auto rep = solve(A, f, grid, opt);
    values.insert(values.end(), back.begin(), back.end());
    values.insert(values.end(), w.xy().begin(), w.xy().end());
    values.insert(values.end(), rep.u_coeffs.begin(), rep.u_coeffs.end());
    return values;
  };
  k::select(k::Isa::Scalar);
  const auto ref = run();
  k::select(k::Isa::Avx2);
  const auto vec = run();
  REQUIRE(ref.size() == vec.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) worst = std::max(worst, std::abs(ref[i] - vec[i]));
  CHECK(worst < 1e-12);
}
