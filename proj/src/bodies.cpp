#include "mixcf/bodies.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "mixcf/error.hpp"
#include "mixcf/mixed_algebra.hpp"

namespace mixcf {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void validate(const BodySpec::Variant& v) {
  std::visit(overloaded{
                 [](const Ball& b) {
                   if (!(b.r > 0)) throw ConfigurationError("ball radius must be positive");
                 },
                 [](const TranslatedBall& b) {
                   if (!(b.r > 0)) throw ConfigurationError("ball radius must be positive");
                   if (!(b.v.norm() < b.r))
                     throw ConfigurationError("translated ball needs |v| < r");
                 },
                 [](const Ellipsoid& e) {
                   if (!(e.semiaxes.minCoeff() > 0))
                     throw ConfigurationError("ellipsoid semiaxes must be positive");
                 },
                 [](const HarmonicPerturbation& h) {
                   if (!(h.C > 0)) throw ConfigurationError("perturbation constant C must be positive");
                   if (h.degree < 0 || h.psi.size() != static_cast<std::size_t>(sh_count(h.degree)))
                     throw ConfigurationError("perturbation coefficients do not match its degree");
                   for (int k = 0; k < std::min<int>(4, static_cast<int>(h.psi.size())); ++k)
                     if (h.psi[k] != 0.0)
                       throw ConfigurationError(
                           "perturbation psi must not contain degree 0 or 1 harmonics");
                 },
                 [](const MinkowskiSum& s) {
                   if (s.terms.empty()) throw ConfigurationError("empty Minkowski sum");
                   for (const auto& t : s.terms)
                     if (!(t.weight > 0))
                       throw ConfigurationError("Minkowski weights must be positive");
                 },
             },
             v);
}

void require_unit(const Vec3& x) {
  if (std::abs(x.norm() - 1.0) > 1e-10) throw GeometryError("support function needs a unit vector");
}

}  // namespace

BodySpec::BodySpec(Variant v) : v_(std::move(v)) { validate(v_); }

std::string BodySpec::name() const {
  return std::visit(overloaded{
                        [](const Ball&) { return std::string("ball"); },
                        [](const TranslatedBall&) { return std::string("translated_ball"); },
                        [](const Ellipsoid&) { return std::string("ellipsoid"); },
                        [](const HarmonicPerturbation&) {
                          return std::string("harmonic_perturbation");
                        },
                        [](const MinkowskiSum&) { return std::string("minkowski_sum"); },
                    },
                    v_);
}

namespace {

double support_unchecked(const BodySpec& body, const Vec3& x) {
  return std::visit(overloaded{
                        [&](const Ball& b) { return b.r; },
                        [&](const TranslatedBall& b) { return b.r + b.v.dot(x); },
                        [&](const Ellipsoid& e) {
                          return std::sqrt(e.semiaxes.array().square().matrix().dot(
                              x.array().square().matrix()));
                        },
                        [&](const HarmonicPerturbation& h) {
                          return h.C + sh_evaluate(h.psi, h.degree, x);
                        },
                        [&](const MinkowskiSum& s) {
                          double u = 0.0;
                          for (const auto& t : s.terms) u += t.weight * support_unchecked(t.body, x);
                          return u;
                        },
                    },
                    body.variant());
}

}  // namespace

double support(const BodySpec& body, const Vec3& x) {
  require_unit(x);
  return support_unchecked(body, x);
}

ScalarFn support_fn(const BodySpec& body) {
  return [body](const Vec3& x) { return support_unchecked(body, x); };
}

Mat3 weingarten_ambient(const BodySpec& body, const Vec3& x) {
  return std::visit(overloaded{
                        [&](const Ball& b) -> Mat3 { return b.r * tangential_projector(x); },
                        [&](const TranslatedBall& b) -> Mat3 {
                          return b.r * tangential_projector(x);
                        },
                        [&](const Ellipsoid& e) -> Mat3 {
                          const Vec3 q2 = e.semiaxes.array().square();
                          const Vec3 qx = q2.cwiseProduct(x);
                          const double g = std::sqrt(x.dot(qx));
                          Mat3 h = Mat3(q2.asDiagonal()) / g - qx * qx.transpose() / (g * g * g);
                          return h;
                        },
                        [&](const HarmonicPerturbation& h) -> Mat3 {
                          return h.C * tangential_projector(x) +
                                 sh_weingarten_at(h.psi, h.degree, x);
                        },
                        [&](const MinkowskiSum& s) -> Mat3 {
                          Mat3 w = Mat3::Zero();
                          for (const auto& t : s.terms)
                            w += t.weight * weingarten_ambient(t.body, x);
                          return w;
                        },
                    },
                    body.variant());
}

TensorFn weingarten_fn(const BodySpec& body) {
  return [body](const Vec3& x) { return weingarten_ambient(body, x); };
}

TensorFn coefficient_fn(const BodySpec& body) {
  return [body](const Vec3& x) { return tangential_adjugate(weingarten_ambient(body, x), x); };
}

SymTensorField coefficient_field(const BodySpec& body, const GridPtr& grid) {
  if (harmonic_degree(body) > grid->resolvable_degree())
    throw AliasingError("body harmonic degree exceeds what the grid resolves");
  return SymTensorField::sample(grid, coefficient_fn(body));
}

int harmonic_degree(const BodySpec& body) {
  return std::visit(overloaded{
                        [](const Ball&) { return 0; },
                        [](const TranslatedBall&) { return 1; },
                        [](const Ellipsoid&) { return 0; },
                        [](const HarmonicPerturbation& h) { return h.degree; },
                        [](const MinkowskiSum& s) {
                          int d = 0;
                          for (const auto& t : s.terms) d = std::max(d, harmonic_degree(t.body));
                          return d;
                        },
                    },
                    body.variant());
}

// ---------------------------------------------------------------------------

namespace {

double extrapolate(std::vector<double> col) {
  const int n = static_cast<int>(col.size());
  for (int j = 1; j < n; ++j) {
    const double f = std::pow(4.0, j);
    for (int k = n - 1; k >= j; --k) col[k] = (f * col[k] - col[k - 1]) / (f - 1.0);
  }
  return col.back();
}

// Nested central difference for the multi-index `idx`, step h.
double nested_difference(const std::function<double(const Vec3&)>& G, const Vec3& p,
                         const std::vector<int>& idx, double h) {
  const int k = static_cast<int>(idx.size());
  double sum = 0.0;
  for (int mask = 0; mask < (1 << k); ++mask) {
    Vec3 q = p;
    double sign = 1.0;
    for (int j = 0; j < k; ++j) {
      const double s = (mask >> j) & 1 ? -1.0 : 1.0;
      q(idx[j]) += s * h;
      sign *= s;
    }
    sum += sign * G(q);
  }
  return sum / std::pow(2.0 * h, k);
}

double fd_entry(const std::function<double(const Vec3&)>& G, const Vec3& p,
                const std::vector<int>& idx, double h, int levels) {
  std::vector<double> col;
  for (int l = 0; l <= levels; ++l, h *= 0.5) col.push_back(nested_difference(G, p, idx, h));
  return extrapolate(std::move(col));
}

void fill_fd(HomogeneousDerivatives& d, const std::function<double(const Vec3&)>& G,
             const Vec3& p, int from_order, int to_order) {
  const double r = p.norm();
  for (int order = std::max(1, from_order); order <= to_order; ++order) {
    const double h = (order <= 2 ? 1e-3 : 1e-2) * r;
    const int levels = order <= 2 ? 1 : 2;
    std::vector<int> idx(order, 0);
    // Enumerate non-decreasing multi-indices and scatter by symmetry.
    std::function<void(int, int)> rec = [&](int pos, int start) {
      if (pos == order) {
        const double v = fd_entry(G, p, idx, h, levels);
        std::vector<int> perm = idx;
        do {
          if (order == 1) d.gradient(perm[0]) = v;
          if (order == 2) d.hessian(perm[0], perm[1]) = v;
          if (order == 3) d.third[(perm[0] * 3 + perm[1]) * 3 + perm[2]] = v;
          if (order == 4) d.fourth[((perm[0] * 3 + perm[1]) * 3 + perm[2]) * 3 + perm[3]] = v;
        } while (std::next_permutation(perm.begin(), perm.end()));
        return;
      }
      for (int i = start; i < 3; ++i) {
        idx[pos] = i;
        rec(pos + 1, i);
      }
    };
    rec(0, 0);
  }
}

void check_order(const Vec3& p, int order) {
  if (p.norm() < 1e-6) throw DomainError("1-homogeneous extension is not differentiable at 0");
  if (order < 0 || order > 4) throw DomainError("derivative order must be in [0, 4]");
}

}  // namespace

HomogeneousDerivatives homog_ext_derivs(const ScalarFn& g, const Vec3& p, int order) {
  check_order(p, order);
  auto G = [&g](const Vec3& q) {
    const double r = q.norm();
    return r * g(q / r);
  };
  HomogeneousDerivatives d;
  d.order = order;
  d.value = G(p);
  fill_fd(d, G, p, 1, order);
  return d;
}

HomogeneousDerivatives homog_ext_derivs(const BodySpec& body, const Vec3& p, int order) {
  check_order(p, order);
  const double r = p.norm();
  const Vec3 x = p / r;
  const bool closed = std::holds_alternative<Ball>(body.variant()) ||
                      std::holds_alternative<TranslatedBall>(body.variant()) ||
                      std::holds_alternative<Ellipsoid>(body.variant());
  if (!closed) return homog_ext_derivs(support_fn(body), p, order);

  HomogeneousDerivatives d;
  d.order = order;
  d.value = r * support_unchecked(body, x);
  if (const auto* e = std::get_if<Ellipsoid>(&body.variant())) {
    const Vec3 q2 = e->semiaxes.array().square();
    const Vec3 qp = q2.cwiseProduct(p);
    const double g = std::sqrt(p.dot(qp));
    d.gradient = qp / g;
    d.hessian = Mat3(q2.asDiagonal()) / g - qp * qp.transpose() / (g * g * g);
  } else {
    const double radius = std::holds_alternative<Ball>(body.variant())
                              ? std::get<Ball>(body.variant()).r
                              : std::get<TranslatedBall>(body.variant()).r;
    const Vec3 v = std::holds_alternative<TranslatedBall>(body.variant())
                       ? std::get<TranslatedBall>(body.variant()).v
                       : Vec3::Zero();
    d.gradient = radius * x + v;
    d.hessian = radius * tangential_projector(x) / r;
  }
  if (order >= 3) {
    auto G = [&body](const Vec3& q) {
      const double n = q.norm();
      return n * support_unchecked(body, q / n);
    };
    fill_fd(d, G, p, 3, order);
  }
  return d;
}

// ---------------------------------------------------------------------------

SymTensorField weingarten_form(const BodySpec& body, const GridPtr& grid) {
  if (harmonic_degree(body) > grid->resolvable_degree())
    throw AliasingError("body harmonic degree " + std::to_string(harmonic_degree(body)) +
                        " exceeds what the grid resolves");
  return SymTensorField::sample(grid, weingarten_fn(body));
}

SymTensorField weingarten_form(const SphericalField& field) { return field.weingarten(); }

SymTensorField weingarten_form(const ScalarFn& g, const GridPtr& grid) {
  SymTensorField out(grid);
  for (std::size_t k = 0; k < grid->size(); ++k)
    out.set(k, weingarten_of_jet(scalar_jet(g, grid->nodes[k], grid->frames[k])));
  return out;
}

C2PlusCheck is_c2plus(const BodySpec& body, const GridPtr& grid, double tol) {
  const SymTensorField w = weingarten_form(body, grid);
  C2PlusCheck out;
  out.min_eig = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < w.size(); ++k) {
    const double e = min_eigenvalue(w.at(k));
    if (e < out.min_eig) {
      out.min_eig = e;
      out.node = k;
    }
  }
  out.ok = out.min_eig > tol;
  return out;
}

double c4_norm_estimate(std::span<const double> coeffs, int degree, const FramedGrid& grid,
                        int n_dirs) {
  if (degree < 0 || coeffs.size() != static_cast<std::size_t>(sh_count(degree)))
    throw DimensionError("coefficients do not match degree");
  const int K = 2 * degree + 1;
  std::vector<double> samples(K);
  double best = 0.0;
  for (std::size_t node = 0; node < grid.size(); ++node) {
    const Vec3& x = grid.nodes[node];
    for (int d = 0; d < n_dirs; ++d) {
      const TangentFrame f = rotate_frame(grid.frames[node], kPi * d / n_dirs);
      for (int k = 0; k < K; ++k)
        samples[k] = sh_evaluate(coeffs, degree, geodesic_point(x, f.e1, 2.0 * kPi * k / K));
      // Trigonometric interpolation; derivative r at t = 0 of
      // a_j cos(j t) + b_j sin(j t) is j^r times a signed a_j or b_j.
      double deriv[5] = {0, 0, 0, 0, 0};
      for (int j = 0; j <= degree; ++j) {
        double a = 0.0, b = 0.0;
        for (int k = 0; k < K; ++k) {
          const double t = 2.0 * kPi * j * k / K;
          a += samples[k] * std::cos(t);
          b += samples[k] * std::sin(t);
        }
        a *= (j == 0 ? 1.0 : 2.0) / K;
        b *= 2.0 / K;
        const double jj = j;
        deriv[0] += a;
        deriv[1] += jj * b;
        deriv[2] -= jj * jj * a;
        deriv[3] -= jj * jj * jj * b;
        deriv[4] += jj * jj * jj * jj * a;
      }
      for (double v : deriv) best = std::max(best, std::abs(v));
    }
  }
  return best;
}

std::array<Mat2, 2> covariant_derivative(const TensorFn& w, const Vec3& x,
                                         const TangentFrame& frame) {
  const TensorJet jet = tensor_jet(w, x, frame, StepRule{1e-2, 2});
  return jet.grad;
}

double codazzi_residual(const BodySpec& body, const GridPtr& grid) {
  const TensorFn w = weingarten_fn(body);
  double worst = 0.0;
  double scale = 0.0;
  for (std::size_t k = 0; k < grid->size(); ++k) {
    const auto g = covariant_derivative(w, grid->nodes[k], grid->frames[k]);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int l = 0; l < 2; ++l) {
          scale = std::max(scale, std::abs(g[l](i, j)));
          worst = std::max(worst, std::abs(g[l](i, j) - g[j](i, l)));
        }
  }
  return scale > 0.0 ? worst / scale : worst;
}

Vec3 linear_part(std::span<const double> values, const FramedGrid& grid) {
  if (values.size() != grid.size()) throw DimensionError("values do not match the grid");
  Vec3 m = Vec3::Zero();
  for (std::size_t k = 0; k < grid.size(); ++k) m += grid.weights[k] * values[k] * grid.nodes[k];
  return 3.0 / (4.0 * kPi) * m;
}

}  // namespace mixcf
