#include "mixcf/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "mixcf/error.hpp"
#include "mixcf/parallel.hpp"

namespace mixcf {

namespace {

constexpr double kResampleBand = 1e-6;
// Finite-difference noise of the jets is ~1e-10; samples closer than this to
// the minimum are treated as ties and resolved by the lowest index.
constexpr double kTieSlack = 1e-8;

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t index, std::uint32_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    tag};
  return std::mt19937_64(seq);
}

double uniform01(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

Vec3 unit_vector(std::mt19937_64& g) {
  const double z = 2.0 * uniform01(g) - 1.0;
  const double phi = 2.0 * kPi * uniform01(g);
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {r * std::cos(phi), r * std::sin(phi), z};
}

bool within_tie(double v, double best) {
  return v <= best + kTieSlack * std::max(1.0, std::abs(best));
}

struct NodeResult {
  double value = std::numeric_limits<double>::infinity();
  int frame = 0;
};

// First index whose value is within the tie slack of the minimum.
NodeResult reduce(const std::vector<double>& values) {
  NodeResult r;
  for (double v : values) r.value = std::min(r.value, v);
  for (std::size_t k = 0; k < values.size(); ++k)
    if (within_tie(values[k], r.value)) {
      r.frame = static_cast<int>(k);
      break;
    }
  return r;
}

using NodeFn = std::function<void(std::size_t node, const std::vector<double>& angles,
                                  std::vector<double>& values)>;

ConditionVerdict sweep_once(const std::string& name, const FramedGrid& grid, int count,
                            const CheckOptions& opt, const NodeFn& fn) {
  std::vector<NodeResult> per_node(grid.size());
  parallel_for(grid.size(), opt.threads, [&](std::size_t node) {
    const auto angles = frame_angles(opt.seed, node, count);
    std::vector<double> values(angles.size());
    fn(node, angles, values);
    per_node[node] = reduce(values);
  });
  ConditionVerdict v;
  v.name = name;
  v.tol = opt.tol;
  v.margin = std::numeric_limits<double>::infinity();
  for (const auto& r : per_node) v.margin = std::min(v.margin, r.value);
  for (std::size_t node = 0; node < per_node.size(); ++node)
    if (within_tie(per_node[node].value, v.margin)) {
      v.witness_node = node;
      v.witness_frame = per_node[node].frame;
      break;
    }
  const double angle = frame_angles(opt.seed, v.witness_node, v.witness_frame + 1).back();
  v.witness_direction = rotate_frame(grid.frames[v.witness_node], angle).e1;
  v.samples = grid.size() * static_cast<std::size_t>(count);
  v.pass = v.margin >= -opt.tol;
  return v;
}

ConditionVerdict sweep(const std::string& name, const FramedGrid& grid, int count,
                       const std::string& what, const CheckOptions& opt, const NodeFn& fn) {
  ConditionVerdict v = sweep_once(name, grid, count, opt, fn);
  if (opt.resample && count > 1 && std::abs(v.margin) <= kResampleBand) {
    count *= 4;
    v = sweep_once(name, grid, count, opt, fn);
    v.resampled = true;
  }
  v.quantifier = std::to_string(count) + " sampled " + what + " per node";
  return v;
}

TensorFn divided(const TensorFn& A, const ScalarFn& f) {
  return [A, f](const Vec3& y) -> Mat3 { return A(y) / f(y); };
}

}  // namespace

void require_positive_density(const ScalarFn& f, const FramedGrid& grid) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& x : grid.nodes) {
    const double v = f(x);
    if (!std::isfinite(v)) throw DomainError("density is not finite on the grid");
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (!(lo > 0.0) || lo < 1e-10 * hi)
    throw DomainError("density must be positive and bounded away from zero (min " +
                      std::to_string(lo) + ", max " + std::to_string(hi) + ")");
}

std::vector<double> frame_angles(std::uint64_t seed, std::size_t node, int count) {
  std::vector<double> out(std::max(count, 1), 0.0);
  auto g = stream(seed, node, 0x6672u);
  for (std::size_t k = 1; k < out.size(); ++k) out[k] = kPi * uniform01(g);
  return out;
}

ConditionVerdict check_gm(const ScalarFn& f, const GridPtr& grid, const CheckOptions& opt) {
  require_positive_density(f, *grid);
  const ScalarFn g = [f](const Vec3& x) { return 1.0 / f(x); };
  ConditionVerdict v = sweep_once("gm", *grid, 1, opt,
                                  [&](std::size_t node, const std::vector<double>&,
                                      std::vector<double>& values) {
                                    const auto jet = scalar_jet(g, grid->nodes[node],
                                                                grid->frames[node]);
                                    values[0] = min_eigenvalue(weingarten_of_jet(jet));
                                  });
  v.quantifier = "frame independent";
  return v;
}

ConditionVerdict check_cond_n2(const TensorFn& A, const ScalarFn& f, const GridPtr& grid,
                               int n_dirs, const CheckOptions& opt) {
  require_positive_density(f, *grid);
  const TensorFn af = divided(A, f);
  return sweep("cond_n2", *grid, n_dirs, "frames", opt,
               [&](std::size_t node, const std::vector<double>& angles,
                   std::vector<double>& values) {
                 const TensorJet jet = tensor_jet(af, grid->nodes[node], grid->frames[node]);
                 for (std::size_t k = 0; k < angles.size(); ++k) {
                   const TensorJet r = jet.rotated(angles[k]);
                   double worst = std::numeric_limits<double>::infinity();
                   for (int q = 0; q < 2; ++q)
                     worst = std::min(worst, min_eigenvalue(weingarten_of_jet(r.component(q, q))));
                   values[k] = worst;
                 }
               });
}

Matrix cond_l_matrix(int l, int q, const Matrix& a, std::span<const Matrix> grad_a, double s,
                     const Matrix& hess_s) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n || static_cast<Eigen::Index>(grad_a.size()) != n || hess_s.rows() != n ||
      hess_s.cols() != n)
    throw DimensionError("cond_l_matrix: inconsistent orders");
  if (l < 1 || l >= n || q < 0 || q >= n) throw DomainError("cond_l_matrix: index out of range");
  // g(alpha)_i = derivative of a_{q alpha} along frame vector i.
  auto grad_entry = [&](Eigen::Index alpha) {
    Eigen::VectorXd g(n);
    for (Eigen::Index i = 0; i < n; ++i) g(i) = grad_a[i](q, alpha);
    return g;
  };
  const double aqq = a(q, q);
  const Matrix inv = a.inverse();
  const Eigen::VectorXd gq = grad_entry(q);
  Matrix m = Matrix::Identity(n, n) + hess_s / s + 0.5 * gq * gq.transpose() / (aqq * aqq);
  for (Eigen::Index al = 0; al < l; ++al)
    for (Eigen::Index be = 0; be < l; ++be)
      m -= 0.5 * inv(al, be) * grad_entry(al) * grad_entry(be).transpose() / aqq;
  return 0.5 * (m + m.transpose());
}

ConditionVerdict check_cond_l(const TensorFn& A, const ScalarFn& f, const GridPtr& grid,
                              int frames_per_node, const CheckOptions& opt) {
  require_positive_density(f, *grid);
  const TensorFn af = divided(A, f);
  return sweep("cond_l", *grid, frames_per_node, "frames", opt,
               [&](std::size_t node, const std::vector<double>& angles,
                   std::vector<double>& values) {
                 const Vec3& x = grid->nodes[node];
                 const TensorJet ja = tensor_jet(A, x, grid->frames[node]);
                 const TensorJet js = tensor_jet(af, x, grid->frames[node]);
                 for (std::size_t k = 0; k < angles.size(); ++k) {
                   const TensorJet ra = ja.rotated(angles[k]);
                   const TensorJet rs = js.rotated(angles[k]);
                   const Matrix a = ra.value;
                   const Matrix grads[2] = {ra.grad[0], ra.grad[1]};
                   double worst = std::numeric_limits<double>::infinity();
                   for (int q = 0; q < 2; ++q) {
                     const ScalarJet s = rs.component(q, q);
                     const Matrix m = cond_l_matrix(1, q, a, grads, s.value, s.hess);
                     worst = std::min(worst, psd_margin(m));
                   }
                   values[k] = worst;
                 }
               });
}

double new_form_value(const TensorFn& W, const ScalarFn& f, const Vec3& x, const Vec3& alpha) {
  auto psi = [&](double t) {
    const Vec3 y = geodesic_point(x, alpha, t);
    const Vec3 v = geodesic_velocity(x, alpha, t);
    return v.dot(W(y) * v) / f(y);
  };
  return five_point_d2(psi, 5e-3) + psi(0.0);
}

ConditionVerdict check_new_form_3d(const TensorFn& W, const ScalarFn& f, const GridPtr& grid,
                                   int n_dirs, const CheckOptions& opt) {
  require_positive_density(f, *grid);
  return sweep("new_form_3d", *grid, n_dirs, "directions", opt,
               [&](std::size_t node, const std::vector<double>& angles,
                   std::vector<double>& values) {
                 for (std::size_t k = 0; k < angles.size(); ++k) {
                   const Vec3 alpha = rotate_frame(grid->frames[node], angles[k]).e1;
                   values[k] = new_form_value(W, f, grid->nodes[node], alpha);
                 }
               });
}

ConditionVerdict check_new_form_3d(const BodySpec& h_body, const ScalarFn& f,
                                   const GridPtr& grid, int n_dirs, const CheckOptions& opt) {
  return check_new_form_3d(weingarten_fn(h_body), f, grid, n_dirs, opt);
}

TensorFn convexity_tensor(const TensorFn& W, const ScalarFn& f) { return divided(W, f); }

namespace {

struct ConvexitySample {
  std::size_t node;
  Vec3 v;
  Vec3 xi;
};

ConvexitySample convexity_sample(std::uint64_t seed, std::size_t j, std::size_t n_nodes) {
  auto g = stream(seed, j, 0x6d63u);
  ConvexitySample s;
  s.node = j % n_nodes;
  s.v = unit_vector(g);
  s.xi = unit_vector(g);
  return s;
}

template <class Value>
ConditionVerdict convexity_sweep(const std::string& name, const TensorFn& M,
                                 const GridPtr& grid, int n_samples, const CheckOptions& opt,
                                 Value value) {
  auto ext = [&](const Vec3& p) -> Mat3 {
    const double r = p.norm();
    return r * M(p / r);
  };
  constexpr double steps[2] = {1e-2, 1e-3};
  std::vector<NodeResult> per_sample(n_samples);
  parallel_for(per_sample.size(), opt.threads, [&](std::size_t j) {
    const auto s = convexity_sample(opt.seed, j, grid->size());
    const Vec3& p = grid->nodes[s.node];
    const Mat3 mid = ext(p);
    std::vector<double> values;
    for (double h : steps) {
      const Mat3 d = (ext(p + h * s.v) + ext(p - h * s.v) - 2.0 * mid) / (h * h);
      values.push_back(value(0.5 * (d + d.transpose()), s.xi));
    }
    per_sample[j] = reduce(values);
  });
  ConditionVerdict v;
  v.name = name;
  v.tol = opt.tol;
  v.margin = std::numeric_limits<double>::infinity();
  for (const auto& r : per_sample) v.margin = std::min(v.margin, r.value);
  for (std::size_t j = 0; j < per_sample.size(); ++j)
    if (within_tie(per_sample[j].value, v.margin)) {
      const auto s = convexity_sample(opt.seed, j, grid->size());
      v.witness_node = s.node;
      v.witness_frame = per_sample[j].frame;
      v.witness_direction = s.v;
      break;
    }
  v.samples = per_sample.size() * 2;
  v.pass = v.margin >= -opt.tol;
  v.quantifier = std::to_string(n_samples) + " sampled (point, direction) pairs, steps 1e-2 and 1e-3";
  return v;
}

}  // namespace

ConditionVerdict check_matrix_convexity(const TensorFn& M, const GridPtr& grid, int n_samples,
                                        const CheckOptions& opt) {
  return convexity_sweep("matrix_convexity", M, grid, n_samples, opt,
                         [](const Mat3& d, const Vec3&) { return psd_margin(d); });
}

ConditionVerdict check_diagonal_convexity(const TensorFn& M, const GridPtr& grid, int n_samples,
                                          const CheckOptions& opt) {
  return convexity_sweep("diagonal_convexity", M, grid, n_samples, opt,
                         [](const Mat3& d, const Vec3& xi) { return xi.dot(d * xi); });
}

PerturbationVerdict check_perturbation_bound(double C, const SphericalField& psi,
                                             const GridPtr& grid, const CheckOptions& opt) {
  if (!(C > 0.0)) throw DomainError("perturbation constant C must be positive");
  if (!psi.has_coeffs()) throw DomainError("perturbation needs harmonic coefficients");
  PerturbationVerdict out;
  out.c4_norm = c4_norm_estimate(psi.coeffs(), psi.degree(), *grid);
  out.bound.name = "perturbation_bound";
  out.bound.tol = 0.0;
  out.bound.margin = 0.25 * C - out.c4_norm;
  out.bound.pass = out.bound.margin > 0.0;
  out.bound.samples = grid->size() * 64;
  out.bound.quantifier = "64 great circles per node";

  HarmonicPerturbation body{C, psi.degree(), std::vector<double>(psi.coeffs().begin(),
                                                                 psi.coeffs().end())};
  const ScalarFn one = [](const Vec3&) { return 1.0; };
  out.new_form = check_new_form_3d(BodySpec(body), one, grid, 64, opt);
  out.implication_holds = !out.bound.pass || out.new_form.pass;
  return out;
}

}  // namespace mixcf
