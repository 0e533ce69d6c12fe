#include "mixcf/elliptic.hpp"

#include <Eigen/QR>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "mixcf/error.hpp"
#include "mixcf/kernels.hpp"
#include "mixcf/mixed_algebra.hpp"
#include "mixcf/parallel.hpp"

namespace mixcf {

namespace {

void require_same_grid(const FramedGrid& a, const FramedGrid& b, const char* what) {
  if (a.n_theta != b.n_theta || a.n_phi != b.n_phi)
    throw DimensionError(std::string(what) + " lives on a different grid");
}

}  // namespace

EllipticityMargin ellipticity_margin(const SymTensorField& A) {
  EllipticityMargin out{std::numeric_limits<double>::infinity(), 0};
  for (std::size_t k = 0; k < A.size(); ++k) {
    const double m = psd_margin(A.at(k));
    if (m < out.margin) out = {m, k};
  }
  return out;
}

EllipticityMargin require_elliptic(const SymTensorField& A) {
  const auto m = ellipticity_margin(A);
  if (!(m.margin > 0.0)) throw EllipticityError(m.node, m.margin);
  return m;
}

SphericalField operator_apply(const SymTensorField& A, const SphericalField& u,
                              const GridPtr& grid) {
  require_same_grid(A.grid(), *grid, "coefficient tensor");
  require_elliptic(A);
  if (!u.has_coeffs()) throw DomainError("operator_apply needs u in harmonic coefficients");
  const SymTensorField w = sh_weingarten(u.coeffs(), u.degree(), grid);
  std::vector<double> out(grid->size());
  kernels::active().contract_sym2(A.xx().data(), A.xy().data(), A.yy().data(), w.xx().data(),
                                  w.xy().data(), w.yy().data(), out.data(), out.size());
  return SphericalField::from_values(grid, std::move(out));
}

CompatibilityResult check_compatibility(const SphericalField& f, const GridPtr& grid, double tol) {
  require_same_grid(f.grid(), *grid, "density");
  CompatibilityResult r;
  const auto values = f.values();
  for (std::size_t k = 0; k < grid->size(); ++k) {
    r.moments += grid->weights[k] * values[k] * grid->nodes[k];
    r.scale += grid->weights[k] * std::abs(values[k]);
  }
  r.pass = r.moments.cwiseAbs().maxCoeff() <= tol * r.scale;
  return r;
}

int default_threads() {
  if (const char* env = std::getenv("MIXCF_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return 1;
}

SphericalField SolveReport::solution(const GridPtr& grid) const {
  return SphericalField::from_coeffs(grid, L_max, u_coeffs);
}

namespace {

struct Unknown {
  int l, m;
};

// Column of the weighted design matrix for one basis harmonic.
void assemble_column(const SymTensorField& A, const std::vector<LegendreTable>& tables,
                     const Unknown& u, double* out) {
  const FramedGrid& g = A.grid();
  const auto& k = kernels::active();
  const std::size_t nphi = g.n_phi;
  const int am = std::abs(u.m);
  const double bf = branch_factor(am);
  for (int i = 0; i < g.n_theta; ++i) {
    const auto f = weingarten_factors(tables[i], u.l, am, g.cos_theta[i], g.sin_theta[i]);
    const std::size_t off = i * nphi;
    const double scale = bf * std::sqrt(g.ring_weight[i]);
    // T = cos(m phi) has T' = -m sin(m phi); T = sin(m phi) has T' = m cos(m phi).
    const double* t = u.m >= 0 ? g.cos_row(am) : g.sin_row(am);
    const double* tp = u.m >= 0 ? g.sin_row(am) : g.cos_row(am);
    const double c12 = (u.m >= 0 ? -am : am) * f.beta;
    k.ring_column(A.xx().data() + off, A.xy().data() + off, A.yy().data() + off, t, tp, f.alpha,
                  c12, f.gamma, scale, out + off, nphi);
  }
}

}  // namespace

SolveReport solve(const SymTensorField& A, const SphericalField& f, const GridPtr& grid,
                  const SolveOptions& opt) {
  require_same_grid(A.grid(), *grid, "coefficient tensor");
  require_same_grid(f.grid(), *grid, "density");
  if (opt.L_max < 2) throw ConfigurationError("L_max must be at least 2");
  if (opt.L_max > grid->resolvable_degree())
    throw AliasingError("L_max " + std::to_string(opt.L_max) + " exceeds the degree a " +
                        std::to_string(grid->n_theta) + "x" + std::to_string(grid->n_phi) +
                        " grid resolves (" + std::to_string(grid->resolvable_degree()) + ")");

  const auto compat = check_compatibility(f, grid, opt.compat_tol);
  if (!compat.pass)
    throw CompatibilityError("density has nonzero first moments (" +
                             std::to_string(compat.moments.x()) + ", " +
                             std::to_string(compat.moments.y()) + ", " +
                             std::to_string(compat.moments.z()) + ")");
  const auto ell = require_elliptic(A);

  std::vector<Unknown> unknowns{{0, 0}};
  for (int l = 2; l <= opt.L_max; ++l)
    for (int m = -l; m <= l; ++m) unknowns.push_back({l, m});

  std::vector<LegendreTable> tables;
  tables.reserve(grid->n_theta);
  for (int i = 0; i < grid->n_theta; ++i) tables.emplace_back(opt.L_max, grid->theta[i]);

  const Eigen::Index rows = static_cast<Eigen::Index>(grid->size());
  const Eigen::Index cols = static_cast<Eigen::Index>(unknowns.size());
  Matrix B(rows, cols);
  parallel_for(unknowns.size(), opt.threads, [&](std::size_t c) {
    assemble_column(A, tables, unknowns[c], B.col(static_cast<Eigen::Index>(c)).data());
  });

  SolveReport report;
  report.L_max = opt.L_max;
  report.compat_moments = compat.moments;
  report.ellipticity_margin = ell.margin;
  report.ellipticity_node = ell.node;

  Eigen::VectorXd norms = B.colwise().norm();
  const double largest = norms.maxCoeff();
  std::vector<Eigen::Index> kept;
  for (Eigen::Index c = 0; c < cols; ++c) {
    if (norms(c) > opt.null_column_tol * largest)
      kept.push_back(c);
    else
      report.null_columns.push_back(sh_index(unknowns[c].l, unknowns[c].m));
  }
  Matrix Bk(rows, static_cast<Eigen::Index>(kept.size()));
  for (std::size_t j = 0; j < kept.size(); ++j) Bk.col(j) = B.col(kept[j]);

  Eigen::VectorXd b(rows);
  const auto fv = f.values();
  for (Eigen::Index r = 0; r < rows; ++r) b(r) = std::sqrt(grid->weights[r]) * fv[r];

  Eigen::ColPivHouseholderQR<Matrix> qr(Bk);
  qr.setThreshold(opt.rank_tol);
  if (qr.rank() < Bk.cols())
    throw ConditioningError("collocation matrix has rank " + std::to_string(qr.rank()) + " < " +
                            std::to_string(Bk.cols()) + " unknowns");
  const Eigen::VectorXd x = qr.solve(b);

  report.unknowns = kept.size();
  report.u_coeffs.assign(sh_count(opt.L_max), 0.0);
  for (std::size_t j = 0; j < kept.size(); ++j) {
    const auto& u = unknowns[kept[j]];
    report.u_coeffs[sh_index(u.l, u.m)] = x(static_cast<Eigen::Index>(j));
  }
  report.residual_l2 = (Bk * x - b).norm();
  report.f_l2 = b.norm();
  if (!std::isfinite(report.residual_l2) || report.residual_l2 > opt.residual_tol * report.f_l2)
    throw NonConvergenceError(report.residual_l2, opt.residual_tol * report.f_l2);

  const SymTensorField w = sh_weingarten(report.u_coeffs, opt.L_max, grid);
  report.w_min_eig = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < w.size(); ++k)
    report.w_min_eig = std::min(report.w_min_eig, min_eigenvalue(w.at(k)));
  return report;
}

}  // namespace mixcf
