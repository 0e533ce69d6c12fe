#include "mixcf/runner.hpp"

#include <algorithm>
#include <cmath>

#include "mixcf/conditions.hpp"
#include "mixcf/diagnostics.hpp"
#include "mixcf/elliptic.hpp"
#include "mixcf/error.hpp"
#include "mixcf/kernels.hpp"

namespace mixcf {

namespace {

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json error_json(const Error& e) {
  json j{{"kind", e.kind()}, {"message", e.what()}};
  if (const auto* ell = dynamic_cast<const EllipticityError*>(&e)) {
    j["node"] = ell->node();
    j["margin"] = ell->margin();
  }
  if (const auto* nc = dynamic_cast<const NonConvergenceError*>(&e)) j["residual"] = nc->residual();
  return j;
}

json node_json(std::size_t node, const FramedGrid& grid) {
  return {{"node", node},
          {"theta", grid.theta[node / grid.n_phi]},
          {"phi", grid.phi[node % grid.n_phi]}};
}

json header(const std::string& command, const ExperimentConfig& cfg) {
  json bodies = json::array();
  for (const auto& b : cfg.bodies) bodies.push_back(to_json(b));
  return {{"command", command},
          {"grid", {{"n_theta", cfg.n_theta}, {"n_phi", cfg.n_phi}}},
          {"L_max", cfg.L_max},
          {"seed", cfg.seed},
          {"bodies", bodies},
          {"isa", kernels::isa_name(kernels::active().isa)}};
}

RunResult failure(json report, const Error& e) {
  report["status"] = "error";
  report["error"] = error_json(e);
  return {kExitInput, std::move(report), {}};
}

void require_bodies(const ExperimentConfig& cfg, std::size_t n, const char* command) {
  if (cfg.bodies.size() != n)
    throw ConfigurationError(std::string(command) + " expects " + std::to_string(n) +
                             " bodies on S^2, got " + std::to_string(cfg.bodies.size()));
}

// Non-C^2+ bodies are rejected with the node where W loses definiteness.
void require_c2plus(const ExperimentConfig& cfg, const GridPtr& grid, json& report) {
  json list = json::array();
  for (std::size_t i = 0; i < cfg.bodies.size(); ++i) {
    const auto c = is_c2plus(cfg.bodies[i], grid);
    json entry{{"body", i}, {"c2plus", c.ok}, {"min_eig", c.min_eig}};
    entry["witness"] = node_json(c.node, *grid);
    list.push_back(entry);
    if (!c.ok) {
      report["bodies_c2plus"] = list;
      throw GeometryError("body " + std::to_string(i) + " (" + cfg.bodies[i].name() +
                          ") is not C^2+: min eigenvalue of W is " + std::to_string(c.min_eig));
    }
  }
  report["bodies_c2plus"] = list;
}

const DensitySpec& require_density(const ExperimentConfig& cfg) {
  if (!cfg.density) throw ConfigurationError("config needs a density \"f\"");
  return *cfg.density;
}

CheckOptions check_options(const ExperimentConfig& cfg) {
  CheckOptions o;
  o.tol = cfg.tol.psd;
  o.seed = cfg.seed;
  o.threads = default_threads();
  return o;
}

std::vector<std::string> selected_checks(const ExperimentConfig& cfg, bool all_applicable) {
  if (!cfg.checks.empty() || !all_applicable) return cfg.checks;
  std::vector<std::string> names{"gm", "cond_n2", "cond_l", "new_form_3d", "matrix_convexity"};
  if (std::holds_alternative<HarmonicPerturbation>(cfg.bodies.at(0).variant()))
    names.push_back("perturbation_bound");
  return names;
}

// Runs the named checkers for the single body and density; fills `out` and
// returns whether all passed.
bool run_checks(const ExperimentConfig& cfg, const std::vector<std::string>& names,
                const GridPtr& grid, const ScalarFn& f, json& out) {
  const BodySpec& body = cfg.bodies.at(0);
  const CheckOptions opt = check_options(cfg);
  const TensorFn A = coefficient_fn(body);
  out = json::array();
  bool all = true;
  std::optional<ConditionVerdict> new_form;
  auto get_new_form = [&]() -> const ConditionVerdict& {
    if (!new_form) new_form = check_new_form_3d(body, f, grid, cfg.sampling.n_dirs, opt);
    return *new_form;
  };
  for (const auto& name : names) {
    json entry;
    if (name == "gm") {
      entry = to_json(check_gm(f, grid, opt), *grid);
    } else if (name == "cond_n2") {
      entry = to_json(check_cond_n2(A, f, grid, cfg.sampling.n_dirs, opt), *grid);
    } else if (name == "cond_l") {
      entry = to_json(check_cond_l(A, f, grid, cfg.sampling.frames_per_node, opt), *grid);
    } else if (name == "new_form_3d") {
      entry = to_json(get_new_form(), *grid);
    } else if (name == "matrix_convexity") {
      const auto v = check_matrix_convexity(convexity_tensor(weingarten_fn(body), f), grid,
                                            cfg.sampling.n_samples, opt);
      entry = to_json(v, *grid);
      const auto& nf = get_new_form();
      entry["implies_new_form_3d"] = {{"new_form_3d_pass", nf.pass},
                                      {"consistent", !v.pass || nf.pass}};
    } else if (name == "perturbation_bound") {
      const auto* h = std::get_if<HarmonicPerturbation>(&body.variant());
      if (h == nullptr) {
        out.push_back({{"name", name}, {"skipped", "body is not a harmonic perturbation"}});
        continue;
      }
      const auto psi = SphericalField::from_coeffs(grid, h->degree, h->psi);
      const auto pv = check_perturbation_bound(h->C, psi, grid, opt);
      entry = to_json(pv.bound, *grid);
      entry["c4_norm"] = pv.c4_norm;
      entry["new_form_3d"] = to_json(pv.new_form, *grid);
      entry["implication_holds"] = pv.implication_holds;
    }
    all = all && entry.at("pass").get<bool>();
    out.push_back(entry);
  }
  return all;
}

double weighted_norm(std::span<const double> v, const FramedGrid& grid) {
  double s = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) s += grid.weights[k] * v[k] * v[k];
  return std::sqrt(s);
}

// Shared tail of solve, roundtrip and report: conditions, solve, diagnostics.
RunResult solve_pipeline(const ExperimentConfig& cfg,
                         const GridPtr& grid, const SymTensorField& A, const SphericalField& f,
                         const ScalarFn& f_fn, bool all_checks, json report) {
  const auto compat = check_compatibility(f, grid, cfg.tol.compat);
  report["compatibility"] = {{"moments", vec_json(compat.moments)},
                             {"scale", compat.scale},
                             {"pass", compat.pass}};
  if (!compat.pass)
    return failure(std::move(report),
                   CompatibilityError("density violates the first-moment condition"));
  const auto ell = ellipticity_margin(A);
  report["ellipticity"] = {{"margin", ell.margin}, {"witness", node_json(ell.node, *grid)}};

  json verdicts = json::array();
  bool conditions_ok = true;
  const auto names = selected_checks(cfg, all_checks);
  if (!names.empty()) conditions_ok = run_checks(cfg, names, grid, f_fn, verdicts);
  report["conditions"] = verdicts;

  SolveOptions opt;
  opt.L_max = cfg.L_max;
  opt.residual_tol = cfg.tol.residual;
  opt.compat_tol = cfg.tol.compat;
  opt.threads = default_threads();
  SolveReport sr;
  try {
    sr = solve(A, f, grid, opt);
  } catch (const Error& e) {
    return failure(std::move(report), e);
  }
  const SphericalField u = sr.solution(grid);
  const SymTensorField w = u.weingarten();
  const double tau = cfg.tol.rank > 0.0 ? cfg.tol.rank : default_rank_threshold(w);
  const RankProfile rp = rank_profile(w, std::max(tau, 1e-300));

  std::vector<double> diff(grid->size());
  const auto recovered = recovered_density(std::span(cfg.bodies.data(), 1), u, grid);
  for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = recovered.value(k) - f.value(k);

  report["solve"] = {{"u_coeffs", sr.u_coeffs},
                     {"residual_l2", sr.residual_l2},
                     {"f_l2", sr.f_l2},
                     {"unknowns", sr.unknowns},
                     {"null_columns", sr.null_columns},
                     {"w_min_eig", sr.w_min_eig}};
  json ranks = json::array();
  for (auto c : rp.histogram) ranks.push_back(c);
  report["rank_profile"] = {{"tau", rp.tau},
                            {"min_eig", rp.min_eig},
                            {"witness", node_json(rp.min_node, *grid)},
                            {"rank_histogram", ranks},
                            {"l", rp.l},
                            {"phi_applicable", rp.phi_applicable}};
  report["density"] = {{"recovered_rel_error", weighted_norm(diff, *grid) / weighted_norm(f.values(), *grid)},
                       {"moments", vec_json(density_moments(recovered, grid))}};

  RunResult result;
  result.csv = eigen_csv(rp, *grid);
  const bool geometric = sr.w_min_eig > 0.0;
  report["geometric"] = geometric;
  report["conditions_pass"] = conditions_ok;
  report["status"] = geometric ? "ok" : (conditions_ok ? "not_geometric" : "condition_failed");
  result.exit_code = geometric ? kExitOk : (conditions_ok ? kExitNotGeometric : kExitCondition);
  result.report = std::move(report);
  return result;
}

template <class Fn>
RunResult guarded(const std::string& command, const ExperimentConfig& cfg, Fn fn) {
  json report = header(command, cfg);
  try {
    return fn(report);
  } catch (const Error& e) {
    return failure(std::move(report), e);
  }
}

}  // namespace

json to_json(const ConditionVerdict& v, const FramedGrid& grid) {
  json j{{"name", v.name},   {"pass", v.pass},       {"margin", v.margin},
         {"tol", v.tol},     {"samples", v.samples}, {"quantifier", v.quantifier},
         {"resampled", v.resampled}};
  json w = node_json(v.witness_node, grid);
  w["frame"] = v.witness_frame;
  w["direction"] = vec_json(v.witness_direction);
  j["witness"] = w;
  return j;
}

RunResult cmd_measure(const ExperimentConfig& cfg) {
  return guarded("measure", cfg, [&](json& report) {
    require_bodies(cfg, 2, "measure");
    const GridPtr grid = build_grid(cfg.n_theta, cfg.n_phi);
    require_c2plus(cfg, grid, report);
    const SymTensorField w0 = weingarten_form(cfg.bodies[0], grid);
    const SymTensorField w1 = weingarten_form(cfg.bodies[1], grid);
    std::vector<double> density(grid->size());
    for (std::size_t k = 0; k < grid->size(); ++k) {
      const Matrix m0 = w0.at(k);
      density[k] = christoffel_cofactor(std::span<const Matrix>(&m0, 1)).cwiseProduct(w1.at(k)).sum();
    }
    const auto field = SphericalField::from_values(grid, density);
    const Vec3 moments = density_moments(field, grid);
    const double total = quadrature(field, *grid);
    const auto pairing =
        mixed_volume_pairing(std::span(cfg.bodies.data(), 1), cfg.bodies[1], cfg.bodies[0], grid);
    report["density"] = {{"integral", total},
                         {"min", *std::min_element(density.begin(), density.end())},
                         {"max", *std::max_element(density.begin(), density.end())},
                         {"moments", vec_json(moments)},
                         {"moments_relative", moments.cwiseAbs().maxCoeff() / std::abs(total)}};
    report["pairing"] = {{"I1", pairing.I1},
                         {"I2", pairing.I2},
                         {"residual", pairing.residual},
                         {"relative", pairing.relative()}};
    report["status"] = "ok";
    return RunResult{kExitOk, report, field_csv(density, *grid)};
  });
}

RunResult cmd_check(const ExperimentConfig& cfg) {
  return guarded("check", cfg, [&](json& report) {
    require_bodies(cfg, 1, "check");
    const GridPtr grid = build_grid(cfg.n_theta, cfg.n_phi);
    const ScalarFn f = require_density(cfg).function();
    json verdicts;
    const bool ok = run_checks(cfg, selected_checks(cfg, true), grid, f, verdicts);
    report["conditions"] = verdicts;
    report["conditions_pass"] = ok;
    report["status"] = ok ? "ok" : "condition_failed";
    return RunResult{ok ? kExitOk : kExitCondition, report, {}};
  });
}

RunResult cmd_solve(const ExperimentConfig& cfg) {
  return guarded("solve", cfg, [&](json& report) {
    require_bodies(cfg, 1, "solve");
    const GridPtr grid = build_grid(cfg.n_theta, cfg.n_phi);
    require_c2plus(cfg, grid, report);
    const DensitySpec& d = require_density(cfg);
    const SymTensorField A = coefficient_field(cfg.bodies[0], grid);
    return solve_pipeline(cfg, grid, A, d.field(grid), d.function(), false, report);
  });
}

RunResult cmd_report(const ExperimentConfig& cfg) {
  return guarded("report", cfg, [&](json& report) {
    require_bodies(cfg, 1, "report");
    const GridPtr grid = build_grid(cfg.n_theta, cfg.n_phi);
    require_c2plus(cfg, grid, report);
    const DensitySpec& d = require_density(cfg);
    const SymTensorField A = coefficient_field(cfg.bodies[0], grid);
    json mink = json::array();
    for (int l = 0; l <= 1; ++l) {
      const auto m = minkowski_identity_check(cfg.bodies[0], l, grid);
      mink.push_back({{"l", l}, {"constant", m.calibrated_constant}, {"residual", m.residual}});
    }
    report["minkowski_identity"] = mink;
    report["codazzi_residual"] = codazzi_residual(cfg.bodies[0], grid);
    return solve_pipeline(cfg, grid, A, d.field(grid), d.function(), true, report);
  });
}

RunResult cmd_roundtrip(const ExperimentConfig& cfg) {
  return guarded("roundtrip", cfg, [&](json& report) {
    require_bodies(cfg, 1, "roundtrip");
    if (!cfg.target) throw ConfigurationError("roundtrip needs a \"target\" support function");
    const GridPtr grid = build_grid(cfg.n_theta, cfg.n_phi);
    require_c2plus(cfg, grid, report);
    const SymTensorField A = coefficient_field(cfg.bodies[0], grid);

    // Steiner normalization of the target: its degree-1 part is invisible to W.
    std::vector<double> target = cfg.target->coeffs();
    const int target_degree = cfg.target->degree();
    for (int m = -1; m <= 1 && target_degree >= 1; ++m) target[sh_index(1, m)] = 0.0;
    const auto u_star = SphericalField::from_coeffs(grid, target_degree, target);
    const SphericalField f = operator_apply(A, u_star, grid);
    // f is known on the grid only, so the condition checkers do not apply.
    if (!cfg.checks.empty())
      throw ConfigurationError("roundtrip runs no condition checks; use check or solve");
    RunResult r = solve_pipeline(cfg, grid, A, f, {}, false, report);
    if (!r.report.contains("solve")) return r;

    const auto u = r.report["solve"]["u_coeffs"].get<std::vector<double>>();
    const int degree = std::max(cfg.L_max, target_degree);
    double err = 0.0, ref = 0.0;
    for (int k = 0; k < sh_count(degree); ++k) {
      const double a = k < static_cast<int>(u.size()) ? u[k] : 0.0;
      const double b = k < static_cast<int>(target.size()) ? target[k] : 0.0;
      err += (a - b) * (a - b);
      ref += b * b;
    }
    r.report["roundtrip"] = {{"rel_l2_error", std::sqrt(err / ref)}};
    return r;
  });
}

RunResult run_command(const std::string& command, const json& config_doc) {
  ExperimentConfig cfg;
  try {
    cfg = parse_config(config_doc);
  } catch (const Error& e) {
    json report{{"command", command}, {"status", "error"}, {"error", error_json(e)}};
    return {kExitInput, report, {}};
  }
  if (command == "measure") return cmd_measure(cfg);
  if (command == "solve") return cmd_solve(cfg);
  if (command == "check") return cmd_check(cfg);
  if (command == "roundtrip") return cmd_roundtrip(cfg);
  if (command == "report") return cmd_report(cfg);
  json report{{"command", command},
              {"status", "error"},
              {"error", {{"kind", "configuration"}, {"message", "unknown command"}}}};
  return {kExitInput, report, {}};
}

}  // namespace mixcf
