#include "mixcf/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string_view>

#include "mixcf/error.hpp"

namespace mixcf {

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  throw ConfigurationError(where + ": " + what);
}

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) bad(where, "expected an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& item : j.items())
    if (!allowed.count(item.key())) bad(where, "unknown key '" + item.key() + "'");
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) bad(where, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) bad(where, "not finite");
  return v;
}

double number_or(const json& j, const char* key, double fallback, const std::string& where) {
  return j.contains(key) ? number(j.at(key), where + "." + key) : fallback;
}

int integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) bad(where, "expected an integer");
  return j.get<int>();
}

int integer_or(const json& j, const char* key, int fallback, const std::string& where) {
  return j.contains(key) ? integer(j.at(key), where + "." + key) : fallback;
}

double positive(double v, const std::string& where) {
  if (!(v > 0.0)) bad(where, "must be positive");
  return v;
}

Vec3 vec3(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) bad(where, "expected an array of 3 numbers");
  return {number(j[0], where + "[0]"), number(j[1], where + "[1]"), number(j[2], where + "[2]")};
}

std::string text(const json& j, const std::string& where) {
  if (!j.is_string()) bad(where, "expected a string");
  return j.get<std::string>();
}

BodySpec parse_body_at(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("type")) bad(where, "body needs a \"type\"");
  const std::string type = text(j.at("type"), where + ".type");
  try {
    if (type == "ball") {
      only_keys(j, where, {"type", "r"});
      return Ball{number_or(j, "r", 1.0, where)};
    }
    if (type == "translated_ball") {
      only_keys(j, where, {"type", "r", "v"});
      return TranslatedBall{number_or(j, "r", 1.0, where),
                            j.contains("v") ? vec3(j.at("v"), where + ".v") : Vec3::Zero()};
    }
    if (type == "ellipsoid") {
      only_keys(j, where, {"type", "semiaxes"});
      if (!j.contains("semiaxes")) bad(where, "ellipsoid needs \"semiaxes\"");
      return Ellipsoid{vec3(j.at("semiaxes"), where + ".semiaxes")};
    }
    if (type == "harmonic_perturbation") {
      only_keys(j, where, {"type", "C", "psi"});
      if (!j.contains("psi")) bad(where, "harmonic_perturbation needs \"psi\"");
      const HarmonicSpec psi = parse_harmonic(j.at("psi"));
      if (psi.constant != 0.0) bad(where + ".psi", "psi must not have a constant part");
      return HarmonicPerturbation{number_or(j, "C", 1.0, where), psi.degree(), psi.coeffs()};
    }
    if (type == "minkowski_sum") {
      only_keys(j, where, {"type", "terms"});
      if (!j.contains("terms") || !j.at("terms").is_array()) bad(where, "needs a \"terms\" array");
      MinkowskiSum sum;
      for (std::size_t i = 0; i < j.at("terms").size(); ++i) {
        const json& t = j.at("terms")[i];
        const std::string w = where + ".terms[" + std::to_string(i) + "]";
        only_keys(t, w, {"weight", "body"});
        if (!t.contains("body")) bad(w, "needs a \"body\"");
        sum.terms.push_back({parse_body_at(t.at("body"), w + ".body"), number_or(t, "weight", 1.0, w)});
      }
      return sum;
    }
  } catch (const ConfigurationError& e) {
    if (std::string_view(e.what()).starts_with(where)) throw;
    bad(where, e.what());
  } catch (const Error& e) {
    bad(where, e.what());
  }
  bad(where, "unknown body type '" + type + "'");
}

HarmonicSpec parse_harmonic_at(const json& j, const std::string& where) {
  only_keys(j, where, {"constant", "coeffs", "legendre"});
  HarmonicSpec h;
  h.constant = number_or(j, "constant", 0.0, where);
  if (j.contains("coeffs")) {
    const json& c = j.at("coeffs");
    if (!c.is_array()) bad(where + ".coeffs", "expected an array");
    for (std::size_t i = 0; i < c.size(); ++i) {
      const std::string w = where + ".coeffs[" + std::to_string(i) + "]";
      only_keys(c[i], w, {"l", "m", "value"});
      HarmonicSpec::Term t{integer_or(c[i], "l", -1, w), integer_or(c[i], "m", 0, w),
                           number_or(c[i], "value", 0.0, w)};
      if (t.l < 0 || std::abs(t.m) > t.l) bad(w, "needs 0 <= l and |m| <= l");
      h.terms.push_back(t);
    }
  }
  if (j.contains("legendre")) {
    const json& c = j.at("legendre");
    if (!c.is_array()) bad(where + ".legendre", "expected an array");
    for (std::size_t i = 0; i < c.size(); ++i)
      h.legendre.push_back(number(c[i], where + ".legendre[" + std::to_string(i) + "]"));
  }
  return h;
}

DensitySpec parse_density_at(const json& j, const std::string& where) {
  if (j.is_number()) {
    DensitySpec d;
    d.value = positive(number(j, where), where);
    return d;
  }
  if (!j.is_object() || !j.contains("type")) bad(where, "density needs a \"type\"");
  const std::string type = text(j.at("type"), where + ".type");
  DensitySpec d;
  if (type == "constant") {
    only_keys(j, where, {"type", "value"});
    d.kind = DensitySpec::Kind::Constant;
    d.value = positive(number_or(j, "value", 1.0, where), where + ".value");
  } else if (type == "harmonic" || type == "reciprocal_harmonic") {
    only_keys(j, where, {"type", "constant", "coeffs", "legendre"});
    json rest = j;
    rest.erase("type");
    d.kind = type == "harmonic" ? DensitySpec::Kind::Harmonic
                                : DensitySpec::Kind::ReciprocalHarmonic;
    d.harmonic = parse_harmonic_at(rest, where);
  } else if (type == "reciprocal_linear") {
    only_keys(j, where, {"type", "a", "v"});
    d.kind = DensitySpec::Kind::ReciprocalLinear;
    d.a = number_or(j, "a", 1.0, where);
    d.v = j.contains("v") ? vec3(j.at("v"), where + ".v") : Vec3::Zero();
    if (!(d.a > d.v.norm())) bad(where, "reciprocal_linear needs a > |v|");
  } else {
    bad(where, "unknown density type '" + type + "'");
  }
  return d;
}

}  // namespace

int HarmonicSpec::degree() const {
  int d = legendre.empty() ? 0 : static_cast<int>(legendre.size()) - 1;
  for (const auto& t : terms) d = std::max(d, t.l);
  return d;
}

std::vector<double> HarmonicSpec::coeffs() const {
  std::vector<double> c(sh_count(degree()), 0.0);
  c[0] += constant * std::sqrt(4.0 * kPi);
  for (const auto& t : terms) c[sh_index(t.l, t.m)] += t.value;
  for (std::size_t k = 0; k < legendre.size(); ++k) {
    const int l = static_cast<int>(k);
    c[sh_index(l, 0)] += legendre[k] * std::sqrt(4.0 * kPi / (2.0 * l + 1.0));
  }
  return c;
}

ScalarFn DensitySpec::function() const {
  switch (kind) {
    case Kind::Constant:
      return [c = value](const Vec3&) { return c; };
    case Kind::Harmonic:
      return [c = harmonic.coeffs(), d = harmonic.degree()](const Vec3& x) {
        return sh_evaluate(c, d, x);
      };
    case Kind::ReciprocalHarmonic:
      return [c = harmonic.coeffs(), d = harmonic.degree()](const Vec3& x) {
        return 1.0 / sh_evaluate(c, d, x);
      };
    case Kind::ReciprocalLinear:
      return [a = a, v = v](const Vec3& x) { return 1.0 / (a + v.dot(x)); };
  }
  return {};
}

SphericalField DensitySpec::field(const GridPtr& grid) const {
  if (kind == Kind::Harmonic)
    return SphericalField::from_coeffs(grid, harmonic.degree(), harmonic.coeffs());
  if (kind == Kind::Constant)
    return SphericalField::from_coeffs(grid, 0, {value * std::sqrt(4.0 * kPi)});
  return SphericalField::sample(grid, function());
}

const std::vector<std::string>& known_checks() {
  static const std::vector<std::string> names{"gm",          "cond_n2",          "cond_l",
                                              "new_form_3d", "matrix_convexity", "perturbation_bound"};
  return names;
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) bad("--set", "expected key.path=value, got '" + assignment + "'");
  const std::string path = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;

  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) bad("--set", "empty path segment in '" + path + "'");
    json* next = nullptr;
    if (node->is_array()) {
      if (key.find_first_not_of("0123456789") != std::string::npos)
        bad("--set", "'" + key + "' is not an array index");
      const std::size_t idx = std::stoul(key);
      if (idx >= node->size()) bad("--set", "index " + key + " out of range in '" + path + "'");
      next = &(*node)[idx];
    } else {
      if (node->is_null()) *node = json::object();
      if (!node->is_object()) bad("--set", "cannot descend into '" + key + "' of '" + path + "'");
      next = &(*node)[key];
    }
    if (dot == std::string::npos) {
      *next = value;
      return;
    }
    node = next;
    start = dot + 1;
  }
}

BodySpec parse_body(const json& j) { return parse_body_at(j, "body"); }
HarmonicSpec parse_harmonic(const json& j) { return parse_harmonic_at(j, "harmonic"); }
DensitySpec parse_density(const json& j) { return parse_density_at(j, "f"); }

ExperimentConfig parse_config(const json& doc) {
  only_keys(doc, "config",
            {"bodies", "f", "target", "grid", "L_max", "tolerances", "checks", "seed", "sampling"});
  ExperimentConfig c;
  if (doc.contains("bodies")) {
    const json& b = doc.at("bodies");
    if (!b.is_array()) bad("bodies", "expected an array");
    for (std::size_t i = 0; i < b.size(); ++i)
      c.bodies.push_back(parse_body_at(b[i], "bodies[" + std::to_string(i) + "]"));
  }
  if (doc.contains("f")) c.density = parse_density_at(doc.at("f"), "f");
  if (doc.contains("target")) c.target = parse_harmonic_at(doc.at("target"), "target");
  if (doc.contains("grid")) {
    const json& g = doc.at("grid");
    only_keys(g, "grid", {"n_theta", "n_phi"});
    c.n_theta = integer_or(g, "n_theta", c.n_theta, "grid");
    c.n_phi = integer_or(g, "n_phi", c.n_phi, "grid");
  }
  c.L_max = integer_or(doc, "L_max", c.L_max, "config");
  if (doc.contains("tolerances")) {
    const json& t = doc.at("tolerances");
    only_keys(t, "tolerances", {"compat", "residual", "psd", "rank"});
    c.tol.compat = positive(number_or(t, "compat", c.tol.compat, "tolerances"), "tolerances.compat");
    c.tol.residual =
        positive(number_or(t, "residual", c.tol.residual, "tolerances"), "tolerances.residual");
    c.tol.psd = positive(number_or(t, "psd", c.tol.psd, "tolerances"), "tolerances.psd");
    if (t.contains("rank"))
      c.tol.rank = positive(number(t.at("rank"), "tolerances.rank"), "tolerances.rank");
  }
  if (doc.contains("checks")) {
    const json& k = doc.at("checks");
    if (!k.is_array()) bad("checks", "expected an array of names");
    for (std::size_t i = 0; i < k.size(); ++i) {
      const std::string name = text(k[i], "checks[" + std::to_string(i) + "]");
      const auto& known = known_checks();
      if (std::find(known.begin(), known.end(), name) == known.end())
        bad("checks", "unknown check '" + name + "'");
      c.checks.push_back(name);
    }
  }
  if (doc.contains("seed")) {
    if (!doc.at("seed").is_number_unsigned() && !doc.at("seed").is_number_integer())
      bad("seed", "expected a non-negative integer");
    if (doc.at("seed").is_number_integer() && doc.at("seed").get<long long>() < 0)
      bad("seed", "expected a non-negative integer");
    c.seed = doc.at("seed").get<std::uint64_t>();
  }
  if (doc.contains("sampling")) {
    const json& s = doc.at("sampling");
    only_keys(s, "sampling", {"frames_per_node", "n_dirs", "n_samples"});
    c.sampling.frames_per_node = integer_or(s, "frames_per_node", c.sampling.frames_per_node, "sampling");
    c.sampling.n_dirs = integer_or(s, "n_dirs", c.sampling.n_dirs, "sampling");
    c.sampling.n_samples = integer_or(s, "n_samples", c.sampling.n_samples, "sampling");
    if (c.sampling.frames_per_node < 1 || c.sampling.n_dirs < 1 || c.sampling.n_samples < 1)
      bad("sampling", "counts must be at least 1");
  }
  if (c.n_theta < 4 || c.n_phi < 8) bad("grid", "needs n_theta >= 4 and n_phi >= 8");
  if (c.L_max < 2) bad("L_max", "must be at least 2");
  if (c.L_max > std::min(c.n_theta, c.n_phi / 2))
    bad("L_max", "exceeds the degree the grid resolves (" +
                     std::to_string(std::min(c.n_theta, c.n_phi / 2)) + ")");
  return c;
}

json to_json(const BodySpec& body) {
  struct Visitor {
    json operator()(const Ball& b) const { return {{"type", "ball"}, {"r", b.r}}; }
    json operator()(const TranslatedBall& b) const {
      return {{"type", "translated_ball"}, {"r", b.r}, {"v", {b.v.x(), b.v.y(), b.v.z()}}};
    }
    json operator()(const Ellipsoid& e) const {
      return {{"type", "ellipsoid"}, {"semiaxes", {e.semiaxes.x(), e.semiaxes.y(), e.semiaxes.z()}}};
    }
    json operator()(const HarmonicPerturbation& h) const {
      json terms = json::array();
      for (int l = 0; l <= h.degree; ++l)
        for (int m = -l; m <= l; ++m)
          if (h.psi[sh_index(l, m)] != 0.0)
            terms.push_back({{"l", l}, {"m", m}, {"value", h.psi[sh_index(l, m)]}});
      return {{"type", "harmonic_perturbation"}, {"C", h.C}, {"psi", {{"coeffs", terms}}}};
    }
    json operator()(const MinkowskiSum& s) const {
      json terms = json::array();
      for (const auto& t : s.terms) terms.push_back({{"weight", t.weight}, {"body", to_json(t.body)}});
      return {{"type", "minkowski_sum"}, {"terms", terms}};
    }
  };
  return std::visit(Visitor{}, body.variant());
}

}  // namespace mixcf
