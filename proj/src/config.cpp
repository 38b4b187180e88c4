#include "yamabe/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "yamabe/errors.hpp"

namespace yamabe {

using json = nlohmann::json;

namespace {

/// Reads fields of one JSON object and rejects keys nobody asked for.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  bool has(const char* key) const { return j_.contains(key); }

  template <class T>
  void get(const char* key, T& out) {
    if (!j_.contains(key)) return;
    seen_.insert(key);
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(where(key) + ": wrong type");
    }
  }

  void get_count(const char* key, std::size_t& out) {
    long long v = static_cast<long long>(out);
    get(key, v);
    if (!j_.at(key).is_number_integer() || v < 0) {
      throw ConfigError(where(key) + ": expected a nonnegative integer");
    }
    out = static_cast<std::size_t>(v);
  }

  const json& child(const char* key) {
    seen_.insert(key);
    return j_.at(key);
  }

  std::string where(const char* key) const { return path_ + "." + key; }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) throw ConfigError(path_ + ": unknown key '" + item.key() + "'");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

ProfileSpec profile_from_json(const json& j, const std::string& path) {
  Reader r(j, path);
  ProfileSpec p;
  r.get("name", p.name);
  if (r.has("params")) {
    const json& params = r.child("params");
    if (!params.is_object()) throw ConfigError(path + ".params: expected an object");
    p.params.clear();
    for (const auto& item : params.items()) {
      if (!item.value().is_number()) {
        throw ConfigError(path + ".params." + item.key() + ": expected a number");
      }
      p.params.emplace_back(item.key(), item.value().get<double>());
    }
    std::sort(p.params.begin(), p.params.end());
  }
  r.finish();
  return p;
}

json profile_to_json(const ProfileSpec& p) {
  json params = json::object();
  for (const auto& [k, v] : p.params) params[k] = v;
  return {{"name", p.name}, {"params", params}};
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  Reader top(j, "config");
  ExperimentConfig c;
  if (top.has("cone")) {
    Reader r(top.child("cone"), "cone");
    r.get("family", c.cone.family);
    r.get("n", c.cone.n);
    r.get("k", c.cone.k);
    r.get("tau", c.cone.tau);
    r.finish();
  }
  if (top.has("functional")) {
    Reader r(top.child("functional"), "functional");
    r.get("normalize", c.functional.normalize);
    r.finish();
  }
  if (top.has("metric")) {
    Reader r(top.child("metric"), "metric");
    r.get("kind", c.metric.kind);
    if (r.has("profile")) c.metric.profile = profile_from_json(r.child("profile"), "metric.profile");
    r.get("fiber_sign", c.metric.fiber_sign);
    r.get("mu", c.metric.mu);
    r.get("m", c.metric.m);
    if (r.has("domain")) {
      std::vector<double> d;
      r.get("domain", d);
      c.metric.domain = d;
    }
    r.finish();
  }
  if (top.has("problem")) {
    Reader r(top.child("problem"), "problem");
    r.get("sign", c.problem.sign);
    if (r.has("psi")) c.problem.psi = profile_from_json(r.child("psi"), "problem.psi");
    r.get("r_min", c.problem.r_min);
    r.get("r_max", c.problem.r_max);
    r.get("left", c.problem.left);
    if (r.has("nodes")) r.get_count("nodes", c.problem.nodes);
    r.get("left_value", c.problem.left_value);
    r.get("right_value", c.problem.right_value);
    if (r.has("exact")) c.problem.exact = profile_from_json(r.child("exact"), "problem.exact");
    r.finish();
  }
  if (top.has("newton")) {
    Reader r(top.child("newton"), "newton");
    r.get("tol", c.newton.tol);
    r.get("max_iter", c.newton.max_iter);
    r.get("max_halvings", c.newton.max_halvings);
    r.get("margin_floor", c.newton.margin_floor);
    r.finish();
  }
  if (top.has("exhaustion")) {
    Reader r(top.child("exhaustion"), "exhaustion");
    ExhaustionSection e;
    r.get("kind", e.kind);
    r.get("topology", e.topology);
    r.get("radii", e.radii);
    r.get("K", e.K);
    r.get("K0", e.K0);
    r.get("inner_radius", e.inner_radius);
    if (r.has("nodes")) r.get_count("nodes", e.nodes);
    r.get("Lambda", e.Lambda);
    r.get("linear_comparison", e.linear_comparison);
    r.get("psi_floor", e.psi_floor);
    r.get("ordering_tol", e.ordering_tol);
    r.finish();
    c.exhaustion = e;
  }
  if (top.has("output")) {
    Reader r(top.child("output"), "output");
    r.get("directory", c.output.directory);
    r.get("formats", c.output.formats);
    r.get("run_id", c.output.run_id);
    r.finish();
  }
  top.get("seed", c.seed);
  top.finish();
  return c;
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["cone"] = {{"family", c.cone.family}, {"n", c.cone.n}, {"k", c.cone.k}, {"tau", c.cone.tau}};
  j["functional"] = {{"normalize", c.functional.normalize}};
  json metric = {{"kind", c.metric.kind},
                 {"profile", profile_to_json(c.metric.profile)},
                 {"fiber_sign", c.metric.fiber_sign},
                 {"mu", c.metric.mu},
                 {"m", c.metric.m}};
  if (c.metric.domain) metric["domain"] = *c.metric.domain;
  j["metric"] = metric;
  json problem = {{"sign", c.problem.sign},         {"psi", profile_to_json(c.problem.psi)},
                  {"r_min", c.problem.r_min},       {"r_max", c.problem.r_max},
                  {"left", c.problem.left},         {"nodes", c.problem.nodes},
                  {"left_value", c.problem.left_value}, {"right_value", c.problem.right_value}};
  if (c.problem.exact) problem["exact"] = profile_to_json(*c.problem.exact);
  j["problem"] = problem;
  j["newton"] = {{"tol", c.newton.tol},
                 {"max_iter", c.newton.max_iter},
                 {"max_halvings", c.newton.max_halvings},
                 {"margin_floor", c.newton.margin_floor}};
  if (c.exhaustion) {
    const auto& e = *c.exhaustion;
    j["exhaustion"] = {{"kind", e.kind},
                       {"topology", e.topology},
                       {"radii", e.radii},
                       {"K", e.K},
                       {"K0", e.K0},
                       {"inner_radius", e.inner_radius},
                       {"nodes", e.nodes},
                       {"Lambda", e.Lambda},
                       {"linear_comparison", e.linear_comparison},
                       {"psi_floor", e.psi_floor},
                       {"ordering_tol", e.ordering_tol}};
  }
  j["output"] = {{"directory", c.output.directory},
                 {"formats", c.output.formats},
                 {"run_id", c.output.run_id}};
  j["seed"] = c.seed;
  return j;
}

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return config_from_json(j);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize(const ExperimentConfig& c) { return to_json(c).dump(2) + "\n"; }

ConeSpec build_cone(const ExperimentConfig& c) {
  ConeSpec cone = ConeSpec::elementary(c.cone.n, c.cone.k);
  if (c.cone.family == "gamma-k") {
    if (!c.cone.tau.empty()) throw ConfigError("cone.tau is only used with family 'tau'");
    return cone;
  }
  if (c.cone.family != "tau") throw ConfigError("cone.family must be 'gamma-k' or 'tau'");
  if (c.cone.tau.empty()) throw ConfigError("cone.tau: family 'tau' needs at least one value");
  for (auto it = c.cone.tau.rbegin(); it != c.cone.tau.rend(); ++it) {
    cone = ConeSpec::tau_modified(cone, *it);
  }
  return cone;
}

SymmetricFunctional build_functional(const ExperimentConfig& c) {
  SymmetricFunctional F(build_cone(c));
  return c.functional.normalize ? normalize(F) : F;
}

RadialMetric build_metric(const ExperimentConfig& c) {
  const int n = c.cone.n;
  Interval domain;
  if (c.metric.domain) {
    const auto& d = *c.metric.domain;
    if (d.size() != 2 || !(d[0] >= 0.0) || !(d[1] > d[0])) {
      throw ConfigError("metric.domain must be [lo, hi] with 0 <= lo < hi");
    }
    domain = {d[0], d[1]};
  }
  const auto& kind = c.metric.kind;
  if (kind == "euclidean") {
    return c.metric.domain ? RadialMetric::conformally_flat(n, RadialProfile::constant(0.0), domain)
                           : RadialMetric::euclidean(n);
  }
  if (kind == "conformally_flat") {
    return RadialMetric::conformally_flat(n, c.metric.profile.build(), domain);
  }
  if (kind == "warped") {
    if (c.metric.fiber_sign < -1 || c.metric.fiber_sign > 1) {
      throw ConfigError("metric.fiber_sign must be -1, 0 or 1");
    }
    return RadialMetric::warped_product(n, c.metric.profile.build(), c.metric.fiber_sign, domain);
  }
  if (kind == "schwarzschild") {
    if (c.metric.domain) throw ConfigError("metric.domain is derived for schwarzschild metrics");
    return schwarzschild_type(n, c.metric.mu, c.metric.m);
  }
  throw ConfigError("metric.kind must be euclidean, conformally_flat, warped or schwarzschild");
}

namespace {

ProblemSign sign_of(const std::string& s) {
  if (s == "negative") return ProblemSign::negative;
  if (s == "positive") return ProblemSign::positive;
  throw ConfigError("problem.sign must be 'negative' or 'positive'");
}

}  // namespace

NewtonOptions build_newton(const ExperimentConfig& c) {
  const auto& s = c.newton;
  if (!(s.tol > 0.0) || s.max_iter < 1 || s.max_halvings < 0 || !(s.margin_floor >= 0.0)) {
    throw ConfigError("newton: need tol > 0, max_iter >= 1, max_halvings >= 0, margin_floor >= 0");
  }
  return {s.tol, s.max_iter, s.max_halvings, s.margin_floor};
}

DirichletProblem build_problem(const ExperimentConfig& c) {
  const auto& p = c.problem;
  LeftBoundary left;
  if (p.left == "symmetry") {
    left = LeftBoundary::symmetry;
  } else if (p.left == "dirichlet") {
    left = LeftBoundary::dirichlet;
  } else {
    throw ConfigError("problem.left must be 'symmetry' or 'dirichlet'");
  }
  DirichletProblem problem{build_metric(c), build_functional(c), sign_of(p.sign), p.psi.build(),
                           Grid(p.r_min, p.r_max, p.nodes, left), p.left_value, p.right_value};
  problem.validate();
  if (p.exact) (void)p.exact->build();
  return problem;
}

ExhaustionPlan build_plan(const ExperimentConfig& c) {
  if (!c.exhaustion) throw ConfigError("config has no exhaustion section");
  const auto& e = *c.exhaustion;
  if (e.kind != "negative" && e.kind != "negative_degenerate" && e.kind != "positive") {
    throw ConfigError("exhaustion.kind must be negative, negative_degenerate or positive");
  }
  const ProblemSign sign = sign_of(c.problem.sign);
  if ((e.kind == "positive") != (sign == ProblemSign::positive)) {
    throw ConfigError("exhaustion.kind does not match problem.sign");
  }
  if (!std::isfinite(e.Lambda)) throw ConfigError("exhaustion.Lambda must be finite");
  ExhaustionPlan plan{build_metric(c), build_functional(c), sign, c.problem.psi.build()};
  plan.topology = topology_from_string(e.topology);
  plan.radii = e.radii;
  plan.K = e.K;
  plan.K0 = e.K0;
  plan.inner_radius = e.inner_radius;
  plan.nodes = e.nodes;
  plan.newton = build_newton(c);
  plan.psi_floor = e.psi_floor;
  plan.ordering_tol = e.ordering_tol;
  plan.validate();
  if (e.kind == "negative_degenerate") check_degenerate_precondition(plan);
  if (e.kind == "positive") check_positive_precondition(plan);
  return plan;
}

void validate(const ExperimentConfig& c) {
  (void)build_newton(c);
  if (c.output.run_id.empty() || c.output.run_id.find('/') != std::string::npos ||
      c.output.run_id == "." || c.output.run_id == "..") {
    throw ConfigError("output.run_id must be a nonempty file name");
  }
  for (const auto& f : c.output.formats) {
    if (f != "json" && f != "csv") throw ConfigError("output.formats: unknown format '" + f + "'");
  }
  if (c.exhaustion) {
    (void)build_plan(c);
  } else {
    (void)build_problem(c);
  }
}

std::string run_directory(const ExperimentConfig& c) {
  std::filesystem::path root = c.output.directory;
  if (root.empty()) {
    const char* env = std::getenv("YAMABE_OUTPUT_ROOT");
    root = env != nullptr && *env != '\0' ? env : "yamabe-runs";
  }
  return (root / c.output.run_id).string();
}

RadialSolution run_solve(const ExperimentConfig& c) {
  const auto problem = build_problem(c);
  return newton_solve(problem, default_initial_guess(problem), build_newton(c));
}

ExhaustionReport run_exhaustion(const ExperimentConfig& c) {
  const auto plan = build_plan(c);
  const auto& e = *c.exhaustion;
  if (e.kind == "negative") return run_negative(plan);
  if (e.kind == "negative_degenerate") return run_negative_degenerate(plan);
  if (!e.linear_comparison) return run_positive(plan, e.Lambda);
  const auto comparison = linear_comparison(plan, e.Lambda);
  return run_positive(plan, e.Lambda, &comparison);
}

}  // namespace yamabe
