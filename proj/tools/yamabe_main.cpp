// yamabe: cone algebra, curvature tables, radial solves, exhaustion runs and
// the bundled verification suites.
//
// Exit codes: 0 ok, 1 verification failure, 2 usage or validation error,
// 3 infeasible or non-convergent solve.

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <thread>

#include "CLI11.hpp"
#include "yamabe/config.hpp"
#include "yamabe/errors.hpp"
#include "yamabe/report.hpp"
#include "yamabe/verify.hpp"

using namespace yamabe;

namespace {

constexpr int kOk = 0;
constexpr int kVerifyFailed = 1;
constexpr int kUsage = 2;
constexpr int kInfeasible = 3;

struct ConeArgs {
  std::string family = "gamma-k";
  std::string base = "gamma-k";
  int n = 5;
  int k = 2;
  std::vector<double> tau;
};

void add_cone_options(CLI::App* app, ConeArgs& a) {
  app->add_option("--family", a.family, "gamma-k or tau")->check(CLI::IsMember({"gamma-k", "tau"}));
  app->add_option("--base", a.base, "base family of a tau cone")->check(CLI::IsMember({"gamma-k"}));
  app->add_option("--n", a.n, "dimension");
  app->add_option("--k", a.k, "order of the elementary cone");
  app->add_option("--tau", a.tau, "deformation parameters, outermost first");
}

ExperimentConfig cone_config(const ConeArgs& a) {
  ExperimentConfig c;
  c.cone.family = a.family;
  c.cone.n = a.n;
  c.cone.k = a.k;
  c.cone.tau = a.tau;
  return c;
}

std::string g17(double x) { return format_number(x); }

int run_cone(const std::string& action, const ConeArgs& a, const std::vector<double>& lambda) {
  const ConeSpec cone = build_cone(cone_config(a));
  if (action == "mu") {
    const double mu = mu_plus(cone);
    std::printf("cone %s\nmu = %.10g\nmu > 1: %s\n", cone.describe().c_str(), mu,
                mu > 1.0 + 1e-9 ? "yes" : "no");
    return kOk;
  }
  if (static_cast<int>(lambda.size()) != cone.dimension()) {
    throw DimensionMismatch("expected " + std::to_string(cone.dimension()) + " eigenvalues, got " +
                            std::to_string(lambda.size()));
  }
  if (action == "contains") {
    std::printf("%s\n", to_string(contains(cone, lambda)).c_str());
    return kOk;
  }
  const auto d = cone.deform(lambda);
  for (std::size_t i = 0; i < d.size(); ++i) std::printf(i ? " %s" : "%s", g17(d[i]).c_str());
  std::printf("\n");
  return kOk;
}

struct MetricArgs {
  std::string kind = "euclidean";
  std::string profile = "constant";
  std::vector<std::string> params;
  int fiber_sign = 1;
  double mu = 0.0;
  double m = 0.0;
};

ProfileParams parse_params(const std::vector<std::string>& items) {
  ProfileParams out;
  for (const auto& it : items) {
    const auto eq = it.find('=');
    if (eq == std::string::npos) throw ConfigError("--param expects key=value, got '" + it + "'");
    try {
      out.emplace_back(it.substr(0, eq), std::stod(it.substr(eq + 1)));
    } catch (const std::exception&) {
      throw ConfigError("--param value is not a number: '" + it + "'");
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

int run_curvature(const ConeArgs& cone, const MetricArgs& m, double r_min, double r_max,
                  std::size_t count, const std::string& out_path) {
  ExperimentConfig c = cone_config(cone);
  c.metric.kind = m.kind;
  c.metric.profile = {m.profile, parse_params(m.params)};
  c.metric.fiber_sign = m.fiber_sign;
  c.metric.mu = m.mu;
  c.metric.m = m.m;
  const auto metric = build_metric(c);
  const auto F = build_functional(c);
  if (count < 2) throw DomainError("--count must be at least 2");
  const auto rows = curvature_curve(metric, F, r_min, r_max, count);

  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path, std::ios::binary);
    if (!file) throw ConfigError("cannot write '" + out_path + "'");
  }
  std::ostream& out = out_path.empty() ? std::cout : file;
  out << "r,chi1,chi2";
  for (int i = 1; i <= metric.dimension(); ++i) out << ",lambda_" << i;
  out << ",R,f,margin\n";
  for (const auto& row : rows) {
    out << g17(row.r) << ',' << g17(row.chi1) << ',' << g17(row.chi2);
    for (double l : row.lambda) out << ',' << g17(l);
    out << ',' << g17(row.scalar) << ',' << g17(row.f) << ',' << g17(row.margin) << '\n';
  }
  return kOk;
}

void apply_overrides(ExperimentConfig& c, const std::string& dir, const std::string& run_id) {
  if (!dir.empty()) c.output.directory = dir;
  if (!run_id.empty()) c.output.run_id = run_id;
}

int solve_command(const std::string& path, std::size_t nodes, const std::string& dir,
              const std::string& run_id) {
  ExperimentConfig c = load_config(path);
  if (c.exhaustion) throw ConfigError("config has an exhaustion section; use 'exhaust'");
  if (nodes != 0) c.problem.nodes = nodes;
  apply_overrides(c, dir, run_id);
  validate(c);
  const auto sol = yamabe::run_solve(c);
  write_solve_outputs(c, sol);

  double sup = 0.0;
  for (double v : sol.u) sup = std::max(sup, std::abs(v));
  std::printf("status %s\niterations %d\nresidual %s\nsup_norm %s\n", to_string(sol.status).c_str(),
              sol.iterations, g17(sol.residual).c_str(), g17(sup).c_str());
  if (c.problem.exact) {
    std::printf("sup_error %s\n", g17(sup_error(sol, c.problem.exact->build())).c_str());
  }
  std::printf("output %s\n", run_directory(c).c_str());
  if (!sol.converged) {
    std::fprintf(stderr, "solve did not converge: %s\n", sol.message.c_str());
    return kInfeasible;
  }
  return kOk;
}

int run_exhaust(const std::vector<std::string>& paths, int jobs, const std::string& dir) {
  std::vector<ExperimentConfig> configs;
  for (const auto& p : paths) {
    auto c = load_config(p);
    if (!c.exhaustion) throw ConfigError(p + ": no exhaustion section");
    apply_overrides(c, dir, "");
    validate(c);
    configs.push_back(std::move(c));
  }
  std::map<std::string, std::size_t> ids;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    if (!ids.emplace(run_directory(configs[i]), i).second) {
      throw ConfigError("two configs write to " + run_directory(configs[i]));
    }
  }

  struct Outcome {
    std::optional<ExhaustionReport> report;
    std::string error;
  };
  std::vector<Outcome> outcomes(configs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      try {
        outcomes[i].report = run_exhaustion(configs[i]);
        write_exhaustion_outputs(configs[i], *outcomes[i].report);
      } catch (const std::exception& ex) {
        outcomes[i].error = ex.what();
      }
    }
  };
  const int threads = std::max(1, std::min<int>(jobs, static_cast<int>(configs.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  int code = kOk;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const auto& id = configs[i].output.run_id;
    const auto& o = outcomes[i];
    if (!o.report) {
      std::printf("%s: error %s\n", id.c_str(), o.error.c_str());
      code = kInfeasible;
      continue;
    }
    const auto& rep = *o.report;
    std::printf("%s: %s %s\n", id.c_str(), rep.kind.c_str(),
                short_label(rep.classification).c_str());
    std::printf("stage,R,inf_core,min_u,max_u,cauchy_u,f_level\n");
    for (const auto& st : rep.stages) {
      std::printf("%d,%s,%s,%s,%s,%s,%s\n", st.index, g17(st.R).c_str(), g17(st.inf_core).c_str(),
                  g17(st.min_u).c_str(), g17(st.max_u).c_str(), g17(st.cauchy_u).c_str(),
                  g17(st.f_level).c_str());
    }
    std::printf("audits %s\noutput %s\n", rep.audits_ok() ? "ok" : "violated",
                run_directory(configs[i]).c_str());
    if (!rep.audits_ok() && code == kOk) code = kVerifyFailed;
    if (rep.truncated) {
      std::printf("truncated: %s\n", rep.message.c_str());
      code = kInfeasible;
    }
  }
  return code;
}

int run_verify(const std::string& suite, std::uint64_t seed, const std::string& fault) {
  VerifyOptions opts;
  opts.seed = seed;
  opts.inject_fault = fault;
  const auto results = run_suite(suite, opts);
  int failed = 0;
  for (const auto& r : results) {
    if (!r.pass) ++failed;
    std::printf("%s %s/%s: %s\n", r.pass ? "PASS" : "FAIL", r.suite.c_str(), r.name.c_str(),
                r.detail.c_str());
  }
  std::printf("%zu checks, %d failed\n", results.size(), failed);
  return failed == 0 ? kOk : kVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radial fully nonlinear Yamabe-type solver"};
  app.require_subcommand(1);

  // cone
  auto* cone = app.add_subcommand("cone", "cone algebra: mu, contains, deform");
  cone->require_subcommand(1);
  ConeArgs cone_args;
  std::vector<double> lambda;
  std::string cone_action;
  for (const char* name : {"mu", "contains", "deform"}) {
    auto* sub = cone->add_subcommand(name);
    add_cone_options(sub, cone_args);
    if (std::string(name) != "mu") sub->add_option("lambda", lambda, "eigenvalues")->required();
    sub->callback([&cone_action, name] { cone_action = name; });
  }

  // curvature
  auto* curv = app.add_subcommand("curvature", "curvature table of a radial metric (CSV)");
  ConeArgs curv_cone;
  MetricArgs metric;
  double r_min = 0.5;
  double r_max = 10.0;
  std::size_t count = 20;
  std::string curv_out;
  add_cone_options(curv, curv_cone);
  curv->add_option("--metric", metric.kind, "euclidean, conformally_flat, warped, schwarzschild");
  curv->add_option("--profile", metric.profile, "profile name (u0 or warp)");
  curv->add_option("--param", metric.params, "profile parameter key=value");
  curv->add_option("--fiber-sign", metric.fiber_sign, "fiber curvature sign of a warped metric");
  curv->add_option("--mu", metric.mu, "Schwarzschild-type exponent");
  curv->add_option("--m", metric.m, "Schwarzschild-type mass");
  curv->add_option("--r-min", r_min);
  curv->add_option("--r-max", r_max);
  curv->add_option("--count", count);
  curv->add_option("-o,--output", curv_out, "CSV file (default stdout)");

  // solve
  auto* solve = app.add_subcommand("solve", "one Dirichlet solve from a config");
  std::string solve_config;
  std::size_t solve_nodes = 0;
  std::string out_dir;
  std::string run_id;
  solve->add_option("config", solve_config)->required();
  solve->add_option("--nodes", solve_nodes, "override problem.nodes");
  solve->add_option("--output-dir", out_dir, "override output.directory");
  solve->add_option("--run-id", run_id, "override output.run_id");

  // exhaust
  auto* exhaust = app.add_subcommand("exhaust", "exhaustion runs from configs");
  std::vector<std::string> exhaust_configs;
  int jobs = 1;
  exhaust->add_option("configs", exhaust_configs)->required();
  exhaust->add_option("--jobs", jobs, "independent runs in parallel")->check(CLI::PositiveNumber);
  exhaust->add_option("--output-dir", out_dir, "override output.directory");

  // verify
  auto* verify = app.add_subcommand("verify", "bundled verification suites");
  std::string suite = "paper";
  std::uint64_t seed = 20240601;
  std::string fault;
  verify->add_option("--suite", suite)->check(CLI::IsMember(verify_suites()));
  verify->add_option("--seed", seed, "Monte-Carlo seed");
  verify->add_option("--inject-fault", fault)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (cone->parsed()) return run_cone(cone_action, cone_args, lambda);
    if (curv->parsed()) return run_curvature(curv_cone, metric, r_min, r_max, count, curv_out);
    if (solve->parsed()) return solve_command(solve_config, solve_nodes, out_dir, run_id);
    if (exhaust->parsed()) return run_exhaust(exhaust_configs, jobs, out_dir);
    if (verify->parsed()) return run_verify(suite, seed, fault);
  } catch (const AdmissibilityError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInfeasible;
  } catch (const std::invalid_argument& e) {  // config, dimension, precondition
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInfeasible;
  }
  return kUsage;
}
