#include "yamabe/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <sstream>

#include "yamabe/errors.hpp"
#include "yamabe/exhaustion.hpp"

namespace yamabe {

namespace {

using Clock = std::chrono::steady_clock;

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(4);
  os << x;
  return os.str();
}

CheckResult begin(const char* suite, const char* name) {
  CheckResult c;
  c.suite = suite;
  c.name = name;
  return c;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

SymmetricFunctional normalized(int n, int k) {
  return normalize(SymmetricFunctional(ConeSpec::elementary(n, k)));
}

/// Exhaustion runs shared by several checks.
struct Runs {
  std::optional<ExhaustionReport> cosh;
  std::optional<ExhaustionReport> euclid;
  std::optional<ExhaustionReport> degenerate;
  std::optional<ExhaustionReport> positive;
  double positive_seconds = 0.0;
  double exhaustion_seconds = 0.0;
};

ExhaustionPlan euclid_plan() {
  ExhaustionPlan p{RadialMetric::euclidean(5), normalized(5, 2), ProblemSign::negative,
                   RadialProfile::constant(1.0)};
  p.radii = geometric_radii(2.0, 6);
  p.K = 1.0;
  p.K0 = p.radii.back();
  p.nodes = 801;
  return p;
}

ExhaustionPlan cosh_plan() {
  ExhaustionPlan p{RadialMetric::warped_product(5, RadialProfile::cosh_profile(), -1),
                   normalized(5, 2), ProblemSign::negative, RadialProfile::constant(1.0)};
  p.topology = Topology::capped_end;
  p.radii = geometric_radii(2.0, 6);
  p.K = 1.0;
  p.nodes = 401;
  return p;
}

constexpr int kSchwarzschildN = 8;
constexpr double kSchwarzschildMu = 3.0;

ExhaustionPlan schwarzschild_plan() {
  ExhaustionPlan p{schwarzschild_type(kSchwarzschildN, kSchwarzschildMu, 1.0),
                   normalized(kSchwarzschildN, 1), ProblemSign::positive,
                   RadialProfile::constant(1.0)};
  p.topology = Topology::annulus;
  p.inner_radius = 1.0;
  p.radii = geometric_radii(8.0, 5);
  p.K = 2.0;
  p.nodes = 8001;
  return p;
}

void ensure_negative_runs(Runs& runs) {
  if (runs.cosh) return;
  const auto t0 = Clock::now();
  runs.cosh = run_negative(cosh_plan());
  runs.euclid = run_negative(euclid_plan());
  runs.exhaustion_seconds = seconds_since(t0);
}

void ensure_positive_run(Runs& runs) {
  if (runs.positive) return;
  const auto t0 = Clock::now();
  runs.positive = run_positive(schwarzschild_plan(), 0.0);
  runs.positive_seconds = seconds_since(t0);
}

// cones --------------------------------------------------------------------

CheckResult mu_table() {
  CheckResult c = begin("cones", "mu-table");
  double worst = 0.0;
  int exact_misses = 0;
  for (int n = 3; n <= 10; ++n) {
    for (int k = 1; k <= n; ++k) {
      const ConeSpec cone = ConeSpec::elementary(n, k);
      const double expected = static_cast<double>(n - k) / k;
      if (mu_plus(cone) != expected) ++exact_misses;
      worst = std::max(worst, std::abs(mu_plus_bisection(cone) - expected));
    }
  }
  c.pass = exact_misses == 0 && worst <= 1e-10;
  c.detail = "closed-form misses " + std::to_string(exact_misses) + ", max bisection error " +
             fmt(worst);
  return c;
}

CheckResult tau_threshold() {
  CheckResult c = begin("cones", "tau-threshold");
  int wrong = 0;
  for (int n = 4; n <= 8; ++n) {
    const double tau0 = tau_for_trace_parameter(n, 0.0);
    for (int k = 1; k <= n; ++k) {
      const double mu = mu_plus_bisection(ConeSpec::tau_modified(ConeSpec::elementary(n, k), tau0));
      const bool above = mu > 1.0 + 1e-9;
      if (above != (k < n)) ++wrong;
    }
  }
  c.pass = wrong == 0;
  c.detail = "mu > 1 exactly when the cone is not the positive orthant; wrong verdicts " +
             std::to_string(wrong);
  return c;
}

CheckResult mean_bound(std::uint64_t seed) {
  CheckResult c = begin("cones", "mean-bound");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.5, 1.0);
  long violations = 0;
  long samples = 0;
  for (int n = 4; n <= 6; ++n) {
    for (int k = 1; k <= 2; ++k) {
      const auto F = normalized(n, k);
      int accepted = 0;
      std::vector<double> lam(static_cast<std::size_t>(n));
      while (accepted < 10000) {
        for (double& x : lam) x = normal(rng);
        if (contains(F.cone(), lam) != Membership::interior) continue;
        ++accepted;
        if (!check_mean_bound(F, lam)) ++violations;
      }
      samples += accepted;
    }
  }
  c.pass = violations == 0;
  c.detail = std::to_string(samples) + " samples, seed " + std::to_string(seed) + ", violations " +
             std::to_string(violations);
  return c;
}

// geometry -----------------------------------------------------------------

CheckResult schwarzschild_boundary() {
  CheckResult c = begin("geometry", "schwarzschild-boundary");
  double worst_sigma = 0.0;
  double worst_ratio = 0.0;
  for (int n = 4; n <= 6; ++n) {
    for (int k = 1; 2 * k < n; ++k) {
      const double mu = static_cast<double>(n - k) / k;
      const double p = mu - 1.0;
      for (double m : {0.5, 1.0, 2.0}) {
        const auto metric = schwarzschild_type(n, mu, m);
        for (int i = 0; i < 200; ++i) {
          const double r = 0.5 + 19.5 * i / 199.0;
          const auto ev = schouten(metric, r);
          auto lam = ev.assemble();
          double norm = 0.0;
          for (double x : lam) norm += x * x;
          norm = std::sqrt(norm);
          for (double& x : lam) x /= norm;
          worst_sigma = std::max(worst_sigma, std::abs(sigma_k(lam, k)));
          worst_ratio = std::max(worst_ratio, std::abs(ev.chi2 / ev.chi1 - (p + 2.0)) / (p + 2.0));
        }
      }
    }
  }
  c.pass = worst_sigma <= 1e-9 && worst_ratio <= 1e-10;
  c.detail = "max |sigma_k| " + fmt(worst_sigma) + ", max ratio error " + fmt(worst_ratio);
  return c;
}

CheckResult warped_constants(bool inject) {
  CheckResult c = begin("geometry", "warped-constants");
  struct Fixture {
    RadialProfile warp;
    int k;
  };
  const std::vector<Fixture> fixtures{{RadialProfile::sinh_profile(), inject ? -1 : 1},
                                      {RadialProfile::exp_profile(), 0},
                                      {RadialProfile::cosh_profile(), -1}};
  double worst = 0.0;
  for (const auto& f : fixtures) {
    const auto metric = RadialMetric::warped_product(5, f.warp, f.k);
    for (int i = 0; i < 100; ++i) {
      const double r = 0.1 + 9.9 * i / 99.0;
      const auto ev = warped_schouten(metric, r);
      worst = std::max({worst, std::abs(ev.chi1 - 0.5), std::abs(ev.chi2)});
    }
  }
  c.pass = worst <= 1e-12;
  c.detail = "max deviation from (1/2, 0): " + fmt(worst);
  return c;
}

CheckResult end_conditions() {
  CheckResult c = begin("geometry", "end-conditions");
  const auto metric = RadialMetric::warped_product(5, RadialProfile::exp_sin(0.1), -1);
  const auto rep = check_end_conditions(metric, 1.5, 0.0, 100.0, 0.1, 0.1, 20001);
  c.pass = rep.pass;
  c.detail = "min chi1 " + fmt(rep.min_chi1) + " (>= 0.1), min ratio " + fmt(rep.min_ratio) +
             " (>= " + fmt(rep.ratio_bound) + ")";
  return c;
}

CheckResult trace_identity() {
  CheckResult c = begin("geometry", "trace-identity");
  struct Fixture {
    RadialProfile warp;
    int k;
  };
  const std::vector<Fixture> fixtures{{RadialProfile::sinh_profile(), 1},
                                      {RadialProfile::exp_profile(), 0},
                                      {RadialProfile::cosh_profile(), -1},
                                      {RadialProfile::exp_sin(0.1), -1}};
  double worst = 0.0;
  int used = 0;
  for (int n = 4; n <= 6; ++n) {
    const double tau0 = tau_for_trace_parameter(n, 0.0);
    for (int order = 1; order <= 3; ++order) {
      const SymmetricFunctional F(ConeSpec::elementary(n, order));
      const SymmetricFunctional Ftau(ConeSpec::tau_modified(ConeSpec::elementary(n, order), tau0));
      for (const auto& f : fixtures) {
        const auto metric = RadialMetric::warped_product(n, f.warp, f.k);
        for (int i = 0; i < 25; ++i) {
          const double r = 0.3 + 4.7 * i / 24.0;
          const auto lam_a = warped_schouten(metric, r).assemble();  // -A
          const auto ric = warped_ricci_scalar(metric, r);
          std::vector<double> lam_ric(static_cast<std::size_t>(n), -ric.tangential);
          lam_ric[0] = -ric.radial;
          if (contains(F.cone(), lam_ric) != Membership::interior) continue;
          const double lhs = f_eval(Ftau, lam_a);
          const double rhs = tau0 / (n - 2) * f_eval(F, lam_ric);
          worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
          ++used;
        }
      }
    }
  }
  c.pass = used > 0 && worst <= 1e-10;
  c.detail = std::to_string(used) + " samples, max relative error " + fmt(worst);
  return c;
}

// solver -------------------------------------------------------------------

CheckResult manufactured_caps() {
  CheckResult c = begin("solver", "manufactured-caps");
  std::ostringstream detail;
  bool pass = true;
  double slowest = 0.0;
  for (const auto sign : {ProblemSign::negative, ProblemSign::positive}) {
    const auto exact = sign == ProblemSign::negative ? RadialProfile::hyperbolic_cap(1.0)
                                                     : RadialProfile::spherical_cap(1.0);
    const double R = 0.5;
    double err[2];
    for (int level = 0; level < 2; ++level) {
      const std::size_t nodes = level == 0 ? 401 : 801;
      const DirichletProblem p{RadialMetric::euclidean(5), normalized(5, 2), sign,
                               RadialProfile::constant(1.0),
                               Grid(0.0, R, nodes, LeftBoundary::symmetry), 0.0, exact(R)};
      const auto t0 = Clock::now();
      const auto sol = newton_solve(p, default_initial_guess(p));
      slowest = std::max(slowest, seconds_since(t0));
      if (!sol.converged) pass = false;
      err[level] = 0.0;
      for (std::size_t i = 0; i < sol.u.size(); ++i) {
        err[level] = std::max(err[level], std::abs(sol.u[i] - exact(p.grid.node(i))));
      }
    }
    const double order = std::log2(err[0] / err[1]);
    pass = pass && err[0] <= 5e-5 && order >= 1.8 && order <= 2.2;
    detail << to_string(sign) << ": error " << fmt(err[0]) << " at 400 intervals, order "
           << fmt(order) << "; ";
  }
  pass = pass && slowest < 10.0;
  detail << "slowest solve " << fmt(slowest) << " s";
  c.pass = pass;
  c.detail = detail.str();
  return c;
}

// exhaustion ---------------------------------------------------------------

CheckResult exhaustion_dichotomy(Runs& runs) {
  CheckResult c = begin("exhaustion", "exhaustion-dichotomy");
  ensure_negative_runs(runs);
  const auto& ch = *runs.cosh;
  const auto& eu = *runs.euclid;
  double cosh_sup = 0.0;
  for (const auto& sol : ch.solutions) {
    for (double v : sol.u) cosh_sup = std::max(cosh_sup, std::abs(v));
  }
  const bool cosh_ok = !ch.truncated && ch.stages.size() == 6 &&
                       ch.classification == Classification::case1_interior_limit &&
                       cosh_sup <= 1e-9;
  double worst_inf = 0.0;
  bool decreasing = true;
  for (std::size_t j = 0; j < eu.stages.size(); ++j) {
    worst_inf = std::max(worst_inf, std::abs(eu.stages[j].inf_core - std::log(2.0 / eu.stages[j].R)));
    if (j > 0 && !(eu.stages[j].f_level < eu.stages[j - 1].f_level)) decreasing = false;
  }
  const std::size_t J = eu.stages.size();
  const double last_ratio =
      J >= 2 ? eu.stages[J - 2].f_level / eu.stages[J - 1].f_level : std::nan("");
  const bool euclid_ok = !eu.truncated && J == 6 &&
                         eu.classification == Classification::case2_boundary_limit &&
                         worst_inf <= 0.7 && decreasing && std::abs(last_ratio - 4.0) <= 0.4;
  c.pass = cosh_ok && euclid_ok && runs.exhaustion_seconds < 120.0;
  c.detail = "cosh end " + short_label(ch.classification) + " sup|u| " + fmt(cosh_sup) +
             "; euclidean " + short_label(eu.classification) + " max |inf - ln(2/R)| " +
             fmt(worst_inf) + ", last f-level ratio " + fmt(last_ratio) + "; " +
             fmt(runs.exhaustion_seconds) + " s";
  return c;
}

CheckResult barrier_audits(Runs& runs) {
  CheckResult c = begin("exhaustion", "barrier-audits");
  ensure_negative_runs(runs);
  ensure_positive_run(runs);
  if (!runs.degenerate) runs.degenerate = run_negative_degenerate(euclid_plan());
  int exempt = 0;
  int audited = 0;
  for (const auto* rep : {&*runs.cosh, &*runs.euclid}) {
    for (const auto& st : rep->stages) {
      if (st.barrier.exempt || !st.barrier.applicable) {
        ++exempt;
      } else {
        ++audited;
      }
    }
  }
  double max_above_lambda = -std::numeric_limits<double>::infinity();
  for (const auto& sol : runs.positive->solutions) {
    for (double v : sol.u) max_above_lambda = std::max(max_above_lambda, v - runs.positive->Lambda);
  }
  for (const auto& sol : runs.positive->limit_stages) {
    for (double v : sol.u) max_above_lambda = std::max(max_above_lambda, v - runs.positive->Lambda);
  }
  double max_degenerate = -std::numeric_limits<double>::infinity();
  for (const auto& st : runs.degenerate->stages) max_degenerate = std::max(max_degenerate, st.max_u);

  const bool lower_ok = runs.cosh->barrier_ok && runs.euclid->barrier_ok && audited > 0;
  const bool upper_ok = runs.positive->upper_bound_ok && max_above_lambda <= 1e-10;
  const bool degenerate_ok = !runs.degenerate->truncated && runs.degenerate->upper_bound_ok &&
                             max_degenerate <= 1e-10;
  c.pass = lower_ok && upper_ok && degenerate_ok;
  c.detail = "lower bound audited at " + std::to_string(audited) + " stages (" +
             std::to_string(exempt) + " exempt); max u - Lambda " + fmt(max_above_lambda) +
             "; degenerate max u " + fmt(max_degenerate);
  return c;
}

CheckResult linear_oracle(Runs& runs) {
  CheckResult c = begin("exhaustion", "linear-oracle");
  ensure_positive_run(runs);
  const auto& rep = *runs.positive;
  if (rep.truncated || rep.limit_stages.empty()) {
    c.detail = "positive run incomplete: " + rep.message;
    return c;
  }
  const int n = kSchwarzschildN;
  const auto& sol = rep.limit_stages.back();
  const auto phi = conformal_laplacian_solve(schwarzschild_plan().background, sol.grid, 1.0, 1.0);
  double rel = 0.0;
  std::vector<double> r(sol.grid.size());
  std::vector<double> dev(sol.grid.size());
  for (std::size_t i = 0; i < sol.grid.size(); ++i) {
    r[i] = sol.grid.node(i);
    const double factor = std::exp(0.5 * (n - 2) * sol.u[i]);
    const double lin = phi(r[i]);
    rel = std::max(rel, std::abs(factor - lin) / std::abs(lin));
    dev[i] = factor - 1.0;
  }
  std::vector<double> probes;
  for (int i = 0; i <= 8; ++i) probes.push_back(4.0 * std::pow(2.0, i / 4.0));
  const auto decay = decay_report(RadialProfile::sampled(r, dev), 0.0, std::nullopt, probes, n);
  const double target = kSchwarzschildMu - 1.0;
  const double exponent_err = std::abs(decay.fitted_exponent - target) / target;
  c.pass = rep.trend == EpsilonTrend::to_zero && rel <= 1e-4 && exponent_err <= 0.1 &&
           runs.positive_seconds < 60.0;
  c.detail = "eps trend " + to_string(rep.trend) + ", final psi " + fmt(rep.limit_levels.back()) +
             ", relative sup error " + fmt(rel) + ", decay exponent " +
             fmt(decay.fitted_exponent) + " (target " + fmt(target) + "); " +
             fmt(runs.positive_seconds) + " s";
  return c;
}

using Check = std::function<CheckResult(Runs&, const VerifyOptions&)>;

struct Entry {
  const char* suite;
  const char* name;
  Check check;
};

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries{
      {"cones", "mu-table", [](Runs&, const VerifyOptions&) { return mu_table(); }},
      {"cones", "tau-threshold", [](Runs&, const VerifyOptions&) { return tau_threshold(); }},
      {"cones", "mean-bound", [](Runs&, const VerifyOptions& o) { return mean_bound(o.seed); }},
      {"geometry", "schwarzschild-boundary", [](Runs&, const VerifyOptions&) { return schwarzschild_boundary(); }},
      {"geometry", "warped-constants",
       [](Runs&, const VerifyOptions& o) { return warped_constants(o.inject_fault == "warped-sign"); }},
      {"geometry", "end-conditions", [](Runs&, const VerifyOptions&) { return end_conditions(); }},
      {"geometry", "trace-identity", [](Runs&, const VerifyOptions&) { return trace_identity(); }},
      {"solver", "manufactured-caps", [](Runs&, const VerifyOptions&) { return manufactured_caps(); }},
      {"exhaustion", "exhaustion-dichotomy", [](Runs& r, const VerifyOptions&) { return exhaustion_dichotomy(r); }},
      {"exhaustion", "barrier-audits", [](Runs& r, const VerifyOptions&) { return barrier_audits(r); }},
      {"exhaustion", "linear-oracle", [](Runs& r, const VerifyOptions&) { return linear_oracle(r); }},
  };
  return entries;
}

}  // namespace

const std::vector<std::string>& verify_suites() {
  static const std::vector<std::string> suites{"cones", "geometry", "solver", "exhaustion",
                                               "paper"};
  return suites;
}

std::vector<CheckResult> run_suite(const std::string& suite, const VerifyOptions& options) {
  const auto& suites = verify_suites();
  if (std::find(suites.begin(), suites.end(), suite) == suites.end()) {
    throw ConfigError("unknown suite '" + suite + "'");
  }
  if (!options.inject_fault.empty() && options.inject_fault != "warped-sign") {
    throw ConfigError("unknown fault '" + options.inject_fault + "'");
  }
  Runs runs;
  std::vector<CheckResult> out;
  for (const auto& e : registry()) {
    if (suite != "paper" && suite != e.suite) continue;
    const auto t0 = Clock::now();
    CheckResult r;
    try {
      r = e.check(runs, options);
    } catch (const std::exception& ex) {
      r.suite = e.suite;
      r.name = e.name;
      r.pass = false;
      r.detail = ex.what();
    }
    r.seconds = seconds_since(t0);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace yamabe
