#include "yamabe/exhaustion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "yamabe/errors.hpp"

namespace yamabe {

std::string to_string(Topology t) {
  switch (t) {
    case Topology::ball: return "ball";
    case Topology::capped_end: return "capped_end";
    case Topology::annulus: return "annulus";
  }
  return "?";
}

Topology topology_from_string(const std::string& s) {
  if (s == "ball") return Topology::ball;
  if (s == "capped_end") return Topology::capped_end;
  if (s == "annulus") return Topology::annulus;
  throw ConfigError("unknown topology '" + s + "'");
}

std::string to_string(Classification c) {
  switch (c) {
    case Classification::case1_interior_limit: return "case1_interior_limit";
    case Classification::case2_boundary_limit: return "case2_boundary_limit";
    case Classification::undetermined: return "undetermined";
  }
  return "?";
}

std::string short_label(Classification c) {
  switch (c) {
    case Classification::case1_interior_limit: return "case1";
    case Classification::case2_boundary_limit: return "case2";
    case Classification::undetermined: return "undetermined";
  }
  return "?";
}

std::string to_string(EpsilonTrend t) {
  switch (t) {
    case EpsilonTrend::to_zero: return "to_zero";
    case EpsilonTrend::bounded_below: return "bounded_below";
    case EpsilonTrend::undetermined: return "undetermined";
  }
  return "?";
}

std::vector<double> geometric_radii(double R1, int J) {
  if (!(R1 > 0.0) || J < 1) throw DomainError("geometric_radii: need R1 > 0 and J >= 1");
  std::vector<double> r(static_cast<std::size_t>(J));
  for (int j = 0; j < J; ++j) r[static_cast<std::size_t>(j)] = std::ldexp(R1, j);
  return r;
}

void ExhaustionPlan::validate() const {
  if (F.dimension() != background.dimension()) {
    throw DimensionMismatch("exhaustion: functional and metric dimensions differ");
  }
  if (radii.empty()) throw DomainError("exhaustion: no radii");
  for (std::size_t j = 1; j < radii.size(); ++j) {
    if (!(radii[j] > radii[j - 1])) throw DomainError("exhaustion: radii must increase strictly");
  }
  const double lo = topology == Topology::annulus ? inner_radius : 0.0;
  if (!(K > lo) || K > radii.front()) {
    throw DomainError("exhaustion: need inner radius < K <= R_1");
  }
  if (!(K0 >= 0.0)) throw DomainError("exhaustion: K0 must be nonnegative");
  if (topology == Topology::annulus && !(inner_radius > 0.0)) {
    throw DomainError("exhaustion: annulus needs a positive inner radius");
  }
  if (topology != Topology::annulus && background.domain().lo > 0.0) {
    throw DomainError("exhaustion: background domain excludes the origin; use an annulus");
  }
  if (!background.domain().contains(lo) || !background.domain().contains(radii.back())) {
    throw DomainError("exhaustion: domains leave the background domain");
  }
  if (nodes < 5) throw DomainError("exhaustion: need at least 5 nodes per stage");
  if (!(psi_floor > 0.0)) throw DomainError("exhaustion: psi_floor must be positive");
  if (!(ordering_tol >= 0.0)) throw DomainError("exhaustion: ordering_tol must be nonnegative");
  for (double R : radii) {
    const Grid g(lo, R, nodes);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double v = psi(g.node(i));
      if (!(v > 0.0) || !std::isfinite(v)) {
        throw DomainError("exhaustion: psi must be positive on every stage grid, psi(" +
                          std::to_string(g.node(i)) + ") = " + std::to_string(v));
      }
    }
  }
}

Classification classify(std::span<const double> inf_trace, std::span<const double> cauchy_trace) {
  const std::size_t J = inf_trace.size();
  if (J < 4 || cauchy_trace.size() != J) return Classification::undetermined;
  bool dropping = true;
  for (std::size_t j = J - 3; j < J; ++j) {
    if (!(inf_trace[j - 1] - inf_trace[j] >= 0.5)) dropping = false;
  }
  if (dropping) return Classification::case2_boundary_limit;

  constexpr double kConverged = 1e-12;
  const std::size_t first = std::max<std::size_t>(2, J - 3);
  for (std::size_t j = first; j < J; ++j) {
    const double prev = cauchy_trace[j - 1];
    const double cur = cauchy_trace[j];
    if (cur < kConverged) continue;
    if (!(cur <= 0.75 * prev)) return Classification::undetermined;
  }
  return Classification::case1_interior_limit;
}

EpsilonTrend classify_epsilons(std::span<const double> eps) {
  const std::size_t J = eps.size();
  if (J < 4) return EpsilonTrend::undetermined;
  bool shrinking = true;
  for (std::size_t j = J - 3; j < J; ++j) {
    if (!(eps[j] <= 0.75 * eps[j - 1])) shrinking = false;
  }
  if (shrinking) return EpsilonTrend::to_zero;
  if (std::abs(eps[J - 1] - eps[J - 2]) < 0.01 * std::abs(eps[J - 2])) {
    return EpsilonTrend::bounded_below;
  }
  return EpsilonTrend::undetermined;
}

CompletenessReport completeness_proxy(const RadialProfile& log_length_density, double K, double R,
                                      std::size_t probes) {
  if (!(R > K) || probes < 3) throw DomainError("completeness_proxy: need R > K and >= 3 probes");
  CompletenessReport rep;
  const double start = std::max(K, R * std::ldexp(1.0, -static_cast<int>(probes - 1)));
  const double ratio = std::pow(R / start, 1.0 / static_cast<double>(probes - 1));
  constexpr int kSub = 256;
  double length = 0.0;
  double a = K;
  for (std::size_t i = 0; i < probes; ++i) {
    const double b = i + 1 == probes ? R : start * std::pow(ratio, static_cast<double>(i));
    if (b > a) {
      const double h = (b - a) / kSub;
      double s = 0.5 * (std::exp(log_length_density(a)) + std::exp(log_length_density(b)));
      for (int k = 1; k < kSub; ++k) s += std::exp(log_length_density(a + k * h));
      length += s * h;
      a = b;
    }
    rep.probes.push_back(b);
    rep.lengths.push_back(length);
  }
  const std::size_t m = rep.lengths.size();
  const double last = rep.lengths[m - 1] - rep.lengths[m - 2];
  const double prev = rep.lengths[m - 2] - rep.lengths[m - 3];
  rep.last_increment_ratio = prev > 0.0 ? last / prev : kNaN;
  rep.unbounded = rep.last_increment_ratio >= 0.75;
  return rep;
}

CompletenessReport completeness_proxy(const RadialSolution& solution,
                                      const RadialMetric& background, double K,
                                      std::size_t probes) {
  std::vector<double> r(solution.grid.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = solution.grid.node(i);
  const auto u = RadialProfile::sampled(r, solution.u);
  const auto* flat = background.as_conformally_flat();
  const RadialProfile density = flat != nullptr ? u + flat->u0 : u;
  return completeness_proxy(density, K, solution.grid.r_max(), probes);
}

namespace {

Grid stage_grid(const ExhaustionPlan& plan, double R) {
  if (plan.topology == Topology::annulus) {
    return Grid(plan.inner_radius, R, plan.nodes, LeftBoundary::dirichlet);
  }
  return Grid(0.0, R, plan.nodes, LeftBoundary::symmetry);
}

DirichletProblem stage_problem(const ExhaustionPlan& plan, double R, RadialProfile psi,
                               double boundary) {
  DirichletProblem p{plan.background, plan.F, plan.sign, std::move(psi), stage_grid(plan, R),
                     boundary, boundary};
  p.validate();
  return p;
}

std::vector<double> nodes_of(const Grid& g) {
  std::vector<double> r(g.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = g.node(i);
  return r;
}

/// Previous stage extended by its boundary value, if admissible; otherwise the
/// default guess.
std::vector<double> warm_start(const DirichletProblem& problem, const RadialSolution* prev,
                               double boundary) {
  if (prev != nullptr) {
    const CubicSpline s(nodes_of(prev->grid), prev->u);
    std::vector<double> u(problem.grid.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double r = problem.grid.node(i);
      u[i] = r <= prev->grid.r_max() ? s(r).value : boundary;
    }
    try {
      (void)DiscreteOperator(problem).residual(u);
      return u;
    } catch (const AdmissibilityError&) {
    }
  }
  return default_initial_guess(problem);
}

double sup_on_grid(const RadialProfile& p, const Grid& g) {
  double s = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < g.size(); ++i) s = std::max(s, p(g.node(i)));
  return s;
}

/// Fills the per-stage statistics that do not depend on the run kind.
StageRecord describe_stage(const ExhaustionPlan& plan, const RadialSolution& sol,
                           const RadialSolution* prev, int index, double psi_level) {
  StageRecord st;
  st.index = index;
  st.R = sol.grid.r_max();
  st.psi_level = psi_level;
  st.converged = sol.converged;
  st.status = to_string(sol.status);
  st.iterations = sol.iterations;
  st.residual = sol.residual;
  st.margin = sol.min_margin();
  st.min_u = *std::min_element(sol.u.begin(), sol.u.end());
  st.max_u = *std::max_element(sol.u.begin(), sol.u.end());
  st.f_min = std::numeric_limits<double>::infinity();
  st.f_max = -std::numeric_limits<double>::infinity();
  for (double f : sol.f_values) {
    if (!std::isfinite(f)) continue;
    st.f_min = std::min(st.f_min, f);
    st.f_max = std::max(st.f_max, f);
  }
  st.inf_core = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < sol.grid.size() && sol.grid.node(i) <= plan.K; ++i) {
    st.inf_core = std::min(st.inf_core, sol.u[i]);
  }
  if (prev != nullptr) {
    const auto prev_r = nodes_of(prev->grid);
    const CubicSpline su(prev_r, prev->u);
    const CubicSpline sd(prev_r, prev->derivative());
    const auto du = sol.derivative();
    st.cauchy_u = 0.0;
    st.cauchy_du = 0.0;
    for (std::size_t i = 0; i < sol.grid.size() && sol.grid.node(i) <= plan.K; ++i) {
      const double r = sol.grid.node(i);
      st.cauchy_u = std::max(st.cauchy_u, std::abs(sol.u[i] - su(r).value));
      st.cauchy_du = std::max(st.cauchy_du, std::abs(du[i] - sd(r).value));
    }
  }
  return st;
}

/// Stage-to-stage monotonicity u_{j+1} <= u_j on the smaller domain.
double monotone_violation(const RadialSolution& smaller, const RadialSolution& larger) {
  const CubicSpline s(nodes_of(larger.grid), larger.u);
  double worst = 0.0;
  for (std::size_t i = 0; i < smaller.grid.size(); ++i) {
    worst = std::max(worst, s(smaller.grid.node(i)).value - smaller.u[i]);
  }
  return worst;
}

void finish_traces(const ExhaustionPlan& plan, ExhaustionReport& rep,
                   const std::vector<DirichletProblem>& problems) {
  std::vector<double> inf_trace;
  std::vector<double> cauchy;
  for (const auto& st : rep.stages) {
    inf_trace.push_back(st.inf_core);
    cauchy.push_back(st.cauchy_u);
  }
  rep.classification = classify(inf_trace, cauchy);

  if (rep.classification == Classification::case2_boundary_limit) {
    for (std::size_t j = 0; j < rep.stages.size(); ++j) {
      auto& st = rep.stages[j];
      const auto& sol = rep.solutions[j];
      const double scale = std::exp(2.0 * st.inf_core);
      st.f_level = scale * rep.sup_psi;
      if (j > 0) {
        const double shift = st.inf_core - rep.stages[j - 1].inf_core;
        const auto& prev = rep.solutions[j - 1];
        const CubicSpline su(nodes_of(prev.grid), prev.u);
        st.cauchy_uhat = 0.0;
        for (std::size_t i = 0; i < sol.grid.size() && sol.grid.node(i) <= plan.K; ++i) {
          st.cauchy_uhat = std::max(
              st.cauchy_uhat, std::abs(sol.u[i] - su(sol.grid.node(i)).value - shift));
        }
        st.cauchy_duhat = st.cauchy_du;
      }
      // u_hat solves the same equation with psi scaled by e^{2 inf}; the
      // residual scales by the same factor.
      const auto& base = problems[j];
      const auto scaled = base.with_psi(base.psi.scaled(scale));
      std::vector<double> uhat(sol.u);
      for (double& v : uhat) v -= st.inf_core;
      st.min_uhat = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < sol.grid.size() && sol.grid.node(i) <= plan.K; ++i) {
        st.min_uhat = std::min(st.min_uhat, uhat[i]);
      }
      const DiscreteOperator op_u(base);
      const DiscreteOperator op_hat(scaled);
      const auto ru = op_u.residual(sol.u);
      const auto rh = op_hat.residual(uhat);
      double err = 0.0;
      double mag = 0.0;
      for (std::size_t i = 0; i < ru.size(); ++i) {
        if (!op_u.is_equation_row(i)) continue;
        err = std::max(err, std::abs(rh[i] - scale * ru[i]));
        mag = std::max(mag, scale * std::abs(base.psi(sol.grid.node(i))));
      }
      st.scaled_identity_error = err / std::max(mag, std::numeric_limits<double>::min());
    }
  }
  if (!rep.solutions.empty()) {
    const auto& last = rep.solutions.back();
    const double start = plan.topology == Topology::annulus ? std::max(plan.K, plan.inner_radius)
                                                            : plan.K;
    rep.completeness = completeness_proxy(last, plan.background, start);
  }
}

double background_f_min(const ExhaustionPlan& plan, const Grid& g, double r_above,
                        SchoutenSign sign) {
  double c = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double r = g.node(i);
    if (r <= r_above) continue;
    const auto lam = schouten(plan.background, r).with_sign(sign).assemble();
    if (contains(plan.F.cone(), lam) != Membership::interior) return 0.0;
    c = std::min(c, f_eval(plan.F, lam));
  }
  return c;
}

}  // namespace

void check_degenerate_precondition(const ExhaustionPlan& plan) {
  const Grid outer = stage_grid(plan, plan.radii.back());
  for (std::size_t i = 0; i < outer.size(); ++i) {
    const double R = scalar_curvature(plan.background, outer.node(i));
    if (R < -1e-10) {
      throw PreconditionError("degenerate run needs nonnegative scalar curvature; R = " +
                              std::to_string(R) + " at r = " + std::to_string(outer.node(i)));
    }
  }
}

void check_positive_precondition(const ExhaustionPlan& plan) {
  const Grid outer = stage_grid(plan, plan.radii.back());
  for (std::size_t i = 0; i < outer.size(); ++i) {
    const auto lam = schouten(plan.background, outer.node(i)).with_sign(SchoutenSign::plus).assemble();
    if (contains(plan.F.cone(), lam) != Membership::interior) {
      throw PreconditionError("positive run needs an admissible background; fails at r = " +
                              std::to_string(outer.node(i)));
    }
  }
}

ExhaustionReport run_negative(const ExhaustionPlan& plan) {
  plan.validate();
  if (plan.sign != ProblemSign::negative) throw DomainError("run_negative: plan sign is positive");
  ExhaustionReport rep;
  rep.kind = "negative";
  const Grid outer = stage_grid(plan, plan.radii.back());
  rep.sup_psi = sup_on_grid(plan.psi, outer);
  rep.barrier_c = background_f_min(plan, outer, plan.K0, SchoutenSign::minus);
  std::vector<double> e1(static_cast<std::size_t>(plan.F.dimension()), 0.0);
  e1[0] = 1.0;
  rep.uniqueness_regime = contains(plan.F.cone(), e1) == Membership::interior;

  std::vector<DirichletProblem> problems;
  for (std::size_t j = 0; j < plan.radii.size(); ++j) {
    auto problem = stage_problem(plan, plan.radii[j], plan.psi, 0.0);
    const RadialSolution* prev = rep.solutions.empty() ? nullptr : &rep.solutions.back();
    auto sol = newton_solve(problem, warm_start(problem, prev, 0.0), plan.newton);
    if (!sol.converged) {
      rep.truncated = true;
      rep.message = "stage " + std::to_string(j + 1) + " did not converge: " + sol.message;
      break;
    }
    auto st = describe_stage(plan, sol, prev, static_cast<int>(j + 1), 1.0);
    st.barrier = negative_barrier(sol, rep.barrier_c, rep.sup_psi, plan.K0);
    rep.barrier_ok = rep.barrier_ok && st.barrier.pass;
    if (rep.uniqueness_regime && prev != nullptr) {
      st.monotone_checked = true;
      st.monotone_violation = monotone_violation(*prev, sol);
      st.monotone_ok = st.monotone_violation <= 1e-6;
      rep.monotone_ok = rep.monotone_ok && st.monotone_ok;
    }
    rep.stages.push_back(st);
    rep.solutions.push_back(std::move(sol));
    problems.push_back(std::move(problem));
  }
  finish_traces(plan, rep, problems);
  return rep;
}

ExhaustionReport run_negative_degenerate(const ExhaustionPlan& plan) {
  plan.validate();
  if (plan.sign != ProblemSign::negative) {
    throw DomainError("run_negative_degenerate: plan sign is positive");
  }
  check_degenerate_precondition(plan);
  const Grid outer = stage_grid(plan, plan.radii.back());
  ExhaustionReport rep;
  rep.kind = "negative_degenerate";
  rep.sup_psi = sup_on_grid(plan.psi, outer);

  std::vector<DirichletProblem> problems;
  for (std::size_t j = 0; j < plan.radii.size(); ++j) {
    const double level = 1.0 / static_cast<double>(j + 1);
    auto problem = stage_problem(plan, plan.radii[j], plan.psi.scaled(level), 0.0);
    const RadialSolution* prev = rep.solutions.empty() ? nullptr : &rep.solutions.back();
    auto sol = newton_solve(problem, warm_start(problem, prev, 0.0), plan.newton);
    if (!sol.converged) {
      rep.truncated = true;
      rep.message = "stage " + std::to_string(j + 1) + " did not converge: " + sol.message;
      break;
    }
    auto st = describe_stage(plan, sol, prev, static_cast<int>(j + 1), level);
    st.barrier = positive_barrier(sol, 0.0);
    st.barrier.bound = 0.0;
    rep.upper_bound_ok = rep.upper_bound_ok && st.barrier.pass;
    rep.stages.push_back(st);
    rep.solutions.push_back(std::move(sol));
    problems.push_back(std::move(problem));
  }
  finish_traces(plan, rep, problems);
  return rep;
}

RadialProfile linear_comparison(const ExhaustionPlan& plan, double Lambda, int refine) {
  plan.validate();
  if (refine < 1) throw DomainError("linear_comparison: refine must be positive");
  const int n = plan.background.dimension();
  const Grid coarse = stage_grid(plan, plan.radii.back());
  const Grid g(coarse.r_min(), coarse.r_max(),
               (coarse.size() - 1) * static_cast<std::size_t>(refine) + 1, coarse.left());
  const double boundary = std::exp(0.5 * (n - 2) * Lambda);
  const auto phi = conformal_laplacian_solve(plan.background, g, boundary, boundary);
  std::vector<double> r(g.size());
  std::vector<double> w(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    r[i] = g.node(i);
    w[i] = 2.0 / (n - 2) * std::log(phi(r[i]));
  }
  return RadialProfile::sampled(r, w);
}

ExhaustionReport run_positive(const ExhaustionPlan& plan, double Lambda,
                              const RadialProfile* comparison) {
  plan.validate();
  if (plan.sign != ProblemSign::positive) throw DomainError("run_positive: plan sign is negative");
  ExhaustionReport rep;
  rep.kind = "positive";
  rep.Lambda = Lambda;
  const Grid outer = stage_grid(plan, plan.radii.back());
  rep.sup_psi = sup_on_grid(plan.psi, outer);
  check_positive_precondition(plan);

  const double scale = std::exp(-2.0 * Lambda);
  for (double R : plan.radii) {
    rep.epsilons.push_back(scale *
                           background_f_min(plan, stage_grid(plan, R), -1.0, SchoutenSign::plus));
  }
  rep.trend = classify_epsilons(rep.epsilons);
  const bool interior = rep.trend == EpsilonTrend::bounded_below;
  const double eps_tilde =
      *std::min_element(rep.epsilons.begin(), rep.epsilons.end()) / rep.sup_psi;

  auto audit = [&](const RadialSolution& sol, StageRecord& st) {
    st.barrier = positive_barrier(sol, Lambda);
    rep.upper_bound_ok = rep.upper_bound_ok && st.barrier.pass;
    if (comparison != nullptr) {
      const auto ord = positive_barrier(sol, std::numeric_limits<double>::infinity(), comparison,
                                        plan.ordering_tol);
      rep.ordering_ok = rep.ordering_ok && ord.pass;
      st.barrier.max_violation = std::max(st.barrier.max_violation, ord.max_violation);
      st.barrier.pass = st.barrier.pass && ord.pass;
    }
  };

  for (std::size_t j = 0; j < plan.radii.size(); ++j) {
    const double level = interior ? eps_tilde : rep.epsilons[j];
    const RadialProfile psi = interior ? plan.psi.scaled(level) : RadialProfile::constant(level);
    auto problem = stage_problem(plan, plan.radii[j], psi, Lambda);
    const RadialSolution* prev = rep.solutions.empty() ? nullptr : &rep.solutions.back();
    std::vector<double> guess(problem.grid.size(), Lambda);
    if (prev != nullptr) guess = warm_start(problem, prev, Lambda);
    auto sol = newton_solve(problem, guess, plan.newton);
    if (!sol.converged && prev != nullptr) {
      sol = newton_solve(problem, std::vector<double>(problem.grid.size(), Lambda), plan.newton);
    }
    if (!sol.converged) {
      rep.truncated = true;
      rep.message = "stage " + std::to_string(j + 1) + " did not converge: " + sol.message;
      break;
    }
    auto st = describe_stage(plan, sol, prev, static_cast<int>(j + 1), level);
    audit(sol, st);
    rep.stages.push_back(st);
    rep.solutions.push_back(std::move(sol));
  }

  if (!rep.truncated && !interior) {
    // vanishing right-hand side on the final domain
    const DirichletProblem base =
        stage_problem(plan, plan.radii.back(), RadialProfile::constant(1.0), Lambda);
    std::vector<double> levels;
    for (double l = 0.5 * rep.epsilons.back(); l >= plan.psi_floor; l *= 0.5) levels.push_back(l);
    if (!levels.empty()) {
      ContinuationOptions opts{plan.newton, 0.0};
      auto cont = continuation_solve(rhs_sequence(base, levels), rep.solutions.back().u, opts);
      for (auto& sol : cont.stages) {
        StageRecord st;
        audit(sol, st);
        rep.limit_barriers.push_back(st.barrier);
        rep.limit_levels.push_back(levels[rep.limit_stages.size()]);
        rep.limit_stages.push_back(std::move(sol));
      }
      if (!cont.completed) {
        rep.truncated = true;
        rep.message = "vanishing-rhs continuation stopped: " + cont.message;
      }
    }
  }

  switch (rep.trend) {
    case EpsilonTrend::to_zero: rep.classification = Classification::case2_boundary_limit; break;
    case EpsilonTrend::bounded_below:
      rep.classification = Classification::case1_interior_limit;
      break;
    case EpsilonTrend::undetermined: rep.classification = Classification::undetermined; break;
  }
  if (!rep.solutions.empty()) {
    const double start = plan.topology == Topology::annulus ? std::max(plan.K, plan.inner_radius)
                                                            : plan.K;
    const auto& last = rep.limit_stages.empty() ? rep.solutions.back() : rep.limit_stages.back();
    rep.completeness = completeness_proxy(last, plan.background, start);
  }
  return rep;
}

}  // namespace yamabe
