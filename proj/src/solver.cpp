#include "yamabe/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "yamabe/errors.hpp"

namespace yamabe {

namespace {

double sup_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

std::vector<double> assemble(int n, double radial, double tangential) {
  std::vector<double> v(static_cast<std::size_t>(n), tangential);
  v[0] = radial;
  return v;
}

// Rounding floor of the discrete residual: a small multiple of machine
// epsilon times the magnitude of the terms that cancel in each row.
double rounding_floor(const BandedSystem& J, std::span<const double> u,
                      std::span<const double> psi, double boundary_scale) {
  const std::size_t n = J.size();
  double m = boundary_scale;
  for (std::size_t i = 0; i < n; ++i) {
    double row = std::abs(J.diag[i] * u[i]) + std::abs(psi[i]);
    if (i > 0) row += std::abs(J.sub[i] * u[i - 1]);
    if (i + 1 < n) row += std::abs(J.super[i] * u[i + 1]);
    m = std::max(m, row);
  }
  return 16.0 * std::numeric_limits<double>::epsilon() * m;
}

}  // namespace

SchoutenSign schouten_sign(ProblemSign s) noexcept {
  return s == ProblemSign::negative ? SchoutenSign::minus : SchoutenSign::plus;
}

std::string to_string(ProblemSign s) { return s == ProblemSign::negative ? "negative" : "positive"; }

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged:
      return "converged";
    case SolveStatus::max_iterations:
      return "max_iterations";
    case SolveStatus::line_search_failed:
      return "line_search_failed";
    case SolveStatus::inadmissible_guess:
      return "inadmissible_guess";
    case SolveStatus::singular_jacobian:
      return "singular_jacobian";
  }
  return "unknown";
}

void DirichletProblem::validate() const {
  if (F.dimension() != background.dimension()) {
    throw DimensionMismatch("functional dimension " + std::to_string(F.dimension()) +
                            " differs from metric dimension " +
                            std::to_string(background.dimension()));
  }
  const Interval dom = background.domain();
  if (!dom.contains(grid.r_min()) || !dom.contains(grid.r_max())) {
    std::ostringstream os;
    os << "grid [" << grid.r_min() << ", " << grid.r_max() << "] leaves the metric domain ["
       << dom.lo << ", " << dom.hi << "]";
    throw DomainError(os.str());
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = psi(grid.node(i));
    if (!(v > 0.0) || !std::isfinite(v)) {
      std::ostringstream os;
      os << "right-hand side must be positive, psi(" << grid.node(i) << ") = " << v;
      throw DomainError(os.str());
    }
  }
  if (!std::isfinite(left_value) || !std::isfinite(right_value)) {
    throw DomainError("boundary values must be finite");
  }
}

DirichletProblem DirichletProblem::with_psi(RadialProfile new_psi) const {
  DirichletProblem out = *this;
  out.psi = std::move(new_psi);
  return out;
}

double background_margin(const DirichletProblem& problem) {
  double m = std::numeric_limits<double>::infinity();
  const SchoutenSign s = schouten_sign(problem.sign);
  for (std::size_t i = 0; i < problem.grid.size(); ++i) {
    const auto lam = schouten(problem.background, problem.grid.node(i)).with_sign(s).assemble();
    m = std::min(m, admissibility_margin(problem.F.cone(), lam));
  }
  return m;
}

DiscreteOperator::DiscreteOperator(const DirichletProblem& problem)
    : problem_(problem), sign_(schouten_sign(problem.sign)) {
  problem_.validate();
  const Grid& g = problem_.grid;
  frames_.reserve(g.size());
  psi_.reserve(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    frames_.push_back(background_frame(problem_.background, g.node(i)));
    psi_.push_back(problem_.psi(g.node(i)));
  }
}

bool DiscreteOperator::is_equation_row(std::size_t i) const noexcept {
  const std::size_t n = problem_.grid.size();
  if (i + 1 == n) return false;
  if (i == 0) return problem_.grid.symmetric_origin();
  return true;
}

Jet DiscreteOperator::node_jet(std::span<const double> u, std::size_t i) const {
  const Grid& g = problem_.grid;
  const std::size_t n = g.size();
  const double h = g.spacing();
  const double h2 = h * h;
  if (i == 0) {
    if (g.symmetric_origin()) return {u[0], 0.0, 2.0 * (u[1] - u[0]) / h2};
    return {u[0], (4.0 * (u[1] - u[0]) - (u[2] - u[0])) / (2.0 * h),
            (2.0 * (u[0] - u[1]) - 3.0 * (u[1] - u[2]) + (u[2] - u[3])) / h2};
  }
  if (i + 1 == n) {
    return {u[i], (4.0 * (u[i] - u[i - 1]) - (u[i] - u[i - 2])) / (2.0 * h),
            (2.0 * (u[i] - u[i - 1]) - 3.0 * (u[i - 1] - u[i - 2]) + (u[i - 2] - u[i - 3])) / h2};
  }
  return {u[i], (u[i + 1] - u[i - 1]) / (2.0 * h), (u[i + 1] - 2.0 * u[i] + u[i - 1]) / h2};
}

std::vector<double> DiscreteOperator::eigenvalues(std::span<const double> u, std::size_t i) const {
  const EigenJet e = conformal_eigen_jet(frames_[i], node_jet(u, i), sign_);
  return assemble(problem_.background.dimension(), e.radial, e.tangential);
}

std::vector<double> DiscreteOperator::residual(std::span<const double> u,
                                               double* min_margin) const {
  const Grid& g = problem_.grid;
  const std::size_t n = g.size();
  if (u.size() != n) throw DimensionMismatch("iterate length differs from grid size");
  const int dim = problem_.background.dimension();
  std::vector<double> out(n);
  double mm = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    if (!is_equation_row(i)) {
      out[i] = u[i] - (i == 0 ? problem_.left_value : problem_.right_value);
      continue;
    }
    const EigenJet e = conformal_eigen_jet(frames_[i], node_jet(u, i), sign_);
    const auto lam = assemble(dim, e.radial, e.tangential);
    double value;
    try {
      value = f_value_and_gradient(problem_.F, lam).value;
    } catch (const AdmissibilityError& err) {
      std::ostringstream os;
      os << "inadmissible iterate at node " << i << " (r = " << g.node(i) << ")";
      throw AdmissibilityError(os.str(), err.min_sigma(), static_cast<std::ptrdiff_t>(i));
    }
    out[i] = value - psi_[i];
    if (min_margin != nullptr) mm = std::min(mm, admissibility_margin(problem_.F.cone(), lam));
  }
  if (min_margin != nullptr) *min_margin = mm;
  return out;
}

BandedSystem DiscreteOperator::jacobian(std::span<const double> u) const {
  const Grid& g = problem_.grid;
  const std::size_t n = g.size();
  if (u.size() != n) throw DimensionMismatch("iterate length differs from grid size");
  const int dim = problem_.background.dimension();
  const double h = g.spacing();
  const double h2 = h * h;
  BandedSystem J(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!is_equation_row(i)) {
      J.diag[i] = 1.0;
      continue;
    }
    const EigenJet e = conformal_eigen_jet(frames_[i], node_jet(u, i), sign_);
    const auto vg = f_value_and_gradient(problem_.F, assemble(dim, e.radial, e.tangential));
    const double gr = vg.gradient[0];
    const double gt = std::accumulate(vg.gradient.begin() + 1, vg.gradient.end(), 0.0);
    double df[3];
    for (int k = 0; k < 3; ++k) df[k] = gr * e.d_radial[k] + gt * e.d_tangential[k];
    if (i == 0) {
      J.diag[0] = df[0] - 2.0 * df[2] / h2;
      J.super[0] = 2.0 * df[2] / h2;
    } else {
      J.sub[i] = -df[1] / (2.0 * h) + df[2] / h2;
      J.diag[i] = df[0] - 2.0 * df[2] / h2;
      J.super[i] = df[1] / (2.0 * h) + df[2] / h2;
    }
  }
  return J;
}

std::vector<double> residual(const DirichletProblem& problem, std::span<const double> u) {
  return DiscreteOperator(problem).residual(u);
}

BandedSystem jacobian(const DirichletProblem& problem, std::span<const double> u) {
  return DiscreteOperator(problem).jacobian(u);
}

double RadialSolution::min_margin() const {
  double m = std::numeric_limits<double>::infinity();
  const std::size_t n = u.size();
  for (std::size_t i = 0; i < n; ++i) {
    const bool equation = i + 1 < n && (i > 0 || grid.symmetric_origin());
    if (equation) m = std::min(m, margin[i]);
  }
  return m;
}

namespace {

void fill_diagnostics(const DiscreteOperator& op, RadialSolution& sol) {
  const std::size_t n = sol.u.size();
  sol.margin.assign(n, 0.0);
  sol.f_values.assign(n, std::numeric_limits<double>::quiet_NaN());
  const auto& F = op.problem().F;
  for (std::size_t i = 0; i < n; ++i) {
    const auto lam = op.eigenvalues(sol.u, i);
    sol.margin[i] = admissibility_margin(F.cone(), lam);
    if (contains(F.cone(), lam) != Membership::exterior) sol.f_values[i] = f_eval(F, lam);
  }
}

}  // namespace

RadialSolution newton_solve(const DirichletProblem& problem, std::vector<double> guess,
                            const NewtonOptions& options) {
  const DiscreteOperator op(problem);
  const Grid& g = problem.grid;
  const std::size_t n = g.size();
  if (guess.size() != n) throw DimensionMismatch("initial guess length differs from grid size");
  if (!g.symmetric_origin()) guess.front() = problem.left_value;
  guess.back() = problem.right_value;

  RadialSolution sol{g, std::move(guess)};
  const double boundary_scale = std::max(std::abs(problem.left_value), std::abs(problem.right_value));
  std::vector<double> F;
  try {
    F = op.residual(sol.u);
  } catch (const AdmissibilityError& e) {
    sol.status = SolveStatus::inadmissible_guess;
    sol.message = std::string(e.what()) +
                  "; supply an admissible guess or solve by continuation from an admissible stage";
    fill_diagnostics(op, sol);
    return sol;
  }
  sol.residual = sup_norm(F);

  for (int it = 0;; ++it) {
    BandedSystem J = op.jacobian(sol.u);
    sol.effective_tolerance =
        std::max(options.tol, rounding_floor(J, sol.u, op.psi_values(), boundary_scale));
    if (sol.residual <= sol.effective_tolerance) {
      sol.converged = true;
      sol.status = SolveStatus::converged;
      break;
    }
    if (it >= options.max_iter) {
      sol.status = SolveStatus::max_iterations;
      sol.message = "no convergence after " + std::to_string(options.max_iter) + " iterations";
      break;
    }
    for (std::size_t i = 0; i < n; ++i) J.rhs[i] = -F[i];
    std::vector<double> delta;
    try {
      delta = solve_banded(J);
    } catch (const SingularSystemError& e) {
      sol.status = SolveStatus::singular_jacobian;
      sol.message = e.what();
      break;
    }

    bool accepted = false;
    double t = 1.0;
    std::vector<double> trial(n);
    for (int k = 0; k <= options.max_halvings; ++k, t *= 0.5) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = sol.u[i] + t * delta[i];
      double margin = 0.0;
      std::vector<double> Ft;
      try {
        Ft = op.residual(trial, &margin);
      } catch (const AdmissibilityError&) {
        continue;
      }
      if (!(margin > options.margin_floor)) continue;
      const double r = sup_norm(Ft);
      if (r < sol.residual) {
        sol.u.swap(trial);
        F = std::move(Ft);
        sol.residual = r;
        accepted = true;
        break;
      }
    }
    sol.iterations = it + 1;
    if (!accepted) {
      sol.status = SolveStatus::line_search_failed;
      std::ostringstream os;
      os << "line search failed after " << options.max_halvings
         << " halvings (residual " << sol.residual << ")";
      sol.message = os.str();
      break;
    }
  }
  fill_diagnostics(op, sol);
  return sol;
}

std::vector<double> default_initial_guess(const DirichletProblem& problem) {
  const Grid& g = problem.grid;
  const std::size_t n = g.size();
  const double left = g.symmetric_origin() ? problem.right_value : problem.left_value;
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / (n - 1);
    u[i] = (1.0 - t) * left + t * problem.right_value;
  }
  const DiscreteOperator op(problem);
  try {
    (void)op.residual(u);
    return u;
  } catch (const AdmissibilityError&) {
  }
  const auto* flat = problem.background.as_conformally_flat();
  if (flat == nullptr) return u;

  // Constant-curvature caps e^{2w}|dx|^2 with w = ln(2a/(a^2 -/+ r^2)) + c have
  // lambda(-/+A) = e^{-2c} e / 2, so c = -ln(psi)/2 matches f = psi at the
  // outer radius; a is fitted to the outer boundary value.
  const double R = g.r_max();
  const double c = -0.5 * std::log(problem.psi(R));
  const double q = std::exp(problem.right_value + flat->u0(R) - c);
  double a;
  if (problem.sign == ProblemSign::negative) {
    a = (1.0 + std::sqrt(1.0 + q * q * R * R)) / q;
  } else {
    const double disc = 1.0 - q * q * R * R;
    if (disc < 0.0) return u;
    a = (1.0 + std::sqrt(disc)) / q;
  }
  const double s = problem.sign == ProblemSign::negative ? -1.0 : 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = g.node(i);
    u[i] = std::log(2.0 * a / (a * a + s * r * r)) + c - flat->u0(r);
  }
  return u;
}

ContinuationResult continuation_solve(const std::vector<DirichletProblem>& stages,
                                      std::vector<double> guess,
                                      const ContinuationOptions& options) {
  ContinuationResult out;
  if (stages.empty()) {
    out.completed = true;
    return out;
  }
  for (std::size_t s = 0; s < stages.size(); ++s) {
    RadialSolution sol = newton_solve(stages[s], guess, options.newton);
    sol.continuation_steps = static_cast<int>(s);
    const bool ok = sol.converged;
    if (ok) guess = sol.u;
    double fmax = 0.0;
    for (double f : sol.f_values) {
      if (!std::isnan(f)) fmax = std::max(fmax, f);
    }
    out.stages.push_back(std::move(sol));
    if (!ok) {
      out.message = "stage " + std::to_string(s) + " failed: " + out.stages.back().message;
      return out;
    }
    if (fmax < options.f_floor) {
      out.reached_floor = true;
      out.completed = true;
      out.message = "f fell below the floor at stage " + std::to_string(s);
      return out;
    }
  }
  out.completed = true;
  return out;
}

std::vector<DirichletProblem> rhs_sequence(const DirichletProblem& base,
                                           std::span<const double> levels) {
  std::vector<DirichletProblem> out;
  out.reserve(levels.size());
  for (double level : levels) out.push_back(base.with_psi(base.psi.scaled(level)));
  return out;
}

RadialProfile conformal_laplacian_solve(const RadialMetric& background, const Grid& grid,
                                        double left_value, double right_value) {
  const Interval dom = background.domain();
  if (!dom.contains(grid.r_min()) || !dom.contains(grid.r_max())) {
    throw DomainError("grid leaves the metric domain");
  }
  const int n = background.dimension();
  const double cn = (n - 2.0) / (4.0 * (n - 1.0));
  const std::size_t N = grid.size();
  const double h = grid.spacing();
  const double h2 = h * h;
  const auto* flat = background.as_conformally_flat();
  BandedSystem sys(N);
  for (std::size_t i = 0; i < N; ++i) {
    const double r = grid.node(i);
    if ((i == 0 && !grid.symmetric_origin()) || i + 1 == N) {
      sys.diag[i] = 1.0;
      sys.rhs[i] = i == 0 ? left_value : right_value;
      continue;
    }
    // -(Phi'' + B Phi') + C Phi = 0 after multiplying through by e^{2 u0}.
    double B, C, second = 1.0;
    const double R = scalar_curvature(background, r);
    if (flat != nullptr) {
      const Jet u0 = flat->u0.jet(r);
      C = cn * R * std::exp(2.0 * u0.value);
      if (r == 0.0) {
        B = 0.0;
        second = n;  // Phi'' + (n-1) Phi'/r -> n Phi''
      } else {
        B = (n - 1.0) / r + (n - 2.0) * u0.d1;
      }
    } else {
      const Jet phi = background.as_warped()->warp.jet(r);
      if (!(phi.value > 0.0)) throw DomainError("warping function must be positive");
      B = (n - 1.0) * phi.d1 / phi.value;
      C = cn * R;
    }
    if (i == 0) {
      sys.diag[0] = 2.0 * second / h2 + C;
      sys.super[0] = -2.0 * second / h2;
    } else {
      sys.sub[i] = -(1.0 / h2 - B / (2.0 * h));
      sys.diag[i] = 2.0 / h2 + C;
      sys.super[i] = -(1.0 / h2 + B / (2.0 * h));
    }
  }
  auto phi = solve_banded(sys);
  for (std::size_t i = 0; i < N; ++i) {
    if (!(phi[i] > 0.0)) {
      std::ostringstream os;
      os << "conformal Laplacian solution is not positive at r = " << grid.node(i);
      throw DomainError(os.str());
    }
  }
  return RadialProfile::sampled(grid.nodes(), std::move(phi));
}

double negative_case_lower_bound(double c, double sup_psi) {
  if (!(c > 0.0) || !(sup_psi > 0.0)) throw DomainError("barrier constants must be positive");
  return std::min(0.0, 0.5 * std::log(c / sup_psi));
}

BarrierReport negative_barrier(const RadialSolution& solution, double c, double sup_psi,
                               double core_radius, double tol) {
  BarrierReport rep;
  // Prefer a minimizer outside the core when the minimum is attained at several nodes.
  std::size_t idx = 0;
  for (std::size_t i = 1; i < solution.u.size(); ++i) {
    const bool lower = solution.u[i] < solution.u[idx];
    const bool tie_outside = solution.u[i] == solution.u[idx] &&
                             solution.grid.node(idx) <= core_radius &&
                             solution.grid.node(i) > core_radius;
    if (lower || tie_outside) idx = i;
  }
  rep.extreme = solution.u[idx];
  rep.extreme_radius = solution.grid.node(idx);
  if (!(c > 0.0)) {
    rep.applicable = false;
    return rep;
  }
  rep.bound = negative_case_lower_bound(c, sup_psi);
  rep.max_violation = std::max(0.0, rep.bound - rep.extreme);
  if (rep.extreme_radius <= core_radius) {
    rep.exempt = true;
    return rep;
  }
  rep.pass = rep.extreme >= rep.bound - tol;
  return rep;
}

BarrierReport positive_barrier(const RadialSolution& solution, double Lambda,
                               const RadialProfile* comparison, double tol) {
  BarrierReport rep;
  rep.bound = Lambda;
  const auto it = std::max_element(solution.u.begin(), solution.u.end());
  rep.extreme = *it;
  rep.extreme_radius = solution.grid.node(static_cast<std::size_t>(it - solution.u.begin()));
  rep.max_violation = std::max(0.0, rep.extreme - Lambda);
  if (comparison != nullptr) {
    for (std::size_t i = 0; i < solution.u.size(); ++i) {
      const double below = (*comparison)(solution.grid.node(i)) - solution.u[i];
      rep.max_violation = std::max(rep.max_violation, below);
    }
  }
  rep.pass = rep.max_violation <= tol;
  return rep;
}

}  // namespace yamabe
