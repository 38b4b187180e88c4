#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "yamabe/cones.hpp"
#include "yamabe/discretize.hpp"
#include "yamabe/geometry.hpp"
#include "yamabe/profile.hpp"

namespace yamabe {

/// negative: f(lambda(-g_u^{-1} A)) = psi; positive: f(lambda(g_u^{-1} A)) = psi.
enum class ProblemSign { negative, positive };

SchoutenSign schouten_sign(ProblemSign s) noexcept;
std::string to_string(ProblemSign s);

/// One radial Dirichlet problem for the conformal factor u of e^{2u} g_0.
struct DirichletProblem {
  RadialMetric background;
  SymmetricFunctional F;
  ProblemSign sign;
  RadialProfile psi;
  Grid grid;
  double left_value = 0.0;  // unused with a symmetric origin
  double right_value = 0.0;

  /// Dimensions agree, the grid lies in the background domain and psi > 0 on
  /// the grid. Throws DomainError / DimensionMismatch.
  void validate() const;
  DirichletProblem with_psi(RadialProfile new_psi) const;
};

/// min over the grid of the 1-homogeneous admissibility margin of the
/// background eigenvalues (sign of the problem).
double background_margin(const DirichletProblem& problem);

/// The discrete residual map and its tridiagonal Jacobian. Equation rows are
/// f(lambda(jet_i)) - psi(r_i) with central-difference jets (ghost
/// reflection at a symmetric origin); Dirichlet rows are u - xi.
class DiscreteOperator {
 public:
  explicit DiscreteOperator(const DirichletProblem& problem);

  const DirichletProblem& problem() const noexcept { return problem_; }
  bool is_equation_row(std::size_t i) const noexcept;

  /// Throws AdmissibilityError naming the first inadmissible equation node.
  /// When min_margin is given it receives the smallest admissibility margin
  /// over the equation rows.
  std::vector<double> residual(std::span<const double> u, double* min_margin = nullptr) const;
  /// Jacobian of residual() at u; rhs left zero.
  BandedSystem jacobian(std::span<const double> u) const;

  /// Eigenvalues at node i; Dirichlet ends use one-sided stencils.
  std::vector<double> eigenvalues(std::span<const double> u, std::size_t i) const;
  std::span<const double> psi_values() const noexcept { return psi_; }

 private:
  Jet node_jet(std::span<const double> u, std::size_t i) const;

  DirichletProblem problem_;
  std::vector<BackgroundFrame> frames_;
  std::vector<double> psi_;
  SchoutenSign sign_;
};

std::vector<double> residual(const DirichletProblem& problem, std::span<const double> u);
BandedSystem jacobian(const DirichletProblem& problem, std::span<const double> u);

struct NewtonOptions {
  double tol = 1e-10;
  int max_iter = 100;
  int max_halvings = 40;
  double margin_floor = 1e-12;
};

enum class SolveStatus {
  converged,
  max_iterations,
  line_search_failed,
  inadmissible_guess,
  singular_jacobian
};

std::string to_string(SolveStatus s);

struct RadialSolution {
  RadialSolution(Grid g, std::vector<double> values) : grid(g), u(std::move(values)) {}

  Grid grid;
  std::vector<double> u;
  int iterations = 0;
  double residual = std::numeric_limits<double>::infinity();
  /// max(tol, rounding floor of the discrete residual at the final iterate).
  double effective_tolerance = 0.0;
  /// 1-homogeneous admissibility margin and f at every node.
  std::vector<double> margin;
  std::vector<double> f_values;
  bool converged = false;
  int continuation_steps = 0;
  SolveStatus status = SolveStatus::max_iterations;
  std::string message;

  /// min margin over equation rows.
  double min_margin() const;
  std::vector<double> derivative() const { return d1(grid, u); }
};

/// Damped Newton. Boundary entries of the guess are replaced by the boundary
/// data. A step is accepted only if the trial iterate is admissible at every
/// equation node with margin above the floor and the residual sup-norm drops.
/// On failure the best iterate is returned with a non-converged status.
RadialSolution newton_solve(const DirichletProblem& problem, std::vector<double> guess,
                            const NewtonOptions& options = {});

/// Zero (negative case) or boundary constant (positive case) when admissible;
/// otherwise a hyperbolic or spherical cap fitted to the outer boundary value
/// on conformally flat backgrounds.
std::vector<double> default_initial_guess(const DirichletProblem& problem);

struct ContinuationOptions {
  NewtonOptions newton;
  double f_floor = 1e-6;
};

struct ContinuationResult {
  std::vector<RadialSolution> stages;
  bool completed = false;   // every stage converged
  bool reached_floor = false;
  std::string message;
};

/// Solves the stages in order, each warm-started from the previous solution,
/// and stops early once max f over the grid drops below f_floor.
ContinuationResult continuation_solve(const std::vector<DirichletProblem>& stages,
                                      std::vector<double> guess,
                                      const ContinuationOptions& options = {});

/// Copies of base with psi multiplied by each level.
std::vector<DirichletProblem> rhs_sequence(const DirichletProblem& base,
                                           std::span<const double> levels);

/// -Delta_g Phi + (n-2)/(4(n-1)) R_g Phi = 0 on the grid with Dirichlet data
/// (left ignored at a symmetric origin). Throws SingularSystemError or
/// DomainError if the solution is not positive.
RadialProfile conformal_laplacian_solve(const RadialMetric& background, const Grid& grid,
                                        double left_value, double right_value);

struct BarrierReport {
  bool applicable = true;
  bool pass = true;
  bool exempt = false;  // negative case: minimizer inside the core
  double bound = 0.0;
  double extreme = 0.0;  // min u (negative) or max u (positive)
  double extreme_radius = 0.0;
  double max_violation = 0.0;
};

/// min{0, (1/2) ln(c / sup psi)}.
double negative_case_lower_bound(double c, double sup_psi);

/// min u >= negative_case_lower_bound(c, sup_psi) - tol unless every minimizer
/// lies in r <= core_radius. Not applicable when c <= 0.
BarrierReport negative_barrier(const RadialSolution& solution, double c, double sup_psi,
                               double core_radius, double tol = 1e-9);

/// u <= Lambda + tol, and u >= comparison - tol when a comparison is given.
BarrierReport positive_barrier(const RadialSolution& solution, double Lambda,
                               const RadialProfile* comparison = nullptr, double tol = 1e-10);

}  // namespace yamabe
