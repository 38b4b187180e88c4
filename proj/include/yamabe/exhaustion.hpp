#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "yamabe/solver.hpp"

namespace yamabe {

/// ball and capped_end: [0, R_j] with a symmetric origin. annulus: [inner, R_j]
/// with the same Dirichlet value at both ends.
enum class Topology { ball, capped_end, annulus };

std::string to_string(Topology t);
Topology topology_from_string(const std::string& s);

struct ExhaustionPlan {
  ExhaustionPlan(RadialMetric bg, SymmetricFunctional f, ProblemSign s, RadialProfile rhs)
      : background(std::move(bg)), F(std::move(f)), sign(s), psi(std::move(rhs)) {}

  RadialMetric background;
  SymmetricFunctional F;
  ProblemSign sign;
  RadialProfile psi;
  Topology topology = Topology::ball;
  std::vector<double> radii;
  double K = 0.5;   // M_1 = {r <= K}
  double K0 = 0.0;  // core where background admissibility is not required
  double inner_radius = 0.0;
  std::size_t nodes = 401;
  NewtonOptions newton;
  /// Positive runs: the vanishing-rhs continuation on the final domain stops
  /// once psi drops below this level.
  double psi_floor = 1e-12;
  /// Positive runs: slack in the comparison <= u_j audit. The comparison comes
  /// from a different (linear) discretization, so the two agree only to O(h^2).
  double ordering_tol = 1e-6;

  /// Radii strictly increasing, K <= R_1 and the grids fit the metric domain.
  void validate() const;
};

/// R_1 * 2^{j-1}, j = 1..J.
std::vector<double> geometric_radii(double R1, int J);

enum class Classification { case1_interior_limit, case2_boundary_limit, undetermined };

std::string to_string(Classification c);
/// "case1", "case2" or "undetermined".
std::string short_label(Classification c);

/// case2 when each of the last three steps of inf_trace drops by >= 0.5;
/// otherwise case1 when each of the last (up to three) Cauchy differences
/// shrinks by >= 25% or is below 1e-12; otherwise undetermined. Fewer than
/// four stages is always undetermined. cauchy_trace[0] is ignored.
Classification classify(std::span<const double> inf_trace, std::span<const double> cauchy_trace);

struct CompletenessReport {
  std::vector<double> probes;
  std::vector<double> lengths;  // L(probe) = int_K^probe e^{u + u0} dr
  bool unbounded = false;
  double last_increment_ratio = std::numeric_limits<double>::quiet_NaN();
};

/// Trapezoid rule on a fine subdivision of geometric probes in [K, R]; the
/// trend is unbounded when the last increment ratio is >= 0.75.
CompletenessReport completeness_proxy(const RadialProfile& log_length_density, double K, double R,
                                      std::size_t probes = 8);
CompletenessReport completeness_proxy(const RadialSolution& solution,
                                      const RadialMetric& background, double K,
                                      std::size_t probes = 8);

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct StageRecord {
  int index = 0;
  double R = 0.0;
  double psi_level = 1.0;  // multiplier applied to psi at this stage
  bool converged = false;
  std::string status;
  int iterations = 0;
  double residual = kNaN;
  double inf_core = kNaN;  // min over M_1
  double min_u = kNaN;
  double max_u = kNaN;
  double cauchy_u = kNaN;  // sup over M_1 of |u_j - u_{j-1}|
  double cauchy_du = kNaN;
  double f_min = kNaN;
  double f_max = kNaN;
  double margin = kNaN;
  // normalized u_hat = u - inf_core (filled for boundary-limit runs)
  double f_level = kNaN;  // e^{2 inf_core} sup psi
  double min_uhat = kNaN;  // min over the core of u - inf_core
  double cauchy_uhat = kNaN;
  double cauchy_duhat = kNaN;
  double scaled_identity_error = kNaN;
  BarrierReport barrier;
  bool monotone_checked = false;
  bool monotone_ok = true;
  double monotone_violation = 0.0;
};

enum class EpsilonTrend { to_zero, bounded_below, undetermined };
std::string to_string(EpsilonTrend t);

struct ExhaustionReport {
  std::string kind;  // negative, negative_degenerate, positive
  std::vector<StageRecord> stages;
  std::vector<RadialSolution> solutions;
  Classification classification = Classification::undetermined;
  CompletenessReport completeness;
  bool truncated = false;
  std::string message;

  // audits
  double barrier_c = kNaN;  // inf of background f outside K0
  double sup_psi = kNaN;
  bool barrier_ok = true;
  bool uniqueness_regime = false;
  bool monotone_ok = true;
  bool upper_bound_ok = true;  // u_j <= 0 (degenerate) or u_j <= Lambda (positive)
  bool ordering_ok = true;     // positive: comparison <= u_j

  // positive runs
  double Lambda = kNaN;
  std::vector<double> epsilons;
  EpsilonTrend trend = EpsilonTrend::undetermined;
  std::vector<RadialSolution> limit_stages;  // continuation on the final domain
  std::vector<double> limit_levels;
  std::vector<BarrierReport> limit_barriers;

  bool audits_ok() const { return barrier_ok && monotone_ok && upper_bound_ok && ordering_ok; }
};

/// Background scalar curvature >= 0 on the largest domain. Throws
/// PreconditionError.
void check_degenerate_precondition(const ExhaustionPlan& plan);
/// Background eigenvalues interior to the cone on the largest domain. Throws
/// PreconditionError.
void check_positive_precondition(const ExhaustionPlan& plan);

/// Dirichlet problems with zero boundary data on every domain, with the dichotomy
/// traces, normalized traces for boundary-limit runs and the lower-bound audit.
ExhaustionReport run_negative(const ExhaustionPlan& plan);

/// Stage j solves with right-hand side psi / j and audits u_j <= 0. Throws
/// PreconditionError if the background scalar curvature is negative
/// somewhere on the largest domain.
ExhaustionReport run_negative_degenerate(const ExhaustionPlan& plan);

/// Dirichlet value Lambda on every domain, right-hand side
/// eps_j = e^{-2 Lambda} min f(background) (or eps_tilde psi when eps_j stays
/// bounded below). Audits u_j <= Lambda and, when given, comparison <= u_j.
/// Throws PreconditionError if the background is not admissible.
ExhaustionReport run_positive(const ExhaustionPlan& plan, double Lambda,
                              const RadialProfile* comparison = nullptr);

/// (2/(n-2)) ln Phi for the conformal Laplacian solution Phi on the largest
/// domain with boundary value e^{(n-2) Lambda / 2}, solved on a grid
/// `refine` times finer than the stage grids so that interpolating it onto
/// them stays below plan.ordering_tol.
RadialProfile linear_comparison(const ExhaustionPlan& plan, double Lambda, int refine = 8);

/// Classifies a positive run's eps sequence: to_zero when each of the last
/// three ratios is <= 0.75, bounded_below when the last relative change is
/// < 1%.
EpsilonTrend classify_epsilons(std::span<const double> eps);

}  // namespace yamabe
