#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "yamabe/exhaustion.hpp"

namespace yamabe {

struct ProfileSpec {
  std::string name = "constant";
  ProfileParams params{{"c", 1.0}};

  RadialProfile build() const { return RadialProfile::from_spec(name, params); }
  friend bool operator==(const ProfileSpec&, const ProfileSpec&) = default;
};

struct ConeSection {
  std::string family = "gamma-k";  // gamma-k or tau
  int n = 5;
  int k = 2;
  std::vector<double> tau;  // outermost first; family tau only
  friend bool operator==(const ConeSection&, const ConeSection&) = default;
};

struct FunctionalSection {
  bool normalize = true;
  friend bool operator==(const FunctionalSection&, const FunctionalSection&) = default;
};

/// kind: euclidean, conformally_flat (profile = u0), warped (profile = Phi,
/// fiber_sign) or schwarzschild (mu, m). The dimension comes from the cone.
struct MetricSection {
  std::string kind = "euclidean";
  ProfileSpec profile{"constant", {{"c", 0.0}}};
  int fiber_sign = 1;
  double mu = 0.0;
  double m = 0.0;
  std::optional<std::vector<double>> domain;  // [lo, hi]
  friend bool operator==(const MetricSection&, const MetricSection&) = default;
};

struct ProblemSection {
  std::string sign = "negative";
  ProfileSpec psi;
  double r_min = 0.0;
  double r_max = 1.0;
  std::string left = "symmetry";  // symmetry or dirichlet
  std::size_t nodes = 401;
  double left_value = 0.0;
  double right_value = 0.0;
  std::optional<ProfileSpec> exact;
  friend bool operator==(const ProblemSection&, const ProblemSection&) = default;
};

struct NewtonSection {
  double tol = 1e-10;
  int max_iter = 100;
  int max_halvings = 40;
  double margin_floor = 1e-12;
  friend bool operator==(const NewtonSection&, const NewtonSection&) = default;
};

/// kind: negative, negative_degenerate or positive. The problem section
/// supplies sign and psi.
struct ExhaustionSection {
  std::string kind = "negative";
  std::string topology = "ball";
  std::vector<double> radii;
  double K = 0.5;
  double K0 = 0.0;
  double inner_radius = 0.0;
  std::size_t nodes = 401;
  double Lambda = 0.0;
  bool linear_comparison = false;  // positive runs: audit against the linear solve
  double psi_floor = 1e-12;
  double ordering_tol = 1e-6;
  friend bool operator==(const ExhaustionSection&, const ExhaustionSection&) = default;
};

struct OutputSection {
  std::string directory;  // empty: $YAMABE_OUTPUT_ROOT or ./yamabe-runs
  std::vector<std::string> formats{"json", "csv"};
  std::string run_id = "run";
  friend bool operator==(const OutputSection&, const OutputSection&) = default;
};

struct ExperimentConfig {
  ConeSection cone;
  FunctionalSection functional;
  MetricSection metric;
  ProblemSection problem;
  NewtonSection newton;
  std::optional<ExhaustionSection> exhaustion;
  OutputSection output;
  std::uint64_t seed = 20240601;
  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Strict: unknown keys and wrong types raise ConfigError naming the path.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& c);
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string serialize(const ExperimentConfig& c);

ConeSpec build_cone(const ExperimentConfig& c);
SymmetricFunctional build_functional(const ExperimentConfig& c);
RadialMetric build_metric(const ExperimentConfig& c);
DirichletProblem build_problem(const ExperimentConfig& c);
NewtonOptions build_newton(const ExperimentConfig& c);
/// Requires an exhaustion section.
ExhaustionPlan build_plan(const ExperimentConfig& c);

/// One Dirichlet solve from the default initial guess.
RadialSolution run_solve(const ExperimentConfig& c);
/// Dispatches on exhaustion.kind; positive runs with linear_comparison get
/// the conformal Laplacian comparison profile.
ExhaustionReport run_exhaustion(const ExperimentConfig& c);

/// Builds every object the config describes and runs their precondition
/// checks without solving anything. Throws ConfigError, DomainError or
/// DimensionMismatch.
void validate(const ExperimentConfig& c);

/// The directory a run writes to: output.directory, else $YAMABE_OUTPUT_ROOT,
/// else ./yamabe-runs; followed by the run id.
std::string run_directory(const ExperimentConfig& c);

}  // namespace yamabe
