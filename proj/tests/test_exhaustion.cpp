#include <cmath>
#include <vector>

#include "doctest.h"
#include "yamabe/errors.hpp"
#include "yamabe/exhaustion.hpp"

using namespace yamabe;

namespace {

SymmetricFunctional normalized(int n, int k) {
  return normalize(SymmetricFunctional(ConeSpec::elementary(n, k)));
}

ExhaustionPlan euclidean_plan(int k) {
  ExhaustionPlan p{RadialMetric::euclidean(5), normalized(5, k), ProblemSign::negative,
                   RadialProfile::constant(1.0)};
  p.radii = geometric_radii(2.0, 5);
  p.K = 1.0;
  p.K0 = p.radii.back();
  p.nodes = 801;
  return p;
}

ExhaustionPlan cosh_plan() {
  ExhaustionPlan p{RadialMetric::warped_product(5, RadialProfile::cosh_profile(), -1),
                   normalized(5, 2), ProblemSign::negative, RadialProfile::constant(1.0)};
  p.topology = Topology::capped_end;
  p.radii = geometric_radii(1.0, 5);
  p.K = 1.0;
  p.nodes = 201;
  return p;
}

}  // namespace

TEST_CASE("classify: traces") {
  const std::vector<double> flat_inf{0.0, 0.0, 0.0, 0.0, 0.0};
  const std::vector<double> zero_cauchy{kNaN, 0.0, 0.0, 0.0, 0.0};
  CHECK(classify(flat_inf, zero_cauchy) == Classification::case1_interior_limit);

  const std::vector<double> shrinking{kNaN, 0.4, 0.2, 0.1, 0.05};
  const std::vector<double> settling{-0.1, -0.5, -0.7, -0.8, -0.85};
  CHECK(classify(settling, shrinking) == Classification::case1_interior_limit);

  const std::vector<double> dropping{-0.1, -0.8, -1.5, -2.2, -2.9};
  const std::vector<double> steady{kNaN, 0.7, 0.7, 0.7, 0.7};
  CHECK(classify(dropping, steady) == Classification::case2_boundary_limit);

  const std::vector<double> oscillating{0.0, -0.3, 0.0, -0.3, 0.0};
  const std::vector<double> level{kNaN, 0.3, 0.3, 0.3, 0.3};
  CHECK(classify(oscillating, level) == Classification::undetermined);

  const std::vector<double> short_inf{0.0, -1.0, -2.0};
  const std::vector<double> short_c{kNaN, 1.0, 1.0};
  CHECK(classify(short_inf, short_c) == Classification::undetermined);
}

TEST_CASE("classify_epsilons") {
  const std::vector<double> halving{1.0, 0.5, 0.25, 0.125};
  CHECK(classify_epsilons(halving) == EpsilonTrend::to_zero);
  const std::vector<double> flat{0.5, 0.5, 0.5, 0.5};
  CHECK(classify_epsilons(flat) == EpsilonTrend::bounded_below);
  const std::vector<double> slow{1.0, 0.9, 0.8, 0.7};
  CHECK(classify_epsilons(slow) == EpsilonTrend::undetermined);
}

TEST_CASE("completeness proxy: log density") {
  // e^0: length R - K grows without bound; r^{-2}: bounded.
  const auto full = completeness_proxy(RadialProfile::constant(0.0), 1.0, 256.0);
  CHECK(full.unbounded);
  CHECK(full.lengths.back() == doctest::Approx(255.0).epsilon(1e-9));
  const auto finite = completeness_proxy(RadialProfile::log_radius(-2.0), 1.0, 256.0);
  CHECK_FALSE(finite.unbounded);
  CHECK(finite.lengths.back() == doctest::Approx(1.0 - 1.0 / 256.0).epsilon(1e-4));
}

TEST_CASE("plan validation") {
  auto p = euclidean_plan(2);
  p.radii = {4.0, 2.0};
  CHECK_THROWS_AS(p.validate(), DomainError);
  p = euclidean_plan(2);
  p.K = 10.0;
  CHECK_THROWS_AS(p.validate(), DomainError);
  p = euclidean_plan(2);
  p.F = normalized(4, 2);
  CHECK_THROWS_AS(p.validate(), DimensionMismatch);
  p = euclidean_plan(2);
  p.topology = Topology::annulus;
  CHECK_THROWS_AS(p.validate(), DomainError);
  CHECK(topology_from_string("capped_end") == Topology::capped_end);
  CHECK_THROWS_AS(topology_from_string("torus"), ConfigError);
}

TEST_CASE("negative run: cosh end stays at the background") {
  const auto rep = run_negative(cosh_plan());
  REQUIRE_FALSE(rep.truncated);
  REQUIRE(rep.stages.size() == 5);
  for (const auto& sol : rep.solutions) {
    for (double v : sol.u) CHECK(std::abs(v) < 1e-12);
  }
  CHECK(rep.classification == Classification::case1_interior_limit);
  CHECK(rep.barrier_c == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.barrier_ok);
  for (const auto& st : rep.stages) {
    CHECK(st.barrier.applicable);
    CHECK(std::abs(st.barrier.bound) < 1e-12);
  }
  CHECK(rep.completeness.unbounded);
}

TEST_CASE("negative run: euclidean balls blow down") {
  const auto plan = euclidean_plan(2);
  const auto rep = run_negative(plan);
  REQUIRE_FALSE(rep.truncated);
  CHECK(rep.classification == Classification::case2_boundary_limit);
  for (std::size_t j = 0; j < rep.stages.size(); ++j) {
    const auto& st = rep.stages[j];
    const double R = plan.radii[j];
    // closed-form cap with zero boundary value, minimum at the origin
    const double exact = std::log(2.0 / (1.0 + std::sqrt(1.0 + R * R)));
    CHECK(st.inf_core == doctest::Approx(exact).epsilon(2e-3));
    CHECK(st.f_level == doctest::Approx(std::exp(2.0 * st.inf_core)));
    // shifting u rounds second differences at about eps |u| / h^2
    CHECK(st.scaled_identity_error < 1e-9);
    CHECK(st.min_uhat == 0.0);
    if (j > 0) {
      CHECK(st.f_level < rep.stages[j - 1].f_level);
      CHECK(st.cauchy_uhat < st.cauchy_u);
    }
    CHECK(st.barrier.exempt);
  }
  CHECK_FALSE(rep.uniqueness_regime);
}

TEST_CASE("negative run: stages decrease in the uniqueness regime") {
  const auto rep = run_negative(euclidean_plan(1));
  REQUIRE_FALSE(rep.truncated);
  CHECK(rep.uniqueness_regime);
  CHECK(rep.monotone_ok);
  for (std::size_t j = 1; j < rep.stages.size(); ++j) {
    CHECK(rep.stages[j].monotone_checked);
    CHECK(rep.stages[j].inf_core < rep.stages[j - 1].inf_core);
  }
}

TEST_CASE("degenerate run") {
  auto plan = euclidean_plan(2);
  const auto rep = run_negative_degenerate(plan);
  REQUIRE_FALSE(rep.truncated);
  CHECK(rep.upper_bound_ok);
  for (std::size_t j = 0; j < rep.stages.size(); ++j) {
    const double level = 1.0 / static_cast<double>(j + 1);
    CHECK(rep.stages[j].psi_level == doctest::Approx(level));
    CHECK(rep.stages[j].max_u <= 1e-10);
    // cap with f = 1/j and zero boundary value
    const double R = plan.radii[j];
    const double a = std::sqrt(1.0 / level) + std::sqrt(1.0 / level + R * R);
    const double exact = std::log(2.0 * a / (a * a)) + 0.5 * std::log(1.0 / level);
    CHECK(rep.stages[j].inf_core == doctest::Approx(exact).epsilon(2e-3));
  }
  CHECK_THROWS_AS(run_negative_degenerate(cosh_plan()), PreconditionError);
}

TEST_CASE("positive run: cylinder keeps a bounded rhs") {
  ExhaustionPlan p{RadialMetric::conformally_flat(5, RadialProfile::log_radius(-1.0), {0.5, 1e6}),
                   normalized(5, 2), ProblemSign::positive, RadialProfile::constant(1.0)};
  p.topology = Topology::annulus;
  p.inner_radius = 1.0;
  p.radii = geometric_radii(2.0, 4);
  p.K = 2.0;
  p.nodes = 401;
  const auto rep = run_positive(p, 0.0);
  REQUIRE_FALSE(rep.truncated);
  CHECK(rep.trend == EpsilonTrend::bounded_below);
  CHECK(rep.classification == Classification::case1_interior_limit);
  CHECK(rep.limit_stages.empty());
  for (const auto& sol : rep.solutions) {
    for (double v : sol.u) CHECK(std::abs(v) < 1e-9);
  }
  CHECK(rep.upper_bound_ok);
}

TEST_CASE("positive run: schwarzschild-type end tends to the linear solution") {
  const int n = 5;
  const auto bg = schwarzschild_type(n, 3.0, 1.0);
  ExhaustionPlan p{bg, normalized(n, 1), ProblemSign::positive, RadialProfile::constant(1.0)};
  p.topology = Topology::annulus;
  p.inner_radius = 1.0;
  p.radii = geometric_radii(4.0, 4);
  p.K = 2.0;
  p.nodes = 2001;
  p.psi_floor = 1e-10;
  const Grid g(1.0, p.radii.back(), p.nodes, LeftBoundary::dirichlet);
  const auto phi = conformal_laplacian_solve(bg, g, 1.0, 1.0);
  std::vector<double> r(g.size());
  std::vector<double> w(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    r[i] = g.node(i);
    w[i] = 2.0 / (n - 2) * std::log(phi(r[i]));
  }
  const auto comparison = RadialProfile::sampled(r, w);
  const auto rep = run_positive(p, 0.0, &comparison);
  REQUIRE_FALSE(rep.truncated);
  CHECK(rep.trend == EpsilonTrend::to_zero);
  CHECK(rep.upper_bound_ok);
  CHECK(rep.ordering_ok);
  REQUIRE_FALSE(rep.limit_stages.empty());
  const auto& last = rep.limit_stages.back();
  double err = 0.0;
  for (std::size_t i = 0; i < last.u.size(); ++i) err = std::max(err, std::abs(last.u[i] - w[i]));
  CHECK(err < 1e-6);

  // too small a Dirichlet value puts the comparison above the solutions
  const auto low = run_positive(p, -0.5, &comparison);
  CHECK_FALSE(low.ordering_ok);
}
