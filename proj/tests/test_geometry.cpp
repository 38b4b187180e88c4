#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "yamabe/errors.hpp"
#include "yamabe/geometry.hpp"

using namespace yamabe;

namespace {

std::vector<RadialMetric> warped_samples(int n) {
  return {
      RadialMetric::warped_product(n, RadialProfile::sinh_profile(), 1, {0.1, 50}),
      RadialMetric::warped_product(n, RadialProfile::cosh_profile(), -1, {0, 50}),
      RadialMetric::warped_product(n, RadialProfile::exp_profile(), 0, {-10, 50}),
      RadialMetric::warped_product(n, RadialProfile::exp_sin(0.3), -1, {0, 100}),
      RadialMetric::warped_product(n, RadialProfile::power(1.0, 1.7), 1, {0.2, 20}),
  };
}

}  // namespace

TEST_CASE("profile derivatives match finite differences") {
  const std::vector<std::pair<RadialProfile, double>> cases = {
      {RadialProfile::sinh_profile(), 0.7},
      {RadialProfile::cosh_profile(), 1.3},
      {RadialProfile::exp_profile(), -0.4},
      {RadialProfile::exp_sin(0.1), 2.2},
      {RadialProfile::schwarzschild_factor(2.5, 1.0), 1.1},
      {RadialProfile::hyperbolic_cap(1.2), 0.5},
      {RadialProfile::spherical_cap(0.8), 0.9},
      {RadialProfile::log_radius(-1.0), 2.0},
      {RadialProfile::power(2.0, -1.5), 1.7},
      {RadialProfile::bump(0.3, 1.0, 0.8), 1.25},
      {RadialProfile::identity(), 3.0},
  };
  for (const auto& [p, r] : cases) {
    auto f = [&](double x) { return p(x); };
    const Jet j = p.jet(r);
    CHECK(oracle::central_difference(f, r, 1e-5) == doctest::Approx(j.d1).epsilon(1e-7));
    CHECK(oracle::second_difference(f, r, 1e-4) == doctest::Approx(j.d2).epsilon(1e-5));
    if (p.name() != "identity") {
      const auto back = RadialProfile::from_spec(p.name(), p.params());
      CHECK(back(r) == p(r));
    }
  }
  CHECK(RadialProfile::bump(1.0, 0.0, 1.0)(1.5) == 0.0);
  CHECK(RadialProfile::bump(1.0, 0.0, 1.0)(0.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(RadialProfile::from_spec("nope", {}), ConfigError);
  CHECK_THROWS_AS(RadialProfile::from_spec("power", {{"c", 1.0}}), ConfigError);
  CHECK_THROWS_AS(RadialProfile::hyperbolic_cap(1.0)(1.0), DomainError);
}

TEST_CASE("warped-product Schouten constants") {
  for (int n : {3, 5, 8}) {
    for (double r : {0.3, 1.0, 4.0, 11.0}) {
      for (const auto& m : {RadialMetric::warped_product(n, RadialProfile::sinh_profile(), 1),
                            RadialMetric::warped_product(n, RadialProfile::exp_profile(), 0),
                            RadialMetric::warped_product(n, RadialProfile::cosh_profile(), -1)}) {
        const auto s = warped_schouten(m, r);
        CHECK(s.sign == SchoutenSign::minus);
        CHECK(std::abs(s.chi1 - 0.5) <= 1e-12);
        CHECK(std::abs(s.chi2) <= 1e-12);
      }
      const auto flat = warped_schouten(
          RadialMetric::warped_product(n, RadialProfile::identity(), 1), r);
      CHECK(flat.chi1 == 0.0);
      CHECK(flat.chi2 == 0.0);
    }
  }
  CHECK_THROWS_AS(
      warped_schouten(RadialMetric::warped_product(4, RadialProfile::identity(), 1, {-1, 1}), -0.5),
      DomainError);
}

TEST_CASE("warped Ricci examples") {
  const int n = 6;
  const auto ric = warped_ricci_scalar(
      RadialMetric::warped_product(n, RadialProfile::cosh_profile(), -1), 0.9);
  CHECK(ric.radial == doctest::Approx(-(n - 1)));
  CHECK(ric.tangential == doctest::Approx(-(n - 1)));
  CHECK(ric.scalar == doctest::Approx(-n * (n - 1)));
  const auto zero =
      warped_ricci_scalar(RadialMetric::warped_product(n, RadialProfile::identity(), 1), 2.0);
  CHECK(zero.radial == 0.0);
  CHECK(zero.tangential == 0.0);
  CHECK(zero.scalar == 0.0);
}

TEST_CASE("Schouten from Ricci reproduces warped_schouten") {
  std::mt19937_64 rng(8);
  for (int n : {3, 4, 7}) {
    for (const auto& m : warped_samples(n)) {
      std::uniform_real_distribution<double> ur(std::max(m.domain().lo, 0.1),
                                                std::min(m.domain().hi, 20.0));
      for (int i = 0; i < 100; ++i) {
        const double r = ur(rng);
        const auto ric = warped_ricci_scalar(m, r);
        const auto [ar, at] = oracle::schouten_from_ricci(n, ric.radial, ric.tangential);
        const auto s = warped_schouten(m, r).with_sign(SchoutenSign::plus);
        const double scale = 1.0 + std::abs(ar) + std::abs(at);
        CHECK(std::abs(s.radial() - ar) <= 1e-10 * scale);
        CHECK(std::abs(s.tangential() - at) <= 1e-10 * scale);
        CHECK(ric.scalar == doctest::Approx(ric.radial + (n - 1) * ric.tangential));
        CHECK(scalar_curvature(m, r) == doctest::Approx(ric.scalar).epsilon(1e-10));
        CHECK(scalar_curvature(m, r) == doctest::Approx(2.0 * (n - 1) * s.trace()).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("sign flag round trip") {
  const auto s = warped_schouten(
      RadialMetric::warped_product(5, RadialProfile::exp_sin(0.2), -1), 1.3);
  const auto a = s.assemble();
  const auto b = s.flipped().assemble();
  REQUIRE(a.size() == 5);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(b[i] == -a[i]);
  CHECK(s.flipped().flipped().assemble() == a);
  CHECK(s.flipped().sign == SchoutenSign::plus);
}

TEST_CASE("radial conformal Schouten") {
  const int n = 5;
  const auto euc = RadialMetric::euclidean(n);
  for (double r : {0.0, 0.5, 3.0}) {
    const auto s = radial_conformal_schouten(euc, r);
    CHECK(s.chi1 == 0.0);
    CHECK(s.chi2 == 0.0);
    CHECK(scalar_curvature(euc, r) == 0.0);
  }
  // hyperbolic ball: -A eigenvalues are 1/2
  const auto hyp = RadialMetric::conformally_flat(n, RadialProfile::hyperbolic_cap(1.0), {0, 0.99});
  for (double r : {0.0, 0.2, 0.6, 0.95}) {
    const auto lam = radial_conformal_schouten(hyp, r).flipped().assemble();
    for (double x : lam) CHECK(x == doctest::Approx(0.5).epsilon(1e-12));
    if (r > 0) {
      const Jet w = RadialProfile::hyperbolic_cap(1.0).jet(r);
      const auto [ar, at] = oracle::flat_conformal_plus_a(r, w.value, w.d1, w.d2);
      const auto s = radial_conformal_schouten(hyp, r);
      CHECK(s.radial() == doctest::Approx(ar).epsilon(1e-12));
      CHECK(s.tangential() == doctest::Approx(at).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(radial_conformal_schouten(
                      RadialMetric::conformally_flat(n, RadialProfile::power(1.0, 1.0), {0, 1}), 0.0),
                  DomainError);
}

TEST_CASE("Schwarzschild-type boundary certificate") {
  for (int n : {4, 5, 6}) {
    for (int k = 1; 2 * k < n; ++k) {
      const auto cone = ConeSpec::elementary(n, k);
      const double mu = mu_plus(cone);
      if (!(mu > 1.0)) continue;
      for (double m : {0.5, 1.0, 2.0}) {
        const auto g = schwarzschild_type(n, mu, m);
        for (double r = 0.5; r <= 20.0; r += 0.37) {
          const auto s = radial_conformal_schouten(g, r);
          CHECK(s.chi2 == doctest::Approx((mu + 1.0) * s.chi1).epsilon(1e-10));
          const auto lam = s.assemble();
          CHECK(contains(cone, lam) == Membership::boundary);
          for (int kp = 1; kp < k; ++kp) {
            CHECK(contains(ConeSpec::elementary(n, kp), lam) == Membership::interior);
          }
        }
      }
    }
  }
  // scalar curvature: positive for mu < n - 1, zero for classical Schwarzschild
  const auto g2 = schwarzschild_type(4, 2.0, 1.0);
  const auto g3 = schwarzschild_type(4, 3.0, 1.0);
  for (double r : {0.7, 2.0, 9.0}) {
    CHECK(scalar_curvature(g2, r) > 0.0);
    CHECK(std::abs(sigma_k(radial_conformal_schouten(g3, r).assemble(), 1)) < 1e-13);
    CHECK(std::abs(scalar_curvature(g3, r)) < 1e-13);
  }
  for (double x : radial_conformal_schouten(schwarzschild_type(5, 1.5, 0.0), 1.0).assemble()) {
    CHECK(x == 0.0);
  }
  CHECK_THROWS_AS(schwarzschild_type(5, 1.0, 1.0), DomainError);
}

TEST_CASE("conformal change of the flat metric") {
  const int n = 6;
  const auto euc = RadialMetric::euclidean(n);
  const auto sphere = RadialProfile::spherical_cap(1.0);
  for (double r : {0.0, 0.3, 1.0, 4.0}) {
    for (double x : conformal_change_schouten(euc, sphere, r).assemble()) {
      CHECK(x == doctest::Approx(0.5).epsilon(1e-12));
    }
  }
  // transformation-law route agrees with the v-formula route
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> ur(0.05, 6.0);
  const auto sch = RadialProfile::schwarzschild_factor(2.0, 1.3);
  const auto bump = RadialProfile::bump(0.05, 2.0, 0.7);
  const auto base = RadialMetric::conformally_flat(n, sch, {0});
  const auto combined = RadialMetric::conformally_flat(n, sch + bump, {0});
  for (int i = 0; i < 100; ++i) {
    const double r = ur(rng);
    const auto a = conformal_change_schouten(base, bump, r).assemble();
    const auto b = radial_conformal_schouten(combined, r).assemble();
    for (int j = 0; j < n; ++j) CHECK(a[j] == doctest::Approx(b[j]).epsilon(1e-10));
  }
}

TEST_CASE("transformation-law cocycle") {
  const int n = 5;
  const auto u1 = RadialProfile::spherical_cap(1.5);
  const auto u2 = RadialProfile::bump(0.2, 0.0, 2.0);
  const auto euc = RadialMetric::euclidean(n);
  const auto after_u1 = RadialMetric::conformally_flat(n, u1);
  for (double r : {0.0, 0.4, 1.1, 1.9, 3.0}) {
    const auto a = conformal_change_schouten(after_u1, u2, r).assemble();
    const auto b = conformal_change_schouten(euc, u1 + u2, r).assemble();
    for (int j = 0; j < n; ++j) CHECK(std::abs(a[j] - b[j]) <= 1e-10 * (1 + std::abs(b[j])));
  }
}

TEST_CASE("conformal change of a warped product") {
  const int n = 5;
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> ur(0.2, 6.0);
  for (const auto& m : {RadialMetric::warped_product(n, RadialProfile::cosh_profile(), -1),
                        RadialMetric::warped_product(n, RadialProfile::exp_sin(0.4), -1),
                        RadialMetric::warped_product(n, RadialProfile::sinh_profile(), 1)}) {
    const auto& w = *m.as_warped();
    const auto c = RadialProfile::constant(0.7);
    const auto u = RadialProfile::bump(0.3, 3.0, 2.5);
    for (int i = 0; i < 50; ++i) {
      const double r = ur(rng);
      // homothety
      const auto h = conformal_change_schouten(m, c, r).assemble();
      const auto base = warped_schouten(m, r).with_sign(SchoutenSign::plus).assemble();
      for (int j = 0; j < n; ++j) {
        CHECK(h[j] == doctest::Approx(std::exp(-1.4) * base[j]).epsilon(1e-12));
      }
      // e^{2u}(dr^2 + Phi^2 h) is again a warped product in arclength s with
      // warp e^u Phi; compare with its Schouten constants.
      const Jet phi = w.warp.jet(r);
      const Jet uj = u.jet(r);
      const double P = std::exp(uj.value) * phi.value;
      const double Ps = uj.d1 * phi.value + phi.d1;
      const double Pss = std::exp(-uj.value) * (uj.d2 * phi.value + uj.d1 * phi.d1 + phi.d2);
      const double chi1 = (Ps * Ps - w.fiber_sign) / (2 * P * P);
      const double chi2 = -Pss / P + 2 * chi1;
      const auto got = conformal_change_schouten(m, u, r).with_sign(SchoutenSign::minus);
      CHECK(got.radial() == doctest::Approx(chi1 - chi2).epsilon(1e-10));
      CHECK(got.tangential() == doctest::Approx(chi1).epsilon(1e-10));
    }
  }
}

TEST_CASE("end conditions") {
  const auto es = RadialMetric::warped_product(5, RadialProfile::exp_sin(0.1), -1);
  const auto rep = check_end_conditions(es, 1.5, 0.0, 100.0, 0.1, 0.1);
  CHECK(rep.pass);
  // closed-form bound -2 alpha sin r / (alpha^2 cos^2 r + e^{-2 alpha sin r})
  double bound = 1e9;
  for (int i = 0; i <= 20000; ++i) {
    const double r = 100.0 * i / 20000;
    const double a = 0.1;
    const double q = a * a * std::cos(r) * std::cos(r) + std::exp(-2 * a * std::sin(r));
    bound = std::min(bound, -2 * a * std::sin(r) / q);
  }
  CHECK(rep.min_ratio >= bound - 1e-12);
  CHECK(bound > -0.4);

  const auto sh = check_end_conditions(
      RadialMetric::warped_product(5, RadialProfile::sinh_profile(), 1), 0.0, 0.5, 30.0, 0.1, 0.5);
  CHECK(sh.pass);
  CHECK(sh.min_ratio == doctest::Approx(2.0));
  const auto flat = check_end_conditions(
      RadialMetric::warped_product(5, RadialProfile::identity(), 1, {0, 100}), 1.5, 0.5, 10.0,
      0.1, 0.1);
  CHECK_FALSE(flat.pass);
  CHECK_FALSE(flat.chi1_ok);
}

TEST_CASE("decay report") {
  std::vector<double> probes;
  for (int i = 0; i <= 20; ++i) probes.push_back(std::pow(10.0, 0.1 * i));
  const auto pw = decay_report(RadialProfile::power(1.0, -1.5), 1.0, std::nullopt, probes, 3);
  CHECK(pw.fitted_exponent == doctest::Approx(1.5).epsilon(1e-3));
  CHECK(pw.weighted_sup[0] == doctest::Approx(1.0));

  std::vector<double> far;
  for (int i = 0; i <= 20; ++i) far.push_back(1e3 * std::pow(10.0, 0.1 * i));
  const auto sch = decay_report(RadialProfile::schwarzschild_factor(2.5, 1.0), 1.0, std::nullopt,
                                far, 5);
  CHECK(sch.fitted_exponent == doctest::Approx(1.5).epsilon(1e-3));

  const auto zero = decay_report(RadialProfile::constant(0.0), 1.0, 2.0, probes, 4);
  CHECK(zero.weighted_sup[0] == 0.0);
  CHECK(zero.weighted_sup[1] == 0.0);
  CHECK(*zero.sobolev_norm == 0.0);
  CHECK(std::isnan(zero.fitted_exponent));

  // W^{2,2}_{-tau} of r^{-s} over [1, 100] in closed form
  const int n = 4;
  const double s = 2.0, tau = 0.5;
  const auto rep = decay_report(RadialProfile::power(1.0, -s), tau, 2.0, probes, n);
  const double e = 2 * (tau - s);
  const double i0 = (std::pow(100.0, e) - 1.0) / e;
  const double expected =
      std::sqrt(i0) * (1.0 + s + s * std::sqrt((s + 1) * (s + 1) + (n - 1)));
  CHECK(*rep.sobolev_norm == doctest::Approx(expected).epsilon(1e-8));
  CHECK_THROWS_AS(decay_report(RadialProfile::constant(0.0), 1.0, std::nullopt,
                               std::vector<double>{2.0, 1.0}, 3),
                  DomainError);
}

TEST_CASE("perturbation of a Schwarzschild-type background") {
  const int n = 5;
  const auto g = schwarzschild_type(n, 1.5, 1.0);
  const auto larger = ConeSpec::elementary(n, 1);
  const auto small = perturbation_report(g, RadialProfile::bump(1e-5, 2.0, 0.5), larger, 1.4, 2.6);
  CHECK(small.small_enough);
  CHECK(small.perturbed_interior);
  CHECK(small.background_margin > 0.0);
  const auto big = perturbation_report(g, RadialProfile::bump(5.0, 2.0, 0.5), larger, 1.4, 2.6);
  CHECK_FALSE(big.small_enough);
}

TEST_CASE("curvature curve") {
  const auto rows = curvature_curve(schwarzschild_type(5, 1.5, 1.0),
                                    SymmetricFunctional(ConeSpec::elementary(5, 2)), 0.5, 10.0, 50);
  REQUIRE(rows.size() == 50);
  for (const auto& row : rows) {
    CHECK(std::abs(row.margin) <= 1e-10);
    CHECK(row.f == 0.0);
  }
  const auto sinh_rows =
      curvature_curve(RadialMetric::warped_product(4, RadialProfile::sinh_profile(), 1),
                      SymmetricFunctional(ConeSpec::elementary(4, 2)), 1.0, 5.0, 5);
  for (const auto& row : sinh_rows) {
    CHECK(row.chi1 == doctest::Approx(0.5));
    CHECK(std::abs(row.chi2) < 1e-12);
  }
}

TEST_CASE("trace-deformed f of -A is a multiple of f of -Ric") {
  // Ric = (n-2) A + tr(A) g, rebuilt from the Schouten eigenvalues alone
  for (int n : {4, 5, 7}) {
    const double tau0 = static_cast<double>(n - 2) / (n - 1);
    CHECK(tau_for_trace_parameter(n, 0.0) == doctest::Approx(tau0).epsilon(1e-14));
    for (int k = 1; k <= 3; ++k) {
      const SymmetricFunctional F(ConeSpec::elementary(n, k));
      const SymmetricFunctional Ftau(ConeSpec::tau_modified(ConeSpec::elementary(n, k), tau0));
      for (const auto& [warp, sign] : {std::pair{RadialProfile::sinh_profile(), 1},
                                       std::pair{RadialProfile::exp_sin(0.2), -1}}) {
        const auto g = RadialMetric::warped_product(n, warp, sign);
        for (double r = 0.4; r < 5.0; r += 0.45) {
          const auto neg_a = warped_schouten(g, r).assemble();
          double trace = 0.0;
          for (double x : neg_a) trace += x;
          std::vector<double> neg_ric(neg_a.size());
          for (std::size_t i = 0; i < neg_a.size(); ++i) neg_ric[i] = (n - 2) * neg_a[i] + trace;
          if (contains(F.cone(), neg_ric) != Membership::interior) continue;
          CHECK(f_eval(Ftau, neg_a) ==
                doctest::Approx(tau0 / (n - 2) * f_eval(F, neg_ric)).epsilon(1e-10));
        }
      }
    }
  }
}
