#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "yamabe/discretize.hpp"
#include "yamabe/errors.hpp"

using namespace yamabe;

namespace {

template <class F>
std::vector<double> sample(const Grid& g, F f) {
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) v[i] = f(g.node(i));
  return v;
}

double max_error(const Grid& g, const std::vector<double>& approx, double (*exact)(double),
                 bool interior_only = false) {
  double e = 0.0;
  const std::size_t lo = interior_only ? 1 : 0;
  const std::size_t hi = interior_only ? g.size() - 1 : g.size();
  for (std::size_t i = lo; i < hi; ++i) e = std::max(e, std::abs(approx[i] - exact(g.node(i))));
  return e;
}

}  // namespace

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(Grid(0, 1, 4), DomainError);
  CHECK_THROWS_AS(Grid(1, 1, 10), DomainError);
  CHECK_THROWS_AS(Grid(0.5, 1, 10, LeftBoundary::symmetry), DomainError);
  const Grid g(0, 1, 11);
  CHECK(g.spacing() == doctest::Approx(0.1));
  CHECK(g.node(10) == 1.0);
  const auto r = g.nodes();
  CHECK(std::is_sorted(r.begin(), r.end()));
  CHECK_THROWS_AS(d1(g, std::vector<double>(10)), DimensionMismatch);
}

TEST_CASE("d1 examples") {
  const Grid g(0, 1, 101);
  const auto u = sample(g, [](double r) { return r * r; });
  CHECK(max_error(g, d1(g, u), [](double r) { return 2 * r; }) <= 1e-3);
  const auto c = d1(g, std::vector<double>(101, 3.7));
  CHECK(std::all_of(c.begin(), c.end(), [](double x) { return x == 0.0; }));
  const Grid s(0, 1, 101, LeftBoundary::symmetry);
  CHECK(d1(s, sample(s, [](double r) { return std::cos(r); }))[0] == 0.0);
}

TEST_CASE("d2 examples") {
  const Grid g(0, 1, 201);
  const auto u = sample(g, [](double r) { return r * r * r; });
  CHECK(max_error(g, d2(g, u), [](double r) { return 6 * r; }, true) <= 2e-3);
  const auto lin = d2(g, sample(g, [](double r) { return 2.0 - 3.0 * r; }));
  CHECK(std::all_of(lin.begin(), lin.end(), [](double x) { return std::abs(x) < 1e-9; }));
}

TEST_CASE("observed order of accuracy under grid doubling") {
  auto order = [](bool second, LeftBoundary left) {
    double errs[2];
    std::size_t n = 101;
    for (double& err : errs) {
      const Grid g(0.0, 1.5, n, left);
      const auto u = sample(g, [](double r) { return std::cos(r); });
      const auto d = second ? d2(g, u) : d1(g, u);
      err = second ? max_error(g, d, [](double r) { return -std::cos(r); })
                   : max_error(g, d, [](double r) { return -std::sin(r); });
      n = 2 * n - 1;
    }
    return std::log2(errs[0] / errs[1]);
  };
  for (auto left : {LeftBoundary::dirichlet, LeftBoundary::symmetry}) {
    for (bool second : {false, true}) {
      const double p = order(second, left);
      CHECK(p >= 1.9);
      CHECK(p <= 2.1);
    }
  }
  // sin on [0, 1]: refinement ratio close to 4 for d2
  double errs[2];
  std::size_t n = 51;
  for (double& err : errs) {
    const Grid g(0.0, 1.0, n);
    err = max_error(g, d2(g, sample(g, [](double r) { return std::sin(r); })),
                    [](double r) { return -std::sin(r); });
    n = 2 * n - 1;
  }
  CHECK(errs[0] / errs[1] == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("solve_banded") {
  BandedSystem id(6);
  for (std::size_t i = 0; i < 6; ++i) {
    id.diag[i] = 1.0;
    id.rhs[i] = static_cast<double>(i) - 2.5;
  }
  CHECK(solve_banded(id) == id.rhs);

  // -u'' = pi^2 sin(pi x), u(0) = u(1) = 0; the discrete system is solved
  // exactly against the discrete sine eigenvector.
  const std::size_t n = 201;
  const double h = 1.0 / (n - 1);
  BandedSystem lap(n);
  std::vector<double> exact(n);
  const double pi = std::acos(-1.0);
  const double eig = 4.0 / (h * h) * std::pow(std::sin(pi * h / 2), 2);
  for (std::size_t i = 0; i < n; ++i) {
    exact[i] = std::sin(pi * i * h);
    if (i == 0 || i + 1 == n) {
      lap.diag[i] = 1.0;
      lap.rhs[i] = 0.0;
      exact[i] = 0.0;
    } else {
      lap.sub[i] = -1.0 / (h * h);
      lap.diag[i] = 2.0 / (h * h);
      lap.super[i] = -1.0 / (h * h);
      lap.rhs[i] = eig * exact[i];
    }
  }
  const auto x = solve_banded(lap);
  double err = 0;
  for (std::size_t i = 0; i < n; ++i) err = std::max(err, std::abs(x[i] - exact[i]));
  CHECK(err < 1e-10);

  BandedSystem sing(4);
  sing.diag = {1, 0, 1, 1};
  CHECK_THROWS_AS(solve_banded(sing), SingularSystemError);
}

TEST_CASE("solve_banded is a right inverse of multiplication") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 50 + trial * 17;
    BandedSystem s(n);
    for (std::size_t i = 0; i < n; ++i) {
      s.sub[i] = u(rng);
      s.super[i] = u(rng);
      s.diag[i] = 3.0 + u(rng);
      s.rhs[i] = u(rng);
    }
    const auto x = solve_banded(s);
    const auto b = s.multiply(x);
    double res = 0, xn = 0;
    for (std::size_t i = 0; i < n; ++i) {
      res = std::max(res, std::abs(b[i] - s.rhs[i]));
      xn = std::max(xn, std::abs(x[i]));
    }
    CHECK(res <= 1e-12 * 5.0 * std::max(1.0, xn));
  }
}

TEST_CASE("natural cubic spline") {
  std::vector<double> x, y;
  for (int i = 0; i <= 200; ++i) {
    x.push_back(0.05 * i);
    y.push_back(std::sin(x.back()));
  }
  const CubicSpline s(x, y);
  for (double t : {0.37, 2.5, 7.91}) {
    CHECK(s(t).value == doctest::Approx(std::sin(t)).epsilon(1e-6));
    CHECK(s(t).d1 == doctest::Approx(std::cos(t)).epsilon(1e-4));
    CHECK(s(t).d2 == doctest::Approx(-std::sin(t)).epsilon(1e-2));
  }
  CHECK(s(x[17]).value == doctest::Approx(y[17]).epsilon(1e-14));
  CHECK_THROWS_AS(CubicSpline({0, 1}, {0, 1}), DomainError);
  CHECK_THROWS_AS(CubicSpline({0, 2, 1}, {0, 1, 2}), DomainError);
}
