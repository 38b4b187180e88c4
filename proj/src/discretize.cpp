#include "yamabe/discretize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "yamabe/errors.hpp"

namespace yamabe {

namespace {

void check_length(const Grid& grid, std::span<const double> values) {
  if (values.size() != grid.size()) {
    throw DimensionMismatch("grid has " + std::to_string(grid.size()) +
                            " nodes but " + std::to_string(values.size()) +
                            " values were given");
  }
}

}  // namespace

Grid::Grid(double r_min, double r_max, std::size_t nodes, LeftBoundary left)
    : r_min_(r_min), r_max_(r_max), n_(nodes), h_(0.0), left_(left) {
  if (nodes < 5) throw DomainError("grid needs at least 5 nodes");
  if (!(r_max > r_min) || !std::isfinite(r_min) || !std::isfinite(r_max)) {
    throw DomainError("grid interval must satisfy r_min < r_max");
  }
  if (left == LeftBoundary::symmetry && r_min != 0.0) {
    throw DomainError("symmetry boundary is only allowed at r_min = 0");
  }
  h_ = (r_max - r_min) / static_cast<double>(nodes - 1);
}

std::vector<double> Grid::nodes() const {
  std::vector<double> r(n_);
  for (std::size_t i = 0; i < n_; ++i) r[i] = node(i);
  return r;
}

std::vector<double> d1(const Grid& grid, std::span<const double> u) {
  check_length(grid, u);
  const std::size_t n = grid.size();
  const double h = grid.spacing();
  std::vector<double> out(n);
  for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (u[i + 1] - u[i - 1]) / (2.0 * h);
  // One-sided stencils written in differences so constants give exactly 0.
  out[0] = grid.symmetric_origin()
               ? 0.0
               : (4.0 * (u[1] - u[0]) - (u[2] - u[0])) / (2.0 * h);
  out[n - 1] = (4.0 * (u[n - 1] - u[n - 2]) - (u[n - 1] - u[n - 3])) / (2.0 * h);
  return out;
}

std::vector<double> d2(const Grid& grid, std::span<const double> u) {
  check_length(grid, u);
  const std::size_t n = grid.size();
  const double h2 = grid.spacing() * grid.spacing();
  std::vector<double> out(n);
  for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / h2;
  auto one_sided = [](double a, double b, double c, double d) {
    return 2.0 * (a - b) - 3.0 * (b - c) + (c - d);
  };
  out[0] = grid.symmetric_origin() ? 2.0 * (u[1] - u[0]) / h2
                                   : one_sided(u[0], u[1], u[2], u[3]) / h2;
  out[n - 1] = one_sided(u[n - 1], u[n - 2], u[n - 3], u[n - 4]) / h2;
  return out;
}

std::vector<double> BandedSystem::multiply(std::span<const double> x) const {
  const std::size_t n = size();
  if (x.size() != n) throw DimensionMismatch("banded multiply: size mismatch");
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = diag[i] * x[i];
    if (i > 0) acc += sub[i] * x[i - 1];
    if (i + 1 < n) acc += super[i] * x[i + 1];
    y[i] = acc;
  }
  return y;
}

std::vector<double> solve_banded(const BandedSystem& s) {
  const std::size_t n = s.size();
  if (s.sub.size() != n || s.super.size() != n || s.rhs.size() != n) {
    throw DimensionMismatch("banded system arrays differ in length");
  }
  if (n == 0) return {};

  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    scale = std::max(scale, std::abs(s.diag[i]) + std::abs(s.sub[i]) + std::abs(s.super[i]));
  }
  const double tiny = scale * std::numeric_limits<double>::epsilon() * 16.0;

  std::vector<double> c(n);
  std::vector<double> d(n);
  double pivot = s.diag[0];
  if (!(std::abs(pivot) > tiny)) throw SingularSystemError("zero pivot in row 0");
  c[0] = s.super[0] / pivot;
  d[0] = s.rhs[0] / pivot;
  for (std::size_t i = 1; i < n; ++i) {
    pivot = s.diag[i] - s.sub[i] * c[i - 1];
    if (!(std::abs(pivot) > tiny)) {
      throw SingularSystemError("zero pivot in row " + std::to_string(i));
    }
    c[i] = (i + 1 < n) ? s.super[i] / pivot : 0.0;
    d[i] = (s.rhs[i] - s.sub[i] * d[i - 1]) / pivot;
  }
  std::vector<double> x(n);
  x[n - 1] = d[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
  return x;
}

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)), m_(x_.size(), 0.0) {
  const std::size_t n = x_.size();
  if (n != y_.size()) throw DimensionMismatch("spline knots and values differ in length");
  if (n < 3) throw DomainError("spline needs at least 3 knots");
  for (std::size_t i = 1; i < n; ++i) {
    if (!(x_[i] > x_[i - 1])) throw DomainError("spline knots must be strictly increasing");
  }
  BandedSystem sys(n);
  sys.diag[0] = 1.0;
  sys.diag[n - 1] = 1.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double hl = x_[i] - x_[i - 1];
    const double hr = x_[i + 1] - x_[i];
    sys.sub[i] = hl / 6.0;
    sys.diag[i] = (hl + hr) / 3.0;
    sys.super[i] = hr / 6.0;
    sys.rhs[i] = (y_[i + 1] - y_[i]) / hr - (y_[i] - y_[i - 1]) / hl;
  }
  m_ = solve_banded(sys);
}

CubicSpline::Sample CubicSpline::operator()(double x) const {
  const std::size_t n = x_.size();
  std::size_t i;
  if (x <= x_.front()) {
    i = 0;
  } else if (x >= x_.back()) {
    i = n - 2;
  } else {
    i = static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), x) - x_.begin()) - 1;
  }
  const double h = x_[i + 1] - x_[i];
  const double a = (x_[i + 1] - x) / h;
  const double b = (x - x_[i]) / h;
  const double value = a * y_[i] + b * y_[i + 1] +
                       ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
  const double slope = (y_[i + 1] - y_[i]) / h -
                       (3.0 * a * a - 1.0) / 6.0 * h * m_[i] +
                       (3.0 * b * b - 1.0) / 6.0 * h * m_[i + 1];
  const double curvature = a * m_[i] + b * m_[i + 1];
  return {value, slope, curvature};
}

}  // namespace yamabe
