#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace yamabe {

enum class LeftBoundary { dirichlet, symmetry };

/// Uniform radial grid. A symmetry left end is only allowed at r = 0 and is
/// realized by the ghost reflection u_{-1} = u_1.
class Grid {
 public:
  Grid(double r_min, double r_max, std::size_t nodes,
       LeftBoundary left = LeftBoundary::dirichlet);

  double r_min() const noexcept { return r_min_; }
  double r_max() const noexcept { return r_max_; }
  std::size_t size() const noexcept { return n_; }
  double spacing() const noexcept { return h_; }
  LeftBoundary left() const noexcept { return left_; }
  bool symmetric_origin() const noexcept { return left_ == LeftBoundary::symmetry; }

  double node(std::size_t i) const noexcept {
    return i + 1 == n_ ? r_max_ : r_min_ + static_cast<double>(i) * h_;
  }
  std::vector<double> nodes() const;

 private:
  double r_min_;
  double r_max_;
  std::size_t n_;
  double h_;
  LeftBoundary left_;
};

/// First derivative: central in the interior, second-order one-sided at
/// Dirichlet ends, exactly 0 at a symmetric origin.
std::vector<double> d1(const Grid& grid, std::span<const double> values);

/// Second derivative with the analogous second-order stencils; at a symmetric
/// origin 2(u_1 - u_0)/h^2.
std::vector<double> d2(const Grid& grid, std::span<const double> values);

/// Tridiagonal system. Row i reads
///   sub[i] x[i-1] + diag[i] x[i] + super[i] x[i+1] = rhs[i]
/// with sub[0] and super[N-1] ignored.
struct BandedSystem {
  std::vector<double> sub;
  std::vector<double> diag;
  std::vector<double> super;
  std::vector<double> rhs;

  explicit BandedSystem(std::size_t n = 0) : sub(n), diag(n), super(n), rhs(n) {}
  std::size_t size() const noexcept { return diag.size(); }

  std::vector<double> multiply(std::span<const double> x) const;
};

/// Thomas elimination. Throws SingularSystemError on a (numerically) zero
/// pivot.
std::vector<double> solve_banded(const BandedSystem& system);

/// Natural cubic spline through (x_i, y_i), x strictly increasing.
class CubicSpline {
 public:
  CubicSpline(std::vector<double> x, std::vector<double> y);

  struct Sample {
    double value;
    double d1;
    double d2;
  };
  /// Outside the data range the end cubic pieces are extended.
  Sample operator()(double x) const;

  std::span<const double> knots() const noexcept { return x_; }
  std::span<const double> values() const noexcept { return y_; }

 private:
  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> m_;  // second derivatives at the knots
};

}  // namespace yamabe
