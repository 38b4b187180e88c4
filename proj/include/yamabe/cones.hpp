#pragma once

#include <span>
#include <string>
#include <vector>

namespace yamabe {

/// Scale-free tolerance used to call a vector a boundary point of a cone.
inline constexpr double kBoundaryTolerance = 1e-10;

enum class Membership { interior, boundary, exterior };

std::string to_string(Membership m);

/// A Garding cone in R^n: either the elementary symmetric cone
///   Gamma_k^+ = { lambda : sigma_j(lambda) > 0, j = 1..k }
/// or a finite chain of trace deformations of one,
///   Gamma^tau = { lambda : tau*lambda + (1 - tau)*sigma_1(lambda)*e in Gamma }.
///
/// Deformations are stored outermost first; deform() applies them in that
/// order so the result can be tested against Gamma_k^+ directly.
class ConeSpec {
 public:
  static ConeSpec elementary(int n, int k);
  static ConeSpec tau_modified(const ConeSpec& base, double tau);

  int dimension() const noexcept { return n_; }
  int order() const noexcept { return k_; }
  bool is_elementary() const noexcept { return taus_.empty(); }
  std::span<const double> deformations() const noexcept { return taus_; }

  std::vector<double> deform(std::span<const double> lambda) const;
  std::string describe() const;

  friend bool operator==(const ConeSpec&, const ConeSpec&) = default;

 private:
  ConeSpec(int n, int k) : n_(n), k_(k) {}

  int n_;
  int k_;
  std::vector<double> taus_;
};

/// The pair (f, Gamma) with f = scale * sigma_k(deformed lambda)^(1/k).
class SymmetricFunctional {
 public:
  explicit SymmetricFunctional(ConeSpec cone, double scale = 1.0);

  const ConeSpec& cone() const noexcept { return cone_; }
  double scale() const noexcept { return scale_; }
  int dimension() const noexcept { return cone_.dimension(); }

 private:
  ConeSpec cone_;
  double scale_;
};

// Elementary symmetric polynomials ------------------------------------------

/// sigma_0 .. sigma_k of lambda by the one-pass product recurrence.
std::vector<double> elementary_symmetric(std::span<const double> lambda, int k);

double sigma_k(std::span<const double> lambda, int k);

/// i-th entry is sigma_{k-1}(lambda with entry i removed).
std::vector<double> sigma_k_gradient(std::span<const double> lambda, int k);

// Cone membership -------------------------------------------------------------

Membership contains(const ConeSpec& cone, std::span<const double> lambda,
                    double tol = kBoundaryTolerance);

/// min_j sigma_j of the deformed, unit-normalized vector (j = 1..k). This is
/// the scale-free quantity contains() thresholds.
double normalized_min_sigma(const ConeSpec& cone, std::span<const double> lambda);

/// 1-homogeneous admissibility margin min_j sign(s_j)|s_j|^(1/j) where
/// s_j = sigma_j(deformed lambda). Positive exactly on the open cone and
/// comparable in size to f.
double admissibility_margin(const ConeSpec& cone, std::span<const double> lambda);

bool strictly_admissible(const ConeSpec& cone, std::span<const double> lambda);

/// sup { d >= 0 : lambda - d e in the cone }. Because the cone absorbs the
/// positive orthant, every sup-norm perturbation smaller than this keeps
/// lambda inside. Bisection to relative width 1e-12; 0 outside the cone.
double interior_radius(const ConeSpec& cone, std::span<const double> lambda);

// Functional ----------------------------------------------------------------

/// f(lambda); 0 on boundary inputs, AdmissibilityError on exterior inputs.
double f_eval(const SymmetricFunctional& F, std::span<const double> lambda);

struct ValueAndGradient {
  double value;
  std::vector<double> gradient;
};

/// f and its gradient at a strictly admissible point (sigma_k > 0 after
/// deformation). Throws AdmissibilityError otherwise.
ValueAndGradient f_value_and_gradient(const SymmetricFunctional& F,
                                      std::span<const double> lambda);

/// Rescales F so that f(e/2) = 1.
SymmetricFunctional normalize(const SymmetricFunctional& F);

/// mu with (-mu, 1, ..., 1) on the cone boundary. Closed form (n-k)/k for
/// elementary cones, bisection otherwise.
double mu_plus(const ConeSpec& cone);

/// Bisection on [0, n-1] for any supported cone; absolute tolerance 1e-12.
double mu_plus_bisection(const ConeSpec& cone);

/// tau such that the trace-modified Schouten tensor A^t is a multiple of the
/// tau-deformed Schouten tensor: (1 + (1 - t)/(n - 2))^-1.
double tau_for_trace_parameter(int n, double t);

/// f(lambda) <= f(e) sigma_1(lambda) / n, with tol relative to the bound.
bool check_mean_bound(const SymmetricFunctional& F, std::span<const double> lambda,
                      double tol = 1e-12);

}  // namespace yamabe
