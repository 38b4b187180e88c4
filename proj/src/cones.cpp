#include "yamabe/cones.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "yamabe/errors.hpp"

namespace yamabe {

namespace {

void check_dimension(const ConeSpec& cone, std::span<const double> lambda) {
  if (static_cast<int>(lambda.size()) != cone.dimension()) {
    throw DimensionMismatch("eigenvalue vector has length " +
                            std::to_string(lambda.size()) + ", cone dimension is " +
                            std::to_string(cone.dimension()));
  }
}

double min_of_sigmas(std::span<const double> sig) {
  // sig[0] is sigma_0 = 1 and does not take part.
  return *std::min_element(sig.begin() + 1, sig.end());
}

// Jacobian of one deformation is tau*I + (1 - tau) e e^T, symmetric; all of
// them commute, so the transpose chain can be applied in any order.
void apply_deformation_transpose(std::span<const double> taus, std::vector<double>& g) {
  for (double tau : taus) {
    const double sum = std::accumulate(g.begin(), g.end(), 0.0);
    for (double& gi : g) gi = tau * gi + (1.0 - tau) * sum;
  }
}

}  // namespace

std::string to_string(Membership m) {
  switch (m) {
    case Membership::interior:
      return "interior";
    case Membership::boundary:
      return "boundary";
    case Membership::exterior:
      return "exterior";
  }
  return "unknown";
}

ConeSpec ConeSpec::elementary(int n, int k) {
  if (n < 3) throw DomainError("cone dimension must be >= 3, got " + std::to_string(n));
  if (k < 1 || k > n) {
    throw DomainError("elementary symmetric order k=" + std::to_string(k) +
                      " outside [1, " + std::to_string(n) + "]");
  }
  return ConeSpec(n, k);
}

ConeSpec ConeSpec::tau_modified(const ConeSpec& base, double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) {
    throw DomainError("deformation parameter tau must lie in (0, 1]");
  }
  ConeSpec out = base;
  out.taus_.insert(out.taus_.begin(), tau);
  return out;
}

std::vector<double> ConeSpec::deform(std::span<const double> lambda) const {
  std::vector<double> v(lambda.begin(), lambda.end());
  for (double tau : taus_) {
    if (tau == 1.0) continue;
    const double s1 = std::accumulate(v.begin(), v.end(), 0.0);
    for (double& x : v) x = tau * x + (1.0 - tau) * s1;
  }
  return v;
}

std::string ConeSpec::describe() const {
  std::ostringstream os;
  os << "Gamma_" << k_ << "^+(n=" << n_ << ")";
  for (auto it = taus_.rbegin(); it != taus_.rend(); ++it) os << "^tau=" << *it;
  return os.str();
}

SymmetricFunctional::SymmetricFunctional(ConeSpec cone, double scale)
    : cone_(std::move(cone)), scale_(scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw DomainError("functional scale must be positive and finite");
  }
}

std::vector<double> elementary_symmetric(std::span<const double> lambda, int k) {
  const int n = static_cast<int>(lambda.size());
  if (k < 0 || k > n) {
    throw DomainError("sigma_k: k=" + std::to_string(k) + " outside [0, " +
                      std::to_string(n) + "]");
  }
  std::vector<double> e(static_cast<std::size_t>(k) + 1, 0.0);
  e[0] = 1.0;
  for (int i = 0; i < n; ++i) {
    for (int j = std::min(i + 1, k); j >= 1; --j) e[j] += lambda[i] * e[j - 1];
  }
  return e;
}

double sigma_k(std::span<const double> lambda, int k) {
  return elementary_symmetric(lambda, k).back();
}

std::vector<double> sigma_k_gradient(std::span<const double> lambda, int k) {
  const int n = static_cast<int>(lambda.size());
  if (k < 1 || k > n) {
    throw DomainError("sigma_k_gradient: k=" + std::to_string(k) + " outside [1, " +
                      std::to_string(n) + "]");
  }
  std::vector<double> grad(lambda.size());
  std::vector<double> rest;
  rest.reserve(lambda.size());
  for (int i = 0; i < n; ++i) {
    rest.clear();
    for (int j = 0; j < n; ++j) {
      if (j != i) rest.push_back(lambda[j]);
    }
    grad[i] = sigma_k(rest, k - 1);
  }
  return grad;
}

double normalized_min_sigma(const ConeSpec& cone, std::span<const double> lambda) {
  check_dimension(cone, lambda);
  double norm = 0.0;
  for (double x : lambda) norm = std::hypot(norm, x);
  if (norm == 0.0) return 0.0;
  std::vector<double> unit(lambda.begin(), lambda.end());
  for (double& x : unit) x /= norm;
  const auto deformed = cone.deform(unit);
  return min_of_sigmas(elementary_symmetric(deformed, cone.order()));
}

Membership contains(const ConeSpec& cone, std::span<const double> lambda, double tol) {
  const double m = normalized_min_sigma(cone, lambda);
  if (m < -tol) return Membership::exterior;
  if (m <= tol) return Membership::boundary;
  return Membership::interior;
}

double admissibility_margin(const ConeSpec& cone, std::span<const double> lambda) {
  check_dimension(cone, lambda);
  const auto deformed = cone.deform(lambda);
  const auto sig = elementary_symmetric(deformed, cone.order());
  double margin = std::numeric_limits<double>::infinity();
  for (int j = 1; j <= cone.order(); ++j) {
    const double s = sig[j];
    const double root = std::copysign(std::pow(std::abs(s), 1.0 / j), s);
    margin = std::min(margin, root);
  }
  return margin;
}

bool strictly_admissible(const ConeSpec& cone, std::span<const double> lambda) {
  check_dimension(cone, lambda);
  const auto deformed = cone.deform(lambda);
  const auto sig = elementary_symmetric(deformed, cone.order());
  return min_of_sigmas(sig) > 0.0;
}

double interior_radius(const ConeSpec& cone, std::span<const double> lambda) {
  if (!strictly_admissible(cone, lambda)) return 0.0;
  const double s1 = std::accumulate(lambda.begin(), lambda.end(), 0.0);
  std::vector<double> shifted(lambda.begin(), lambda.end());
  auto inside = [&](double d) {
    for (std::size_t i = 0; i < shifted.size(); ++i) shifted[i] = lambda[i] - d;
    return strictly_admissible(cone, shifted);
  };
  double lo = 0.0;
  double hi = s1 / static_cast<double>(lambda.size());
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (inside(mid) ? lo : hi) = mid;
  }
  return lo;
}

double f_eval(const SymmetricFunctional& F, std::span<const double> lambda) {
  const ConeSpec& cone = F.cone();
  const Membership m = contains(cone, lambda);
  if (m == Membership::exterior) {
    const double ms = normalized_min_sigma(cone, lambda);
    std::ostringstream os;
    os << "eigenvalues outside " << cone.describe() << " (normalized min sigma_j = " << ms
       << ")";
    throw AdmissibilityError(os.str(), ms);
  }
  if (m == Membership::boundary) return 0.0;
  const auto deformed = cone.deform(lambda);
  const double sk = sigma_k(deformed, cone.order());
  return F.scale() * std::pow(sk, 1.0 / cone.order());
}

ValueAndGradient f_value_and_gradient(const SymmetricFunctional& F,
                                      std::span<const double> lambda) {
  const ConeSpec& cone = F.cone();
  check_dimension(cone, lambda);
  const int k = cone.order();
  const auto deformed = cone.deform(lambda);
  const auto sig = elementary_symmetric(deformed, k);
  const double ms = min_of_sigmas(sig);
  if (!(ms > 0.0)) {
    throw AdmissibilityError("f_value_and_gradient needs a strictly admissible point", ms);
  }
  const double sk = sig[k];
  const double value = F.scale() * std::pow(sk, 1.0 / k);
  std::vector<double> g = sigma_k_gradient(deformed, k);
  const double factor = value / (k * sk);
  for (double& gi : g) gi *= factor;
  apply_deformation_transpose(cone.deformations(), g);
  return {value, std::move(g)};
}

SymmetricFunctional normalize(const SymmetricFunctional& F) {
  const int n = F.dimension();
  const std::vector<double> half(static_cast<std::size_t>(n), 0.5);
  const SymmetricFunctional canonical(F.cone(), 1.0);
  return SymmetricFunctional(F.cone(), 1.0 / f_eval(canonical, half));
}

double mu_plus(const ConeSpec& cone) {
  if (cone.is_elementary()) {
    return static_cast<double>(cone.dimension() - cone.order()) / cone.order();
  }
  return mu_plus_bisection(cone);
}

double mu_plus_bisection(const ConeSpec& cone) {
  const int n = cone.dimension();
  std::vector<double> ray(static_cast<std::size_t>(n), 1.0);
  auto inside = [&](double mu) {
    ray[0] = -mu;
    return strictly_admissible(cone, ray);
  };
  double lo = 0.0;
  double hi = n - 1.0;
  if (!inside(lo)) return 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    (inside(mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double tau_for_trace_parameter(int n, double t) {
  if (n < 3) throw DomainError("dimension must be >= 3");
  if (!(t < 1.0)) throw DomainError("trace parameter t must be < 1");
  return 1.0 / (1.0 + (1.0 - t) / (n - 2));
}

bool check_mean_bound(const SymmetricFunctional& F, std::span<const double> lambda,
                      double tol) {
  const int n = F.dimension();
  const std::vector<double> e(static_cast<std::size_t>(n), 1.0);
  const double fe = f_eval(F, e);
  const double s1 = std::accumulate(lambda.begin(), lambda.end(), 0.0);
  const double bound = fe * s1 / n;
  return f_eval(F, lambda) <= bound + tol * (1.0 + std::abs(bound));
}

}  // namespace yamabe
