#pragma once

// Independent reference computations used only by tests. None of these share
// code paths with the library routines they check.

#include <cmath>
#include <cstddef>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

/// sigma_k by explicit enumeration of k-subsets.
inline double sigma_k_bruteforce(const std::vector<double>& lambda, int k) {
  const int n = static_cast<int>(lambda.size());
  if (k == 0) return 1.0;
  double total = 0.0;
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    double prod = 1.0;
    for (int i : idx) prod *= lambda[i];
    total += prod;
    int pos = k - 1;
    while (pos >= 0 && idx[pos] == n - k + pos) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (int j = pos + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return total;
}

/// mu for (-mu, 1, ..., 1) on the boundary of the tau-deformed Gamma_k, from
/// the closed form obtained by pushing the ray through the deformation.
inline double mu_tau_closed_form(int n, int k, double tau) {
  const double mk = static_cast<double>(n - k) / k;
  return (mk * tau + (1.0 + mk) * (1.0 - tau) * (n - 1)) / (1.0 + mk * (1.0 - tau));
}

/// Schouten eigenvalues (radial, tangential) from Ricci eigenvalues via
/// A = (Ric - R g / (2(n-1))) / (n-2).
inline std::pair<double, double> schouten_from_ricci(int n, double ric_r, double ric_t) {
  const double R = ric_r + (n - 1) * ric_t;
  const double shift = R / (2.0 * (n - 1));
  return {(ric_r - shift) / (n - 2), (ric_t - shift) / (n - 2)};
}

/// +A eigenvalues (radial, tangential) of e^{2w}|dx|^2 from the Euclidean
/// transformation law, with w given as value/first/second derivative.
inline std::pair<double, double> flat_conformal_plus_a(double r, double w, double w1, double w2) {
  const double E = std::exp(-2.0 * w);
  return {E * (-w2 + 0.5 * w1 * w1), E * (-w1 / r - 0.5 * w1 * w1)};
}

inline double central_difference(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline double second_difference(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

/// Rejection sample of Gamma_k^+ from a box, membership by brute-force sigma_j.
inline std::vector<double> random_in_gamma_k(std::mt19937_64& rng, int n, int k) {
  std::uniform_real_distribution<double> u(-2.0, 3.0);
  while (true) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (double& x : v) x = u(rng);
    bool ok = true;
    for (int j = 1; j <= k && ok; ++j) ok = sigma_k_bruteforce(v, j) > 0.0;
    if (ok) return v;
  }
}

}  // namespace oracle
