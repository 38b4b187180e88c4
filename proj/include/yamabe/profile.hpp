#pragma once

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace yamabe {

/// Value and first two derivatives of a radial function at one point.
struct Jet {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

using ProfileParams = std::vector<std::pair<std::string, double>>;

/// A C^2 function of r. Closed forms come from a fixed catalog and keep their
/// name and parameters so that configs can echo them; sampled profiles are
/// natural cubic splines.
class RadialProfile {
 public:
  using Evaluator = std::function<Jet(double)>;

  RadialProfile(std::string name, ProfileParams params, Evaluator eval);

  Jet jet(double r) const { return eval_(r); }
  double operator()(double r) const { return eval_(r).value; }

  const std::string& name() const noexcept { return name_; }
  const ProfileParams& params() const noexcept { return params_; }
  /// Parameter by name; throws ConfigError if absent.
  double param(const std::string& key) const;
  bool is_sampled() const noexcept { return name_ == "sampled"; }

  // Catalog ------------------------------------------------------------------
  static RadialProfile constant(double c);
  static RadialProfile identity();
  static RadialProfile sinh_profile();
  static RadialProfile cosh_profile();
  static RadialProfile exp_profile();
  /// e^{alpha sin r}
  static RadialProfile exp_sin(double alpha);
  /// (2/p) ln(1 + m/(2 r^p)) with p = mu - 1.
  static RadialProfile schwarzschild_factor(double mu, double m);
  /// ln(2a/(a^2 - r^2)) on r < a.
  static RadialProfile hyperbolic_cap(double a);
  /// ln(2a/(a^2 + r^2)).
  static RadialProfile spherical_cap(double a);
  /// c ln r
  static RadialProfile log_radius(double c);
  /// c r^p
  static RadialProfile power(double c, double p);
  /// amplitude * exp(1 - 1/(1 - s^2)), s = (r - center)/width, zero for |s| >= 1.
  static RadialProfile bump(double amplitude, double center, double width);
  static RadialProfile sampled(std::vector<double> r, std::vector<double> values);

  /// Builds a catalog entry from its name and parameters (the inverse of
  /// name()/params()). Throws ConfigError on unknown names or missing keys.
  static RadialProfile from_spec(const std::string& name, const ProfileParams& params);

  /// Knots and values of a sampled profile (empty otherwise).
  const std::vector<double>& sample_knots() const noexcept { return knots_; }
  const std::vector<double>& sample_values() const noexcept { return values_; }

  friend RadialProfile operator+(const RadialProfile& a, const RadialProfile& b);
  RadialProfile scaled(double s) const;

 private:
  std::string name_;
  ProfileParams params_;
  Evaluator eval_;
  std::vector<double> knots_;
  std::vector<double> values_;
};

}  // namespace yamabe
