#include "yamabe/profile.hpp"

#include <cmath>
#include <sstream>

#include "yamabe/discretize.hpp"
#include "yamabe/errors.hpp"

namespace yamabe {

namespace {

void require_positive_radius(const char* name, double r) {
  if (!(r > 0.0)) {
    std::ostringstream os;
    os << name << " profile is only defined for r > 0 (got r = " << r << ")";
    throw DomainError(os.str());
  }
}

double lookup(const ProfileParams& params, const std::string& key, const std::string& owner) {
  for (const auto& [k, v] : params) {
    if (k == key) return v;
  }
  throw ConfigError("profile '" + owner + "' is missing parameter '" + key + "'");
}

}  // namespace

RadialProfile::RadialProfile(std::string name, ProfileParams params, Evaluator eval)
    : name_(std::move(name)), params_(std::move(params)), eval_(std::move(eval)) {}

double RadialProfile::param(const std::string& key) const { return lookup(params_, key, name_); }

RadialProfile RadialProfile::constant(double c) {
  return {"constant", {{"c", c}}, [c](double) { return Jet{c, 0.0, 0.0}; }};
}

RadialProfile RadialProfile::identity() {
  return {"identity", {}, [](double r) { return Jet{r, 1.0, 0.0}; }};
}

RadialProfile RadialProfile::sinh_profile() {
  return {"sinh", {}, [](double r) {
            const double s = std::sinh(r);
            return Jet{s, std::cosh(r), s};
          }};
}

RadialProfile RadialProfile::cosh_profile() {
  return {"cosh", {}, [](double r) {
            const double c = std::cosh(r);
            return Jet{c, std::sinh(r), c};
          }};
}

RadialProfile RadialProfile::exp_profile() {
  return {"exp", {}, [](double r) {
            const double e = std::exp(r);
            return Jet{e, e, e};
          }};
}

RadialProfile RadialProfile::exp_sin(double alpha) {
  return {"exp_sin", {{"alpha", alpha}}, [alpha](double r) {
            const double s = std::sin(r);
            const double c = std::cos(r);
            const double phi = std::exp(alpha * s);
            return Jet{phi, alpha * c * phi, (-alpha * s + alpha * alpha * c * c) * phi};
          }};
}

RadialProfile RadialProfile::schwarzschild_factor(double mu, double m) {
  if (!(mu > 1.0)) throw DomainError("Schwarzschild-type factor needs mu > 1");
  const double p = mu - 1.0;
  return {"schwarzschild_factor", {{"mu", mu}, {"m", m}}, [p, m](double r) {
            require_positive_radius("schwarzschild_factor", r);
            const double q = m / (2.0 * std::pow(r, p));
            const double base = 1.0 + q;
            if (!(base > 0.0)) throw DomainError("1 + m/(2 r^p) must be positive");
            const double q1 = -p * q / r;
            const double q2 = p * (p + 1.0) * q / (r * r);
            const double c = 2.0 / p;
            return Jet{c * std::log(base), c * q1 / base,
                       c * (q2 / base - q1 * q1 / (base * base))};
          }};
}

RadialProfile RadialProfile::hyperbolic_cap(double a) {
  if (!(a > 0.0)) throw DomainError("hyperbolic cap radius must be positive");
  return {"hyperbolic_cap", {{"a", a}}, [a](double r) {
            const double d = a * a - r * r;
            if (!(d > 0.0)) throw DomainError("hyperbolic cap evaluated at r >= a");
            return Jet{std::log(2.0 * a / d), 2.0 * r / d, 2.0 * (a * a + r * r) / (d * d)};
          }};
}

RadialProfile RadialProfile::spherical_cap(double a) {
  if (!(a > 0.0)) throw DomainError("spherical cap radius must be positive");
  return {"spherical_cap", {{"a", a}}, [a](double r) {
            const double d = a * a + r * r;
            return Jet{std::log(2.0 * a / d), -2.0 * r / d, -2.0 * (a * a - r * r) / (d * d)};
          }};
}

RadialProfile RadialProfile::log_radius(double c) {
  return {"log_radius", {{"c", c}}, [c](double r) {
            require_positive_radius("log_radius", r);
            return Jet{c * std::log(r), c / r, -c / (r * r)};
          }};
}

RadialProfile RadialProfile::power(double c, double p) {
  return {"power", {{"c", c}, {"p", p}}, [c, p](double r) {
            if (!(r > 0.0) && !(r == 0.0 && p >= 2.0)) require_positive_radius("power", r);
            return Jet{c * std::pow(r, p), c * p * std::pow(r, p - 1.0),
                       c * p * (p - 1.0) * std::pow(r, p - 2.0)};
          }};
}

RadialProfile RadialProfile::bump(double amplitude, double center, double width) {
  if (!(width > 0.0)) throw DomainError("bump width must be positive");
  return {"bump",
          {{"amplitude", amplitude}, {"center", center}, {"width", width}},
          [amplitude, center, width](double r) {
            const double s = (r - center) / width;
            const double q = 1.0 - s * s;
            if (!(q > 0.0)) return Jet{};
            const double g = -1.0 / q;
            const double g1 = -2.0 * s / (q * q);
            const double g2 = -2.0 / (q * q) - 8.0 * s * s / (q * q * q);
            const double phi = std::exp(1.0 + g);
            return Jet{amplitude * phi, amplitude * phi * g1 / width,
                       amplitude * phi * (g1 * g1 + g2) / (width * width)};
          }};
}

RadialProfile RadialProfile::sampled(std::vector<double> r, std::vector<double> values) {
  auto spline = std::make_shared<const CubicSpline>(r, values);
  RadialProfile out("sampled", {}, [spline](double x) {
    const auto s = (*spline)(x);
    return Jet{s.value, s.d1, s.d2};
  });
  out.knots_ = std::move(r);
  out.values_ = std::move(values);
  return out;
}

RadialProfile RadialProfile::from_spec(const std::string& name, const ProfileParams& params) {
  auto get = [&](const std::string& key) { return lookup(params, key, name); };
  if (name == "constant") return constant(get("c"));
  if (name == "identity") return identity();
  if (name == "sinh") return sinh_profile();
  if (name == "cosh") return cosh_profile();
  if (name == "exp") return exp_profile();
  if (name == "exp_sin") return exp_sin(get("alpha"));
  if (name == "schwarzschild_factor") return schwarzschild_factor(get("mu"), get("m"));
  if (name == "hyperbolic_cap") return hyperbolic_cap(get("a"));
  if (name == "spherical_cap") return spherical_cap(get("a"));
  if (name == "log_radius") return log_radius(get("c"));
  if (name == "power") return power(get("c"), get("p"));
  if (name == "bump") return bump(get("amplitude"), get("center"), get("width"));
  throw ConfigError("unknown profile '" + name + "'");
}

RadialProfile operator+(const RadialProfile& a, const RadialProfile& b) {
  auto ea = a.eval_;
  auto eb = b.eval_;
  return {"sum", {}, [ea, eb](double r) {
            const Jet x = ea(r);
            const Jet y = eb(r);
            return Jet{x.value + y.value, x.d1 + y.d1, x.d2 + y.d2};
          }};
}

RadialProfile RadialProfile::scaled(double s) const {
  auto e = eval_;
  return {"scaled", {{"factor", s}}, [e, s](double r) {
            const Jet x = e(r);
            return Jet{s * x.value, s * x.d1, s * x.d2};
          }};
}

}  // namespace yamabe
