#pragma once

#include <array>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "yamabe/cones.hpp"
#include "yamabe/profile.hpp"

namespace yamabe {

struct Interval {
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  bool contains(double r) const noexcept { return r >= lo && r <= hi; }
};

/// e^{2 u0(r)} |dx|^2 on a radial interval of R^n.
struct ConformallyFlat {
  int n;
  RadialProfile u0;
  Interval domain;
};

/// dr^2 + Phi(r)^2 h with h Einstein of constant (n-2)k on the (n-1)-fiber.
struct WarpedProduct {
  int n;
  RadialProfile warp;
  int fiber_sign;
  Interval domain;
};

class RadialMetric {
 public:
  RadialMetric(ConformallyFlat form);
  RadialMetric(WarpedProduct form);

  static RadialMetric euclidean(int n);
  static RadialMetric conformally_flat(int n, RadialProfile u0, Interval domain = {});
  static RadialMetric warped_product(int n, RadialProfile warp, int fiber_sign,
                                     Interval domain = {});

  int dimension() const noexcept;
  Interval domain() const noexcept;
  bool is_warped() const noexcept { return std::holds_alternative<WarpedProduct>(form_); }
  const ConformallyFlat* as_conformally_flat() const noexcept {
    return std::get_if<ConformallyFlat>(&form_);
  }
  const WarpedProduct* as_warped() const noexcept { return std::get_if<WarpedProduct>(&form_); }
  std::string describe() const;

 private:
  std::variant<ConformallyFlat, WarpedProduct> form_;
};

/// Which tensor an eigenvalue pair describes: g^{-1}A (plus) or -g^{-1}A
/// (minus).
enum class SchoutenSign { plus, minus };

/// Eigenvalues frame * (chi1 - chi2) (radial, simple) and frame * chi1
/// (tangential, multiplicity n - 1).
struct SchoutenEigenvalues {
  int n = 0;
  double chi1 = 0.0;
  double chi2 = 0.0;
  double frame = 1.0;
  SchoutenSign sign = SchoutenSign::plus;

  double radial() const noexcept { return frame * (chi1 - chi2); }
  double tangential() const noexcept { return frame * chi1; }
  std::vector<double> assemble() const;
  double trace() const noexcept { return radial() + (n - 1) * tangential(); }
  SchoutenEigenvalues flipped() const noexcept;
  SchoutenEigenvalues with_sign(SchoutenSign s) const noexcept {
    return s == sign ? *this : flipped();
  }
};

struct RicciEigenvalues {
  double radial;
  double tangential;
  double scalar;
};

/// chi1 = (Phi'^2 - k)/(2 Phi^2), chi2 = -Phi''/Phi + 2 chi1; sign minus.
SchoutenEigenvalues warped_schouten(const RadialMetric& metric, double r);

/// Ricci eigenvalues and scalar curvature of a warped product.
RicciEigenvalues warped_ricci_scalar(const RadialMetric& metric, double r);

/// Eigenvalues of g^{-1}A for a conformally flat metric, via v = e^{(n-2)u0/2};
/// sign plus, frame e^{-2 u0}. At r = 0 the profile must be even.
SchoutenEigenvalues radial_conformal_schouten(const RadialMetric& metric, double r);

/// Natural-sign eigenvalues: plus for conformally flat, minus for warped.
SchoutenEigenvalues schouten(const RadialMetric& metric, double r);

/// Scalar curvature from the metric coefficients directly.
double scalar_curvature(const RadialMetric& metric, double r);

/// Local data needed to apply the transformation law at one radius.
/// The metric is e^{2w} g_model with w = w0 + u, where the model is the
/// Euclidean metric (flat case, w0 = u0) or the warped product itself
/// (w0 = 0). H is the tangential Hessian coefficient of a radial function
/// (1/r or Phi'/Phi); a_r, a_t are the +A eigenvalues of the model.
struct BackgroundFrame {
  Jet w0;
  double H = 0.0;
  double a_r = 0.0;
  double a_t = 0.0;
  bool origin = false;
};

BackgroundFrame background_frame(const RadialMetric& metric, double r);

/// Radial and tangential eigenvalues of (+/-) g_u^{-1} A_{g_u}, g_u = e^{2u}
/// g_0, with partial derivatives with respect to (u, u', u'').
struct EigenJet {
  double radial;
  double tangential;
  std::array<double, 3> d_radial;
  std::array<double, 3> d_tangential;
};

EigenJet conformal_eigen_jet(const BackgroundFrame& frame, const Jet& u, SchoutenSign sign);

/// Eigenvalues of g_u^{-1} A_{g_u} for g_u = e^{2u} base (sign plus).
SchoutenEigenvalues conformal_change_schouten(const RadialMetric& base, const RadialProfile& u,
                                              double r);

/// (1 + m/(2 r^{mu-1}))^{4/(mu-1)} |dx|^2.
RadialMetric schwarzschild_type(int n, double mu, double m);

struct EndConditionReport {
  bool pass = false;
  bool chi1_ok = false;
  bool ratio_ok = false;
  double min_chi1 = 0.0;
  double min_ratio = 0.0;  // min of 2 Phi Phi''/(Phi'^2 - k)
  double ratio_bound = 0.0;  // -mu + 1 + delta
  std::size_t samples = 0;
};

/// Samples chi1 >= eps and 2 Phi Phi''/(Phi'^2 - k) >= -mu + 1 + delta on
/// [r_lo, r_hi].
EndConditionReport check_end_conditions(const RadialMetric& metric, double mu, double r_lo,
                                        double r_hi, double eps, double delta,
                                        std::size_t samples = 2001);

struct DecayReport {
  std::vector<double> probes;
  std::array<double, 2> weighted_sup{};  // sup r^{tau+j} |grad^j u|, j = 0, 1
  double c1_norm = 0.0;
  double fitted_exponent = std::numeric_limits<double>::quiet_NaN();
  std::optional<double> sobolev_norm;  // W^{2,p}_{-tau} over the probed annulus
};

/// The Sobolev norm uses the weight r^{tau - n/p + j} and the measure
/// r^{n-1} dr (unit sphere area omitted).
DecayReport decay_report(const RadialProfile& u, double tau, std::optional<double> p,
                         std::span<const double> probes, int n);

/// Compactly supported radial conformal perturbation of a conformally flat
/// background, measured against a cone with margin.
struct PerturbationReport {
  double c2_norm = 0.0;
  double lipschitz = 0.0;
  double predicted_shift = 0.0;
  double background_margin = 0.0;
  double perturbed_margin = 0.0;
  bool small_enough = false;
  bool perturbed_interior = false;
};

PerturbationReport perturbation_report(const RadialMetric& background, const RadialProfile& bump,
                                       const ConeSpec& cone, double r_lo, double r_hi,
                                       std::size_t samples = 801);

struct CurvatureRow {
  double r;
  double chi1;
  double chi2;
  std::vector<double> lambda;
  double scalar;
  double f;       // NaN when the eigenvalues are outside the cone
  double margin;  // normalized min sigma_j
};

/// Natural-sign curvature samples at count equally spaced radii.
std::vector<CurvatureRow> curvature_curve(const RadialMetric& metric, const SymmetricFunctional& F,
                                          double r_lo, double r_hi, std::size_t count);

}  // namespace yamabe
