#include "yamabe/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "yamabe/errors.hpp"

namespace yamabe {

namespace {

void check_metric(int n, const Interval& domain) {
  if (n < 3) throw DomainError("metric dimension must be >= 3");
  if (!(domain.hi > domain.lo)) throw DomainError("metric domain must satisfy lo < hi");
}

void check_in_domain(const RadialMetric& metric, double r) {
  if (!metric.domain().contains(r)) {
    std::ostringstream os;
    os << "r = " << r << " is outside the metric domain [" << metric.domain().lo << ", "
       << metric.domain().hi << "]";
    throw DomainError(os.str());
  }
}

const WarpedProduct& require_warped(const RadialMetric& metric, const char* op) {
  const auto* w = metric.as_warped();
  if (w == nullptr) throw DomainError(std::string(op) + " needs a warped-product metric");
  return *w;
}

const ConformallyFlat& require_flat(const RadialMetric& metric, const char* op) {
  const auto* c = metric.as_conformally_flat();
  if (c == nullptr) throw DomainError(std::string(op) + " needs a conformally flat metric");
  return *c;
}

Jet warp_jet(const WarpedProduct& w, double r) {
  const Jet phi = w.warp.jet(r);
  if (!(phi.value > 0.0)) {
    std::ostringstream os;
    os << "warping function must be positive, Phi(" << r << ") = " << phi.value;
    throw DomainError(os.str());
  }
  return phi;
}

// Symmetric origin: the profile must be even, so u'(0) vanishes.
void check_origin_slope(double slope, const char* what) {
  if (std::abs(slope) >= 1e-12) {
    throw DomainError(std::string(what) + " has nonzero slope at r = 0; no symmetric extension");
  }
}

}  // namespace

RadialMetric::RadialMetric(ConformallyFlat form) : form_(std::move(form)) {
  const auto& c = std::get<ConformallyFlat>(form_);
  check_metric(c.n, c.domain);
  if (c.domain.lo < 0.0) throw DomainError("conformally flat domain must lie in r >= 0");
}

RadialMetric::RadialMetric(WarpedProduct form) : form_(std::move(form)) {
  const auto& w = std::get<WarpedProduct>(form_);
  check_metric(w.n, w.domain);
  if (w.fiber_sign < -1 || w.fiber_sign > 1) throw DomainError("fiber sign k must be -1, 0 or 1");
}

RadialMetric RadialMetric::euclidean(int n) {
  return ConformallyFlat{n, RadialProfile::constant(0.0), Interval{}};
}

RadialMetric RadialMetric::conformally_flat(int n, RadialProfile u0, Interval domain) {
  return ConformallyFlat{n, std::move(u0), domain};
}

RadialMetric RadialMetric::warped_product(int n, RadialProfile warp, int fiber_sign,
                                          Interval domain) {
  return WarpedProduct{n, std::move(warp), fiber_sign, domain};
}

int RadialMetric::dimension() const noexcept {
  return std::visit([](const auto& f) { return f.n; }, form_);
}

Interval RadialMetric::domain() const noexcept {
  return std::visit([](const auto& f) { return f.domain; }, form_);
}

std::string RadialMetric::describe() const {
  std::ostringstream os;
  if (const auto* c = as_conformally_flat()) {
    os << "conformally_flat(n=" << c->n << ", u0=" << c->u0.name() << ")";
  } else {
    const auto& w = *as_warped();
    os << "warped_product(n=" << w.n << ", Phi=" << w.warp.name() << ", k=" << w.fiber_sign
       << ")";
  }
  return os.str();
}

std::vector<double> SchoutenEigenvalues::assemble() const {
  std::vector<double> out(static_cast<std::size_t>(n), tangential());
  out[0] = radial();
  return out;
}

SchoutenEigenvalues SchoutenEigenvalues::flipped() const noexcept {
  SchoutenEigenvalues out = *this;
  out.chi1 = -chi1;
  out.chi2 = -chi2;
  out.sign = sign == SchoutenSign::plus ? SchoutenSign::minus : SchoutenSign::plus;
  return out;
}

SchoutenEigenvalues warped_schouten(const RadialMetric& metric, double r) {
  const auto& w = require_warped(metric, "warped_schouten");
  check_in_domain(metric, r);
  const Jet phi = warp_jet(w, r);
  const double chi1 = (phi.d1 * phi.d1 - w.fiber_sign) / (2.0 * phi.value * phi.value);
  const double chi2 = -phi.d2 / phi.value + 2.0 * chi1;
  return {w.n, chi1, chi2, 1.0, SchoutenSign::minus};
}

RicciEigenvalues warped_ricci_scalar(const RadialMetric& metric, double r) {
  const auto& w = require_warped(metric, "warped_ricci_scalar");
  check_in_domain(metric, r);
  const Jet phi = warp_jet(w, r);
  const int n = w.n;
  const double curv = phi.d2 / phi.value;
  const double fiber = (w.fiber_sign - phi.d1 * phi.d1) / (phi.value * phi.value);
  const double tangential = -curv + (n - 2) * fiber;
  const double radial = tangential - (n - 2) * (curv + fiber);
  return {radial, tangential, radial + (n - 1) * tangential};
}

SchoutenEigenvalues radial_conformal_schouten(const RadialMetric& metric, double r) {
  const auto& c = require_flat(metric, "radial_conformal_schouten");
  if (r < 0.0) throw DomainError("radial_conformal_schouten needs r >= 0");
  check_in_domain(metric, r);
  const int n = c.n;
  const Jet u0 = c.u0.jet(r);
  const double a = 0.5 * (n - 2);
  const double vr_v = a * u0.d1;
  const double vrr_v = a * u0.d2 + vr_v * vr_v;
  double vr_vr;
  if (r == 0.0) {
    check_origin_slope(u0.d1, "background conformal factor");
    vr_vr = vrr_v;
  } else {
    vr_vr = vr_v / r;
  }
  const double nm2 = n - 2.0;
  const double chi1 = -2.0 / nm2 * vr_vr - 2.0 / (nm2 * nm2) * vr_v * vr_v;
  const double chi2 = 2.0 / nm2 * (vrr_v - vr_vr) - 2.0 * n / (nm2 * nm2) * vr_v * vr_v;
  return {n, chi1, chi2, std::exp(-2.0 * u0.value), SchoutenSign::plus};
}

SchoutenEigenvalues schouten(const RadialMetric& metric, double r) {
  return metric.is_warped() ? warped_schouten(metric, r) : radial_conformal_schouten(metric, r);
}

double scalar_curvature(const RadialMetric& metric, double r) {
  if (metric.is_warped()) {
    const auto& w = *metric.as_warped();
    check_in_domain(metric, r);
    const Jet phi = warp_jet(w, r);
    const int n = w.n;
    return -2.0 * (n - 1) * phi.d2 / phi.value +
           (n - 1.0) * (n - 2.0) * (w.fiber_sign - phi.d1 * phi.d1) / (phi.value * phi.value);
  }
  const auto& c = *metric.as_conformally_flat();
  check_in_domain(metric, r);
  const int n = c.n;
  const Jet w = c.u0.jet(r);
  double laplacian;
  if (r == 0.0) {
    check_origin_slope(w.d1, "background conformal factor");
    laplacian = n * w.d2;
  } else {
    laplacian = w.d2 + (n - 1) * w.d1 / r;
  }
  return -2.0 * (n - 1) * std::exp(-2.0 * w.value) * (laplacian + 0.5 * (n - 2) * w.d1 * w.d1);
}

BackgroundFrame background_frame(const RadialMetric& metric, double r) {
  check_in_domain(metric, r);
  BackgroundFrame out;
  if (const auto* c = metric.as_conformally_flat()) {
    if (r < 0.0) throw DomainError("negative radius");
    out.w0 = c->u0.jet(r);
    if (r == 0.0) {
      check_origin_slope(out.w0.d1, "background conformal factor");
      out.origin = true;
    } else {
      out.H = 1.0 / r;
    }
    return out;
  }
  const auto& w = *metric.as_warped();
  const Jet phi = warp_jet(w, r);
  const SchoutenEigenvalues minus_a = warped_schouten(metric, r);
  out.H = phi.d1 / phi.value;
  out.a_r = minus_a.chi2 - minus_a.chi1;
  out.a_t = -minus_a.chi1;
  return out;
}

EigenJet conformal_eigen_jet(const BackgroundFrame& frame, const Jet& u, SchoutenSign sign) {
  const double w1 = frame.w0.d1 + u.d1;
  const double w2 = frame.w0.d2 + u.d2;
  const double E = std::exp(-2.0 * (frame.w0.value + u.value));
  EigenJet out{};
  out.radial = E * (-w2 + 0.5 * w1 * w1 + frame.a_r);
  out.d_radial = {-2.0 * out.radial, E * w1, -E};
  if (frame.origin) {
    out.tangential = E * (-w2 + frame.a_t);
    out.d_tangential = {-2.0 * out.tangential, 0.0, -E};
  } else {
    out.tangential = E * (-frame.H * w1 - 0.5 * w1 * w1 + frame.a_t);
    out.d_tangential = {-2.0 * out.tangential, E * (-frame.H - w1), 0.0};
  }
  if (sign == SchoutenSign::minus) {
    out.radial = -out.radial;
    out.tangential = -out.tangential;
    for (double& d : out.d_radial) d = -d;
    for (double& d : out.d_tangential) d = -d;
  }
  return out;
}

SchoutenEigenvalues conformal_change_schouten(const RadialMetric& base, const RadialProfile& u,
                                              double r) {
  const BackgroundFrame frame = background_frame(base, r);
  const Jet uj = u.jet(r);
  if (frame.origin) check_origin_slope(uj.d1, "conformal factor");
  const double E = std::exp(-2.0 * (frame.w0.value + uj.value));
  const EigenJet ej = conformal_eigen_jet(frame, uj, SchoutenSign::plus);
  const double tan = ej.tangential / E;
  const double rad = ej.radial / E;
  return {base.dimension(), tan, tan - rad, E, SchoutenSign::plus};
}

RadialMetric schwarzschild_type(int n, double mu, double m) {
  if (!(mu > 1.0)) throw DomainError("Schwarzschild-type metric needs mu > 1");
  const double p = mu - 1.0;
  const double lo = m >= 0.0 ? 0.0 : std::pow(-0.5 * m, 1.0 / p);
  return ConformallyFlat{n, RadialProfile::schwarzschild_factor(mu, m), Interval{lo}};
}

EndConditionReport check_end_conditions(const RadialMetric& metric, double mu, double r_lo,
                                        double r_hi, double eps, double delta,
                                        std::size_t samples) {
  const auto& w = require_warped(metric, "check_end_conditions");
  if (samples < 2 || !(r_hi > r_lo)) throw DomainError("end-condition sampling needs r_lo < r_hi");
  EndConditionReport rep;
  rep.samples = samples;
  rep.ratio_bound = -mu + 1.0 + delta;
  rep.min_chi1 = std::numeric_limits<double>::infinity();
  rep.min_ratio = std::numeric_limits<double>::infinity();
  bool nan_ratio = false;
  for (std::size_t i = 0; i < samples; ++i) {
    const double r = r_lo + (r_hi - r_lo) * static_cast<double>(i) / (samples - 1);
    const Jet phi = warp_jet(w, r);
    const double num = phi.d1 * phi.d1 - w.fiber_sign;
    rep.min_chi1 = std::min(rep.min_chi1, num / (2.0 * phi.value * phi.value));
    const double ratio = 2.0 * phi.value * phi.d2 / num;
    if (std::isnan(ratio)) {
      nan_ratio = true;
    } else {
      rep.min_ratio = std::min(rep.min_ratio, ratio);
    }
  }
  if (nan_ratio) rep.min_ratio = std::numeric_limits<double>::quiet_NaN();
  rep.chi1_ok = rep.min_chi1 >= eps;
  rep.ratio_ok = !nan_ratio && rep.min_ratio >= rep.ratio_bound;
  rep.pass = rep.chi1_ok && rep.ratio_ok;
  return rep;
}

DecayReport decay_report(const RadialProfile& u, double tau, std::optional<double> p,
                         std::span<const double> probes, int n) {
  if (probes.empty()) throw DomainError("decay report needs probe radii");
  for (std::size_t i = 0; i < probes.size(); ++i) {
    if (!(probes[i] > 0.0) || (i > 0 && !(probes[i] > probes[i - 1]))) {
      throw DomainError("probe radii must be positive and increasing");
    }
  }
  if (p && !(*p >= 1.0)) throw DomainError("Sobolev exponent p must be >= 1");

  DecayReport rep;
  rep.probes.assign(probes.begin(), probes.end());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (double r : probes) {
    const Jet j = u.jet(r);
    rep.weighted_sup[0] = std::max(rep.weighted_sup[0], std::pow(r, tau) * std::abs(j.value));
    rep.weighted_sup[1] = std::max(rep.weighted_sup[1], std::pow(r, tau + 1.0) * std::abs(j.d1));
    if (j.value != 0.0) {
      const double x = std::log(r);
      const double y = std::log(std::abs(j.value));
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++count;
    }
  }
  rep.c1_norm = rep.weighted_sup[0] + rep.weighted_sup[1];
  if (count >= 2) {
    const double denom = count * sxx - sx * sx;
    if (denom > 0.0) rep.fitted_exponent = -(count * sxy - sx * sy) / denom;
  }

  if (p && probes.size() >= 2) {
    // Simpson's rule in s = ln r, dr = r ds.
    const std::size_t m = 2000;
    const double s0 = std::log(probes.front());
    const double s1 = std::log(probes.back());
    const double hs = (s1 - s0) / m;
    std::array<double, 3> integral{};
    for (std::size_t i = 0; i <= m; ++i) {
      const double r = std::exp(s0 + hs * static_cast<double>(i));
      const Jet j = u.jet(r);
      const double hess = std::sqrt(j.d2 * j.d2 + (n - 1) * (j.d1 / r) * (j.d1 / r));
      const std::array<double, 3> grad{std::abs(j.value), std::abs(j.d1), hess};
      const double weight = (i == 0 || i == m) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
      for (int k = 0; k < 3; ++k) {
        const double wr = std::pow(r, tau - n / *p + k) * grad[k];
        integral[k] += weight * std::pow(wr, *p) * std::pow(r, n - 1) * r;
      }
    }
    double norm = 0.0;
    for (double I : integral) norm += std::pow(I * hs / 3.0, 1.0 / *p);
    rep.sobolev_norm = norm;
  }
  return rep;
}

PerturbationReport perturbation_report(const RadialMetric& background, const RadialProfile& bump,
                                       const ConeSpec& cone, double r_lo, double r_hi,
                                       std::size_t samples) {
  require_flat(background, "perturbation_report");
  if (cone.dimension() != background.dimension()) {
    throw DimensionMismatch("cone and metric dimensions differ");
  }
  if (samples < 2 || !(r_hi > r_lo) || !(r_lo > 0.0)) {
    throw DomainError("perturbation sampling needs 0 < r_lo < r_hi");
  }
  PerturbationReport rep;
  rep.background_margin = std::numeric_limits<double>::infinity();
  rep.perturbed_margin = std::numeric_limits<double>::infinity();
  std::array<double, 3> sup{};
  const int n = background.dimension();
  auto assemble = [n](const EigenJet& e) {
    std::vector<double> v(static_cast<std::size_t>(n), e.tangential);
    v[0] = e.radial;
    return v;
  };
  auto row_lipschitz = [](const EigenJet& e) {
    double a = 0.0, b = 0.0;
    for (int k = 0; k < 3; ++k) {
      a += std::abs(e.d_radial[k]);
      b += std::abs(e.d_tangential[k]);
    }
    return std::max(a, b);
  };
  for (std::size_t i = 0; i < samples; ++i) {
    const double r = r_lo + (r_hi - r_lo) * static_cast<double>(i) / (samples - 1);
    const BackgroundFrame frame = background_frame(background, r);
    const Jet b = bump.jet(r);
    sup[0] = std::max(sup[0], std::abs(b.value));
    sup[1] = std::max(sup[1], std::abs(b.d1));
    sup[2] = std::max(sup[2], std::abs(b.d2));
    const EigenJet e0 = conformal_eigen_jet(frame, Jet{}, SchoutenSign::plus);
    const EigenJet e1 = conformal_eigen_jet(frame, b, SchoutenSign::plus);
    rep.lipschitz = std::max({rep.lipschitz, row_lipschitz(e0), row_lipschitz(e1)});
    rep.background_margin = std::min(rep.background_margin, interior_radius(cone, assemble(e0)));
    rep.perturbed_margin = std::min(rep.perturbed_margin, admissibility_margin(cone, assemble(e1)));
  }
  rep.c2_norm = sup[0] + sup[1] + sup[2];
  rep.predicted_shift = rep.lipschitz * rep.c2_norm;
  rep.small_enough = rep.predicted_shift < rep.background_margin;
  rep.perturbed_interior = rep.perturbed_margin > 0.0;
  return rep;
}

std::vector<CurvatureRow> curvature_curve(const RadialMetric& metric, const SymmetricFunctional& F,
                                          double r_lo, double r_hi, std::size_t count) {
  if (F.dimension() != metric.dimension()) {
    throw DimensionMismatch("functional and metric dimensions differ");
  }
  if (count < 2 || !(r_hi > r_lo)) throw DomainError("curve needs r_lo < r_hi and >= 2 rows");
  std::vector<CurvatureRow> rows;
  rows.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double r = r_lo + (r_hi - r_lo) * static_cast<double>(i) / (count - 1);
    const SchoutenEigenvalues s = schouten(metric, r);
    CurvatureRow row{r, s.chi1, s.chi2, s.assemble(), scalar_curvature(metric, r), 0.0, 0.0};
    row.margin = normalized_min_sigma(F.cone(), row.lambda);
    row.f = contains(F.cone(), row.lambda) == Membership::exterior
                ? std::numeric_limits<double>::quiet_NaN()
                : f_eval(F, row.lambda);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace yamabe
