#include "relayopt/rate_model.hpp"

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "relayopt/errors.hpp"

namespace relayopt {

namespace {

double invert_increasing(const std::function<double(double)>& f, double target,
                         const char* what) {
  if (target <= 0.0) return 0.0;
  if (!std::isfinite(target))
    throw Error(ErrorCode::rate_infeasible, std::string("non-finite target for ") + what);
  double hi = 1.0;
  while (f(hi) < target) {
    hi *= 2.0;
    if (hi > 1e300)
      throw Error(ErrorCode::rate_infeasible, std::string(what) + " target out of range");
  }
  double lo = 0.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (f(mid) < target)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-12 * std::max(1.0, hi)) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

void RateModel::validate() const {
  auto fail = [&](const std::string& msg) {
    ErrorCode code = probe_fatal_ ? ErrorCode::model_contract : ErrorCode::invalid_scenario;
    throw Error(code, "rate model '" + descriptor_ + "': " + msg);
  };
  if (!g_ || !h_) fail("missing g or h");
  double g0 = g_(0.0);
  if (!(std::abs(g0) <= 1e-12)) fail("g(0) must be 0");

  // Spot checks on a 64-point geometric grid spanning [1e-6, 1e6]:
  // monotonicity of both maps, convexity of g, and the g' <= h'
  // growth-ordering condition on the diagonal. Maps that overflow partway
  // up the grid (exponentials) are checked on their finite prefix. The
  // diagonal condition only applies from unit distance upward; physical
  // attenuation laws dip below identity at sub-unit distances.
  std::vector<double> xs(64);
  xs[0] = 1e-6;
  const double ratio = std::pow(1e12, 1.0 / 63.0);
  for (size_t i = 1; i < xs.size(); ++i) xs[i] = xs[i - 1] * ratio;
  std::vector<double> gs, hs;
  for (double v : xs) {
    double gv = g_(v);
    if (!std::isfinite(gv)) break;
    gs.push_back(gv);
  }
  for (double v : xs) {
    double hv = h_(v);
    if (!std::isfinite(hv)) break;
    hs.push_back(hv);
  }
  if (gs.size() < 16 || hs.size() < 16) fail("g or h not finite over the probe grid");
  if (!(hs[0] > 0.0)) fail("h must be positive");
  for (size_t i = 1; i < gs.size(); ++i)
    if (gs[i] <= gs[i - 1]) fail("g must be strictly increasing");
  for (size_t i = 1; i < hs.size(); ++i)
    if (hs[i] <= hs[i - 1]) fail("h must be strictly increasing");
  if (g0 > gs[0]) fail("g must be increasing from 0");
  for (size_t i = 1; i + 1 < gs.size(); ++i) {
    double chord =
        gs[i - 1] + (gs[i + 1] - gs[i - 1]) * (xs[i] - xs[i - 1]) / (xs[i + 1] - xs[i - 1]);
    if (gs[i] > chord * (1.0 + 1e-9) + 1e-12) fail("g must be convex");
  }
  size_t common = std::min(gs.size(), hs.size());
  for (size_t i = 1; i < common; ++i) {
    if (xs[i - 1] < 1.0) continue;
    double dg = gs[i] - gs[i - 1];
    double dh = hs[i] - hs[i - 1];
    if (dg > dh * (1.0 + 1e-9) + 1e-12)
      fail("g must not grow faster than h along the diagonal");
  }
  if (g_inv_ || h_inv_) return;
  for (size_t i = 0; i < gs.size(); ++i) {
    double back = invert_increasing(g_, gs[i], "g_inv");
    if (std::abs(back - xs[i]) > 1e-9 * std::max(1.0, xs[i])) fail("g_inv does not invert g");
  }
}

RateModel RateModel::low_snr(double noise_density, double path_loss_exponent) {
  if (!(noise_density > 0.0))
    throw Error(ErrorCode::invalid_scenario, "low_snr noise density must be positive");
  if (!(path_loss_exponent >= 2.0))
    throw Error(ErrorCode::invalid_scenario, "low_snr path loss exponent must be >= 2");
  RateModel m;
  double n0 = noise_density;
  double alpha = path_loss_exponent;
  m.g_ = [](double p) { return p; };
  m.g_inv_ = [](double r) { return r; };
  m.h_ = [n0, alpha](double d) { return n0 * std::pow(d, alpha); };
  m.h_inv_ = [n0, alpha](double v) { return std::pow(v / n0, 1.0 / alpha); };
  m.g_linear_ = true;
  m.kind_ = ModelKind::low_snr;
  m.params_ = {n0, alpha};
  char buf[96];
  std::snprintf(buf, sizeof buf, "low_snr(n0=%g,alpha=%g)", n0, alpha);
  m.descriptor_ = buf;
  return m;
}

RateModel RateModel::power_law(double g_exponent, double h_exponent, double h_scale) {
  if (!(g_exponent >= 1.0))
    throw Error(ErrorCode::invalid_scenario, "power_law g exponent must be >= 1 (g convex)");
  if (!(h_exponent > 0.0))
    throw Error(ErrorCode::invalid_scenario, "power_law h exponent must be positive");
  if (!(h_scale > 0.0))
    throw Error(ErrorCode::invalid_scenario, "power_law h scale must be positive");
  RateModel m;
  double a = g_exponent, b = h_exponent, s = h_scale;
  m.g_ = [a](double p) { return std::pow(p, a); };
  m.g_inv_ = [a](double r) { return r <= 0.0 ? 0.0 : std::pow(r, 1.0 / a); };
  m.h_ = [b, s](double d) { return s * std::pow(d, b); };
  m.h_inv_ = [b, s](double v) { return std::pow(v / s, 1.0 / b); };
  m.g_linear_ = std::abs(a - 1.0) < 1e-15;
  m.kind_ = ModelKind::power_law;
  m.params_ = {a, b, s};
  char buf[96];
  std::snprintf(buf, sizeof buf, "power_law(a=%g,b=%g,s=%g)", a, b, s);
  m.descriptor_ = buf;
  return m;
}

RateModel RateModel::custom(std::function<double(double)> g, std::function<double(double)> h,
                            std::string name) {
  RateModel m;
  m.g_ = std::move(g);
  m.h_ = std::move(h);
  m.probe_fatal_ = true;
  m.descriptor_ = std::move(name);
  m.validate();
  return m;
}

double RateModel::g(double power) const { return g_(power); }

double RateModel::h(double dist) const { return h_(dist); }

double RateModel::g_inv(double target_rate) const {
  if (g_inv_) return target_rate <= 0.0 ? 0.0 : g_inv_(target_rate);
  return invert_increasing(g_, target_rate, "g_inv");
}

double RateModel::h_inv(double value) const {
  if (h_inv_) return h_inv_(value);
  return invert_increasing(h_, value, "h_inv");
}

double rate(const RateModel& m, double power, double dist) {
  if (power < 0.0) throw Error(ErrorCode::invalid_scenario, "negative transmit power");
  if (dist <= 0.0) throw Error(ErrorCode::degenerate_geometry, "rate needs a positive distance");
  return m.g(power) / m.h(dist);
}

double power_for_rate(const RateModel& m, double target_rate, double dist) {
  if (target_rate <= 0.0) return 0.0;
  if (dist <= 0.0)
    throw Error(ErrorCode::degenerate_geometry, "power_for_rate needs a positive distance");
  return m.g_inv(target_rate * m.h(dist));
}

}  // namespace relayopt
