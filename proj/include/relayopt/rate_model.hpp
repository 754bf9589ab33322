#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace relayopt {

enum class ModelKind { low_snr, power_law, custom };

/// Separable achievable-rate law R = g(P) / h(D).
///
/// g must be increasing with g(0) = 0, h increasing and positive for D > 0,
/// so that power_for_rate(R, D) = g_inv(R * h(D)) is well defined. Built-in
/// families validate their parameters directly; custom models are spot-checked
/// on a geometric probe grid (monotonicity, convexity of g, growth ordering)
/// and rejected with ModelContract on failure.
class RateModel {
 public:
  static RateModel low_snr(double noise_density, double path_loss_exponent);
  static RateModel power_law(double g_exponent, double h_exponent, double h_scale = 1.0);
  static RateModel custom(std::function<double(double)> g, std::function<double(double)> h,
                          std::string name);

  double g(double power) const;
  double h(double dist) const;
  /// Inverse of g, clamped at 0 for non-positive rates.
  double g_inv(double rate) const;
  /// Inverse of h on (0, inf).
  double h_inv(double value) const;

  bool g_is_linear() const { return g_linear_; }
  const std::string& descriptor() const { return descriptor_; }
  ModelKind kind() const { return kind_; }
  /// Factory parameters in declaration order; empty for custom models.
  const std::vector<double>& parameters() const { return params_; }

 private:
  RateModel() = default;
  void validate() const;

  std::function<double(double)> g_;
  std::function<double(double)> h_;
  std::function<double(double)> g_inv_;   // may be empty: fall back to bisection
  std::function<double(double)> h_inv_;   // may be empty: fall back to bisection
  bool g_linear_ = false;
  bool probe_fatal_ = false;  // custom models fail hard on a bad probe
  ModelKind kind_ = ModelKind::custom;
  std::vector<double> params_;
  std::string descriptor_;
};

/// Rate achieved when transmitting with `power` over distance `dist`.
double rate(const RateModel& m, double power, double dist);

/// Power needed to sustain `target_rate` over distance `dist`.
double power_for_rate(const RateModel& m, double target_rate, double dist);

}  // namespace relayopt
