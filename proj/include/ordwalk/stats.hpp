#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace ordwalk {

/// Return shape of every estimator: value, standard error, sample count and
/// RNG provenance. `ess` and `max_weight` are filled by weighted estimators.
struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  double ess = std::numeric_limits<double>::quiet_NaN();
  double max_weight = std::numeric_limits<double>::quiet_NaN();

  double rel_error() const { return value != 0.0 ? std_error / std::abs(value) : std::numeric_limits<double>::infinity(); }
};

/// Sums of y and y^2. Merged in a fixed order by the block runner so totals
/// do not depend on the number of workers.
struct MomentSums {
  double n = 0.0;
  double s1 = 0.0;
  double s2 = 0.0;

  void add(double y) {
    n += 1.0;
    s1 += y;
    s2 += y * y;
  }
  void merge(const MomentSums& o) {
    n += o.n;
    s1 += o.s1;
    s2 += o.s2;
  }
  double mean() const { return n > 0 ? s1 / n : 0.0; }
  /// Standard error of the mean (sample variance with n-1).
  double std_error() const;
};

/// Importance-weighted sums. Tracks the weighted indicator (or payload) and
/// the raw weights for the Kong effective sample size.
struct WeightedSums {
  MomentSums payload;       // w * h per draw
  double w_sum = 0.0;       // sum w over all draws
  double w_sq = 0.0;        // sum w^2 over all draws
  double hit_w = 0.0;       // sum w over draws with h != 0
  double hit_w_sq = 0.0;
  double w_max = 0.0;

  void add(double w, double h) {
    payload.add(w * h);
    w_sum += w;
    w_sq += w * w;
    if (h != 0.0) {
      hit_w += w;
      hit_w_sq += w * w;
    }
    if (w > w_max) w_max = w;
  }
  void merge(const WeightedSums& o) {
    payload.merge(o.payload);
    w_sum += o.w_sum;
    w_sq += o.w_sq;
    hit_w += o.hit_w;
    hit_w_sq += o.hit_w_sq;
    if (o.w_max > w_max) w_max = o.w_max;
  }
  /// (sum w)^2 / sum w^2 over all draws.
  double ess() const { return w_sq > 0 ? w_sum * w_sum / w_sq : 0.0; }
  /// Same quantity restricted to draws that contribute.
  double ess_hits() const { return hit_w_sq > 0 ? hit_w * hit_w / hit_w_sq : 0.0; }
};

/// Ratio of two correlated means with delta-method standard error.
McEstimate ratio_estimate(double num_mean, double num_se, double den_mean, double den_se,
                          double covariance = 0.0);

struct LineFit {
  double slope = 0.0;
  double slope_se = 0.0;
  double intercept = 0.0;
  double intercept_se = 0.0;
  double cov = 0.0;  // cov(intercept, slope)
  std::size_t points = 0;
};

/// Weighted least squares y = a + b x with weights w = 1/var(y). Standard
/// errors come from the weights, not the residuals.
LineFit wls_fit(std::span<const double> x, std::span<const double> y, std::span<const double> w);

/// Weighted fit with the slope pinned; returns the intercept only.
LineFit wls_fit_fixed_slope(std::span<const double> x, std::span<const double> y,
                            std::span<const double> w, double slope);

/// Sup distance between the empirical CDF of `sample` and `cdf`. `weights`
/// may be empty (unweighted) or hold a nonnegative weight per sample.
double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf,
                   std::span<const double> weights = {});

/// Two-sample sup distance between empirical CDFs.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Hill estimator of the tail index from the top `top` order statistics.
double hill_estimator(std::vector<double> sample, std::size_t top);

}  // namespace ordwalk
