#include "ordwalk/stats.hpp"

#include <algorithm>
#include <numeric>

namespace ordwalk {

double MomentSums::std_error() const {
  if (n < 2) return 0.0;
  const double m = s1 / n;
  const double var = std::max(0.0, (s2 - n * m * m) / (n - 1.0));
  return std::sqrt(var / n);
}

McEstimate ratio_estimate(double num_mean, double num_se, double den_mean, double den_se,
                          double covariance) {
  McEstimate e;
  e.value = num_mean / den_mean;
  const double rn = num_se / den_mean;
  const double rd = e.value * den_se / den_mean;
  const double rc = 2.0 * e.value * covariance / (den_mean * den_mean);
  e.std_error = std::sqrt(std::max(0.0, rn * rn + rd * rd - rc));
  return e;
}

LineFit wls_fit(std::span<const double> x, std::span<const double> y, std::span<const double> w) {
  LineFit f;
  double S = 0, Sx = 0, Sy = 0, Sxx = 0, Sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    S += w[i];
    Sx += w[i] * x[i];
    Sy += w[i] * y[i];
    Sxx += w[i] * x[i] * x[i];
    Sxy += w[i] * x[i] * y[i];
  }
  const double D = S * Sxx - Sx * Sx;
  f.points = x.size();
  if (x.size() < 2 || !(D > 0)) {
    f.slope = std::numeric_limits<double>::quiet_NaN();
    f.intercept = f.slope;
    return f;
  }
  f.slope = (S * Sxy - Sx * Sy) / D;
  f.intercept = (Sxx * Sy - Sx * Sxy) / D;
  f.slope_se = std::sqrt(S / D);
  f.intercept_se = std::sqrt(Sxx / D);
  f.cov = -Sx / D;
  return f;
}

LineFit wls_fit_fixed_slope(std::span<const double> x, std::span<const double> y,
                            std::span<const double> w, double slope) {
  LineFit f;
  double S = 0, Sr = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    S += w[i];
    Sr += w[i] * (y[i] - slope * x[i]);
  }
  f.points = x.size();
  f.slope = slope;
  f.intercept = S > 0 ? Sr / S : std::numeric_limits<double>::quiet_NaN();
  f.intercept_se = S > 0 ? std::sqrt(1.0 / S) : 0.0;
  return f;
}

double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf,
                   std::span<const double> weights) {
  const std::size_t n = sample.size();
  if (n == 0) return 1.0;
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return sample[a] < sample[b]; });
  double total = weights.empty() ? static_cast<double>(n) : 0.0;
  if (!weights.empty()) {
    for (double w : weights) total += w;
  }
  double acc = 0.0, d = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t i = idx[r];
    const double F = cdf(sample[i]);
    const double before = acc / total;
    acc += weights.empty() ? 1.0 : weights[i];
    const double after = acc / total;
    d = std::max({d, std::abs(F - before), std::abs(after - F)});
  }
  return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) return 1.0;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  return d;
}

double hill_estimator(std::vector<double> sample, std::size_t top) {
  if (top < 1 || top >= sample.size()) return std::numeric_limits<double>::quiet_NaN();
  std::nth_element(sample.begin(), sample.end() - static_cast<std::ptrdiff_t>(top) - 1, sample.end());
  const double threshold = *(sample.end() - static_cast<std::ptrdiff_t>(top) - 1);
  double acc = 0.0;
  for (auto it = sample.end() - static_cast<std::ptrdiff_t>(top); it != sample.end(); ++it) {
    acc += std::log(*it / threshold);
  }
  return static_cast<double>(top) / acc;
}

}  // namespace ordwalk
