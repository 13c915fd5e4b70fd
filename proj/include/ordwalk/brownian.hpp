#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ordwalk/rng.hpp"
#include "ordwalk/stats.hpp"

namespace ordwalk {

/// Output rows of a Dyson path, one per stored time, each strictly ordered.
struct DysonPath {
  int dim = 0;
  std::vector<double> times;
  std::vector<double> values;  // times.size() x dim, row-major

  const double* row(std::size_t i) const { return values.data() + i * dim; }
};

struct DysonOptions {
  /// Internal substeps are at most eps * (smallest gap)^2, which keeps the
  /// Euler step small where the repulsion 1/(x_i - x_j) is large.
  double eps = 0.05;
  /// Halvings of one substep allowed after a crossing before StepSizeUnderflow.
  int max_halvings = 20;
};

/// Means of the order statistics of n standard normals, increasing.
std::vector<double> normal_order_means(int n);

/// Euler-Maruyama for dX_i = dB_i + sum_{j != i} dt / (X_i - X_j), stored at
/// the multiples of dt up to t_end. An empty (or all-zero) start enters from
/// the origin: the state at time dt is sqrt(dt) times the normal
/// order-statistic means, and t = 0 is not stored. A step that would break
/// the ordering is split in two along the Brownian bridge of its increment.
DysonPath simulate_dyson(int dim, double t_end, double dt, std::span<const double> start, RngStream& rng,
                         const DysonOptions& opts = {});

/// Advances an ordered state from t0 to t1 under the Dyson SDE with
/// adaptive substeps.
void advance_dyson(std::vector<double>& x, double t0, double t1, RngStream& rng, const DysonOptions& opts);

/// Advances several Dyson processes on one clock. They share the Brownian
/// increments: a process of dimension d is driven by the first d of them.
void advance_dyson_coupled(std::vector<std::vector<double>>& xs, double t0, double t1, RngStream& rng,
                           const DysonOptions& opts);

struct PsiOptions {
  std::vector<double> a_grid{0.02, 0.01, 0.005};
  std::uint64_t paths = 100000;
  double dt = 1.0 / 512.0;  // output clock of the Dyson part
  int bootstrap = 200;
  DysonOptions dyson{};
};

/// psi-hat on an r-grid. values[ia][ir] is the ratio at gap a_grid[ia];
/// extrapolated[ir] is linear in a through the two smallest a.
struct PsiCurve {
  int k = 0;
  std::vector<double> r_grid;
  std::vector<double> a_grid;
  std::vector<std::vector<double>> values;
  std::vector<std::vector<double>> stderr_;
  std::vector<double> extrapolated;
  std::vector<double> extrapolated_stderr;
  /// Bootstrap stderr of values[i_min][r] - values[i_2min][r] (joint).
  std::vector<double> a_step_stderr;
  std::uint64_t paths = 0;

  /// Monotone, clipped, log-log interpolation of the extrapolated values;
  /// below the grid psi ~ r^(k-1), above it the last value.
  double operator()(double r) const;
};

/// Ratio of P(k motions from (0, a, ..., (k-2)a, r) stay ordered on [0, 1])
/// to P(the first k-1 of them stay ordered), per a. Both probabilities use
/// P_y(ordered on [0, 1]) = Delta(y) E_y[1 / Delta(D(1))] for the Dyson
/// process D from y, so psi = prod_i (r - y_i) E[1/Delta_k] / E[1/Delta_{k-1}].
/// The (k-1)- and k-dimensional Dyson processes of one path are driven by
/// the same first k-1 Brownian motions plus one more for the top.
/// Throws DenominatorVanishes if E[1/Delta_{k-1}] has relative stderr > 25%.
PsiCurve estimate_psi_curve(std::span<const double> r_grid, int k, const PsiOptions& opts, const RngStream& base);

McEstimate estimate_psi(double r, int k, const PsiOptions& opts, const RngStream& base);

struct ThetaValue {
  double value = 0.0;  // quadrature + midpoint of the tail bracket
  double lower = 0.0;
  double upper = 0.0;
  double p_weighted = 0.0;  // p * value
};

/// Integral of psi(y) alpha y^(-alpha-1) over [a, infinity). The part beyond
/// r_max is bracketed by psi(r_max) r_max^-alpha and r_max^-alpha.
ThetaValue theta_of_a(double a, const std::function<double(double)>& psi, double r_max, double alpha, double p);
ThetaValue theta_of_a(double a, const PsiCurve& psi, double alpha, double p);

enum class JumpSide { Top, Bottom };

/// Start law of the limit process: with probability p_of_x the top
/// coordinate starts at Y ~ f, otherwise the bottom one at -Y, all others at
/// zero. f(y) = psi(y) y^(-alpha-1) / norm is tabulated on a log grid, with
/// power-law pieces below and above it.
class LimitStartLaw {
 public:
  LimitStartLaw() = default;
  LimitStartLaw(const std::function<double(double)>& psi, int k, double alpha, double p_of_x, double q_of_x,
                double y_lo = 1e-3, double y_hi = 1e3, int cells = 4000);
  LimitStartLaw(const PsiCurve& psi, double alpha, double p_of_x, double q_of_x);

  int k() const { return k_; }
  double alpha() const { return alpha_; }
  double p_of_x() const { return p_; }
  double q_of_x() const { return q_; }
  /// Normalizer: integral of psi(y) y^(-alpha-1) over (0, infinity).
  double theta() const { return theta_; }
  double density(double y) const;
  double cdf(double y) const;
  double quantile(double u) const;
  /// Quadrature of f over the table plus both analytic ends.
  double total_mass() const;
  const std::vector<double>& grid() const { return y_; }

 private:
  int k_ = 0;
  double alpha_ = 0.0, p_ = 0.5, q_ = 0.5, theta_ = 1.0;
  double low_coef_ = 0.0, high_coef_ = 0.0;  // f ~ low y^(k-2-alpha), f ~ high y^(-alpha-1)
  double low_mass_ = 0.0, high_mass_ = 0.0;
  std::vector<double> y_, f_, cdf_;
};

struct LimitStart {
  std::vector<double> point;
  JumpSide side = JumpSide::Top;
};

LimitStart sample_limit_start(const LimitStartLaw& law, RngStream& rng);

struct LimitProcessOptions {
  double a = 0.01;
  int proposals = 64;  // candidate paths per returned path
  DysonOptions dyson{};
};

struct LimitPath {
  std::vector<double> times;
  std::vector<double> values;  // times x k
  int k = 0;
  double acceptance = 0.0;  // effective fraction of the candidate batch
  const double* row(std::size_t i) const { return values.data() + i * k; }
};

/// k Brownian motions from y0 + a (0, 1, ..., k-1) conditioned to stay
/// ordered on [0, 1], reported on t_grid (increasing, t_grid[0] = 0,
/// last point 1). Candidates are k-dimensional Dyson paths, and one is
/// picked with probability proportional to 1/Delta(D(1)), which turns the
/// Dyson law into the conditioned Brownian law. Throws RejectionStarved if
/// the effective fraction of the batch is below 1e-4.
LimitPath sample_limit_process(std::span<const double> y0, std::span<const double> t_grid, RngStream& rng,
                               const LimitProcessOptions& opts = {});

/// Uniform grid of `points` times on [0, 1].
std::vector<double> unit_time_grid(int points = 512);

std::string psi_curve_csv(const PsiCurve& psi);
std::string f_table_csv(const LimitStartLaw& law);
/// Reads the extrapolated column of psi_curve_csv output.
PsiCurve parse_psi_curve_csv(const std::string& text);

}  // namespace ordwalk
