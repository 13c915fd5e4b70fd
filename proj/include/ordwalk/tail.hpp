#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ordwalk/core.hpp"
#include "ordwalk/increments.hpp"
#include "ordwalk/rng.hpp"
#include "ordwalk/stats.hpp"

namespace ordwalk {

enum class TailMethod { Direct, ForcedJump, Splitting };

const char* method_name(TailMethod m);

/// Mixture proposal: with probability defensive_mix an unmodified path,
/// otherwise one increment of the top (bottom) coordinate at a uniform time
/// in [1, l_force] is drawn beyond +b*sqrt(n) (below -b*sqrt(n)).
struct ForcedJumpPolicy {
  int l_force = 8;
  double b = 0.5;
  double w_top = 0.5;
  double w_bottom = 0.5;
  double defensive_mix = 0.1;
  /// 0: plain importance sampling. Otherwise draws surviving the first
  /// level (>= l_force, >= first_level) are resampled in proportion to their
  /// weights and carried to n by fixed-effort splitting on doubling
  /// horizons with this many particles per level (summed over replicates).
  std::uint64_t carry_particles = 0;
  std::int64_t first_level = 16;
  int replicates = 16;

  /// Defaults with side weights proportional to (p, q).
  static ForcedJumpPolicy defaults(const IncrementLaw& law);
};

/// Fixed-effort splitting on doubling horizons. Standard error comes from
/// independent replicates.
struct SplittingPolicy {
  int replicates = 16;
  std::int64_t first_level = 4;
};

struct SurvivalMethod {
  TailMethod method = TailMethod::ForcedJump;
  ForcedJumpPolicy forced{};
  SplittingPolicy splitting{};
  /// Result withheld (DegenerateWeights) below this effective sample size
  /// among contributing draws.
  double min_ess = 50.0;
  /// Optional sub-event: also require |X_i(j)| <= increment_cap for all
  /// coordinates and steps j <= n.
  std::optional<double> increment_cap;
};

/// Unbiased estimate of P(tau_x > n) (or of the capped sub-event).
McEstimate estimate_survival(std::span<const double> x, const IncrementLaw& law, std::int64_t n,
                             const SurvivalMethod& method, std::uint64_t samples,
                             const RngStream& base);

/// Weighted draws of the ForcedJump sampler restricted to surviving paths.
/// Used for conditional (self-normalized) functionals of {tau_x > n}.
struct ForcedJumpDraw {
  std::uint64_t index;
  double weight;
  bool forced;        // drawn from a forced component
  int forced_side;    // +1 top, -1 bottom, 0 defensive
  std::int64_t jump_step;
  double jump_value;  // forced increment (0 for defensive draws)
};

std::vector<ForcedJumpDraw> forced_jump_survivors(std::span<const double> x, const IncrementLaw& law,
                                                  std::int64_t n, const ForcedJumpPolicy& policy,
                                                  std::uint64_t samples, const RngStream& base);

/// Rebuilds the positions x + S(m), m = 0..horizon, of the ForcedJump path
/// with the given index (same stream and proposal choice as above).
std::vector<std::vector<double>> replay_forced_path(std::span<const double> x, const IncrementLaw& law,
                                                    std::int64_t n, const ForcedJumpPolicy& policy,
                                                    const RngStream& base, std::uint64_t index,
                                                    std::int64_t horizon);

/// A path alive at n from the carried ForcedJump estimator. Gaps are
/// recorded at the first level and at n. The first level is the last
/// halving of n that is still >= max(first_level, l_force).
/// Weights are self-normalizing: they sum to R times the estimate.
struct CarriedSurvivor {
  int replicate = 0;
  std::size_t ancestor = 0;  // first-level survivor it descends from
  std::int64_t first_step = 0;
  double weight = 0.0;
  std::vector<double> first_gaps;
  std::vector<double> final_gaps;
};

/// Runs the carried ForcedJump estimator (carry_particles > 0) and returns
/// its population at n. `estimate`, when given, receives the survival
/// estimate of the same run.
std::vector<CarriedSurvivor> forced_jump_population(std::span<const double> x, const IncrementLaw& law,
                                                    std::int64_t n, const SurvivalMethod& method,
                                                    std::uint64_t samples, const RngStream& base,
                                                    McEstimate* estimate = nullptr);

struct TailCurve {
  std::vector<double> start;
  std::vector<std::int64_t> grid;
  std::vector<McEstimate> estimates;
  std::vector<TailMethod> methods;
  double fitted_slope = 0.0;
  double slope_stderr = 0.0;
  double intercept = 0.0;  // log scale; exp(intercept) estimates theta * U(x)
  double intercept_stderr = 0.0;
  std::size_t points_used = 0;
};

/// Per-point estimates plus a weighted log-log fit. Points with relative
/// error above max_rel_error are dropped from the fit.
TailCurve build_tail_curve(std::span<const double> x, const IncrementLaw& law,
                           std::span<const std::int64_t> grid, const SurvivalMethod& method,
                           std::uint64_t samples_per_point, const RngStream& base,
                           double max_rel_error = 0.25);

/// Refit of an existing curve, e.g. with a different drop threshold.
void fit_tail_curve(TailCurve& curve, double max_rel_error = 0.25);

struct InterceptComparison {
  /// exp(intercept_i) / U_i with the slope pinned to `pinned_slope`.
  std::vector<McEstimate> normalized;
  /// ratio[i][j] = normalized_i / normalized_j.
  std::vector<std::vector<McEstimate>> ratio;
  double pinned_slope = 0.0;
  bool consistent = true;  // every |log ratio| within 3 joint stderr
};

InterceptComparison compare_intercept(std::span<const TailCurve> curves,
                                      std::span<const McEstimate> u_estimates, double pinned_slope);

std::string tail_curve_csv(const TailCurve& curve);

}  // namespace ordwalk
