#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ordwalk/core.hpp"
#include "ordwalk/increments.hpp"
#include "ordwalk/rng.hpp"
#include "ordwalk/stats.hpp"

namespace ordwalk {

enum class SubWalkSelector { Full, Lower, Upper };

/// Stream of the i-th path drawn under `base`. Every path owns its stream, so
/// a path's increments do not depend on which worker simulated it.
inline RngStream path_stream(const RngStream& base, std::uint64_t i) {
  return RngStream(base.seed(), derive_stream(base.stream_id(), i));
}

/// Adds one independent increment to every coordinate.
void step(std::span<double> state, const IncrementLaw& law, RngStream& rng);

struct ExitResult {
  std::optional<std::int64_t> tau;  // empty: survived the horizon
  std::vector<double> final_state;  // full k-vector at min(tau, horizon)
};

/// First m >= 1 at which the selected coordinates of x + S(m) are not
/// strictly increasing, capped at `horizon`. All k increments are drawn at
/// every step, so the three selectors see the same randomness.
ExitResult exit_time(std::span<const double> x, const IncrementLaw& law, std::int64_t horizon,
                     SubWalkSelector selector, RngStream& rng);

struct ExitTimes {
  std::int64_t full;
  std::int64_t lower;
  std::int64_t upper;
};

/// Exit times of the full walk and both sub-walks on one path; a value of
/// horizon + 1 means "survived".
ExitTimes exit_times_all(std::span<const double> x, const IncrementLaw& law, std::int64_t horizon,
                         RngStream& rng);

/// A big increment forced onto one coordinate at one step: the uniform that
/// would have produced X_coord(step) is sent through the tail-conditioned
/// quantile instead.
struct ForcedSlot {
  std::int64_t step = 0;  // 1-based
  int coord = 0;
  double threshold = 0.0;
  TailSide side = TailSide::Right;
};

/// Hot loop of the estimators. Tracks gaps only, so translating the start
/// changes nothing. Returns the full-walk exit time (horizon + 1 when the
/// path survives). Keeps drawing until step `record_steps` even after exit
/// and stores X_1(j), X_k(j) for j <= record_steps into the given buffers.
/// `gaps_out`, when given, receives the gaps at min(tau, horizon).
std::int64_t simulate_exit(std::span<const double> gaps0, const IncrementLaw& law,
                           std::int64_t horizon, RngStream& rng, const ForcedSlot* forced = nullptr,
                           std::int64_t record_steps = 0, double* x_bottom = nullptr,
                           double* x_top = nullptr, double* max_abs_increment = nullptr,
                           double* gaps_out = nullptr);

/// Monte Carlo estimate of P(tau > n) for the selected (sub)walk.
McEstimate survival_mc(std::span<const double> x, const IncrementLaw& law, std::int64_t n,
                       std::uint64_t samples, SubWalkSelector selector, const RngStream& base);

/// Survival estimates on an increasing grid from one set of paths: each
/// path's exit time is computed once and compared against every horizon.
std::vector<McEstimate> survival_curve_mc(std::span<const double> x, const IncrementLaw& law,
                                          std::span<const std::int64_t> grid, std::uint64_t samples,
                                          const RngStream& base);

struct PathRecord {
  std::vector<double> start;
  int k = 0;
  std::vector<double> steps;  // horizon x k increments, row-major
  std::optional<std::int64_t> exit_time;
  std::int64_t horizon = 0;

  std::vector<double> position(std::int64_t m) const;
};

PathRecord record_path(std::span<const double> x, const IncrementLaw& law, std::int64_t horizon,
                       RngStream& rng);

}  // namespace ordwalk
