#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ordwalk/core.hpp"
#include "ordwalk/harmonic.hpp"
#include "ordwalk/increments.hpp"
#include "ordwalk/rng.hpp"
#include "ordwalk/stats.hpp"

namespace ordwalk {

/// Surrogates the conditioned chain is built on, frozen once built.
struct HarmonicContext {
  IncrementLaw law;
  int k = 0;
  std::shared_ptr<const GapSurrogate> v_hat;  // k-1 walkers (null for k = 2)
  std::shared_ptr<const GapSurrogate> u_hat;  // Green function of the k-walk
  VFunction v;

  double U(std::span<const double> x) const { return (*u_hat)(x); }

  /// Builds V-hat and U-hat, reusing cache files in `cache_dir` when their
  /// keys match (empty: no cache).
  static HarmonicContext build(const IncrementLaw& law, int k, const LatticeSpec& v_spec,
                               const LatticeSpec& u_spec, const RngStream& base,
                               const std::string& cache_dir = "");
  /// V-hat alone (null for k = 2), same cache rule.
  static std::shared_ptr<const GapSurrogate> build_v_hat(const IncrementLaw& law, int k, const LatticeSpec& v_spec,
                                                         const RngStream& base, const std::string& cache_dir = "");
};

enum class Branch { StayW, FreezeTop, FreezeBottom, FrozenTopMove, FrozenBottomMove };

const char* branch_name(Branch b);

struct KernelStep {
  CompactPoint from;
  CompactPoint to;
  Branch branch = Branch::StayW;
  double branch_prob_estimate = 0.0;
};

enum class UEstimator {
  /// U(x) from the Green series; the stay numerator is the same series
  /// shifted by one step on the same paths.
  Series,
  /// U-hat from the lattice surrogate, stay numerator by one-step MC.
  Surrogate,
};

struct BranchOptions {
  UEstimator u = UEstimator::Series;
  USeriesOptions series{};
  std::uint64_t one_step_samples = 1000000;
};

struct BranchProbs {
  McEstimate stay;
  McEstimate freeze_top;
  McEstimate freeze_bottom;
  McEstimate mass;  // stay + freeze_top + freeze_bottom
  McEstimate u;     // denominator
  double v_x = 0.0;
};

/// stay = E[U(x+S(1)); tau_x > 1] / U(x), freeze_top = p E[v1(x+S(1)); first
/// k-1 ordered] / U(x), freeze_bottom likewise with q, v2. The freeze
/// numerators are one-step Monte Carlo, so the mass checks harmonicity of
/// V-hat as well as the decomposition.
BranchProbs kernel_branch_probs(std::span<const double> x, const HarmonicContext& ctx,
                                const BranchOptions& opts, const RngStream& base);

/// One step of the chain on the compactified chamber. Branch probabilities
/// from W are p v1(x)/U(x), q v2(x)/U(x) and the rest; destinations are drawn
/// by self-normalized resampling among `batch` candidate moves.
KernelStep sample_step(const CompactPoint& s, const HarmonicContext& ctx, int batch, RngStream& rng);

struct Trajectory {
  std::vector<KernelStep> steps;
  std::optional<std::int64_t> freeze_step;  // index into steps
};

Trajectory run_chain(const CompactPoint& s0, std::int64_t steps, const HarmonicContext& ctx, int batch,
                     RngStream& rng);

/// step,branch,x1..xk with the frozen coordinate written as +INF / -INF.
std::string trajectory_csv(const Trajectory& t);

struct LifetimeSample {
  std::int64_t lifetime = 0;  // steps survived
  bool capped = false;        // still alive at the cap
};

/// W-only chain killed with probability v(y)/U(y) at each step.
std::vector<LifetimeSample> killed_chain_lifetime(std::span<const double> x, const HarmonicContext& ctx,
                                                  std::uint64_t samples, std::int64_t cap, int batch,
                                                  const RngStream& base);

/// Number of W steps before the freeze of the full chain (capped).
std::vector<LifetimeSample> time_to_freeze(std::span<const double> x, const HarmonicContext& ctx,
                                           std::uint64_t samples, std::int64_t cap, int batch,
                                           const RngStream& base);

}  // namespace ordwalk
