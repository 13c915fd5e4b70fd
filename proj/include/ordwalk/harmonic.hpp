#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <memory>
#include <span>
#include <vector>

#include "ordwalk/core.hpp"
#include "ordwalk/increments.hpp"
#include "ordwalk/rng.hpp"
#include "ordwalk/stats.hpp"

namespace ordwalk {

struct HarmonicEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t n_used = 0;  // horizon at which stabilization was declared
  std::uint64_t samples = 0;
};

struct VEstimateOptions {
  std::uint64_t samples = 20000;
  std::int64_t first_horizon = 16;
  std::int64_t max_horizon = 1 << 14;
  double rel_tol = 0.01;
};

/// Monte Carlo value of V(y) = lim_n E[Delta(y + S(n)); tau_y > n] for the
/// walk on y.size() coordinates. The horizon-n expectation is evaluated as
/// Delta(y) - E[Delta(y + S(tau)); tau <= n] (optional stopping of the free
/// martingale Delta(y + S(n))), on doubling horizons until successive values
/// differ by less than max(3 stderr of the difference, rel_tol * value).
/// Throws NonStabilized at the horizon cap.
HarmonicEstimate estimate_V(std::span<const double> y, const IncrementLaw& law,
                            const VEstimateOptions& opts, const RngStream& base);

/// estimate_V on coordinates 1..k-1 (v1) or 2..k (v2).
HarmonicEstimate v1(std::span<const double> x, const IncrementLaw& law, const VEstimateOptions& opts,
                    const RngStream& base);
HarmonicEstimate v2(std::span<const double> x, const IncrementLaw& law, const VEstimateOptions& opts,
                    const RngStream& base);

/// Weighted increment vectors approximating one step of `walkers` independent
/// copies of X. Built either by tensor quadrature in the quantile variable or
/// by Monte Carlo with a defensive heavy-tail proposal.
struct StepRule {
  int walkers = 0;
  std::vector<double> increments;  // points x walkers
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
  const double* point(std::size_t r) const { return increments.data() + r * walkers; }
};

/// One-dimensional rule for E[F(X)]: Gauss-Legendre on each piece of the
/// quantile function, tail pieces mapped u = w t^gamma so that polynomially
/// growing F are integrated without a singularity.
void quantile_rule_1d(const IncrementLaw& law, int tail_points, int body_points, double gamma,
                      std::vector<double>& nodes, std::vector<double>& weights);

StepRule tensor_step_rule(const IncrementLaw& law, int walkers, int tail_points, int body_points,
                          double gamma);
StepRule mc_step_rule(const IncrementLaw& law, int walkers, std::uint64_t samples, double eta,
                      const RngStream& base);

struct LatticeSpec {
  int nodes = 32;            // cells per compactified gap axis
  int order = 3;             // 1 multilinear, 3 tensor cubic Lagrange
  double sigma = 0.0;        // gap scale of the compactification; 0 = sqrt(Var X)
  int tail_points = 40;
  int body_points = 24;
  double gamma = 15.0;
  int quadrature_walkers = 3;         // nested quadrature up to this many walkers
  std::uint64_t mc_samples = 200000;  // Monte Carlo rule beyond
  double eta = 0.2;

  std::uint64_t hash() const;
  /// Coarser multilinear lattice used for the Green function of k walkers.
  static LatticeSpec green_defaults();
};

class VFunction;

enum class SurrogateKind { Harmonic = 0, Green = 1 };

/// Lattice surrogate F-hat(y) = R(s(gaps)) * Delta_1(y) of a function of the
/// gaps of `walkers` ordered walks. R is interpolated on the lattice
/// s_i = (1 + g_i / sigma)^(-1/2) in [0, 1] (s = 0 is an infinite gap) and
/// the node values solve a discretized one-step equation:
///  - Harmonic: F = V, E[V(y+S(1)); no exit] = V(y). Faces with infinite
///    gaps carry the limit equation of the separated clusters and the
///    all-infinite corner is R = 1, which fixes V-hat ~ Delta far out.
///  - Green: F = U = v + E[U(y+S(1)); no exit] for the source v of a
///    VFunction. U / Delta_1 vanishes on every infinite-gap face.
class GapSurrogate {
 public:
  GapSurrogate() = default;

  static GapSurrogate build_harmonic(int walkers, const IncrementLaw& law, const LatticeSpec& spec,
                                     const RngStream& base);
  static GapSurrogate build_green(const VFunction& v, const IncrementLaw& law, const LatticeSpec& spec,
                                  const RngStream& base);

  SurrogateKind kind() const { return kind_; }
  int walkers() const { return walkers_; }
  int dims() const { return walkers_ - 1; }
  int nodes() const { return n_; }
  double sigma() const { return sigma_; }
  std::uint64_t key() const { return key_; }
  const std::vector<double>& node_values() const { return r_; }

  /// F-hat at ordered positions y (0 if y is not strictly increasing).
  double operator()(std::span<const double> y) const;
  double from_gaps(std::span<const double> gaps) const;
  /// R = F-hat / Delta_1 at the given gaps (infinite gaps allowed).
  double ratio(std::span<const double> gaps) const;

  /// Versioned binary cache keyed by (kind, law hash, walkers, lattice spec,
  /// source surrogate).
  void save(std::ostream& out) const;
  static GapSurrogate load(std::istream& in, std::uint64_t expected_key);
  static std::uint64_t make_key(SurrogateKind kind, int walkers, const IncrementLaw& law, const LatticeSpec& spec,
                                std::uint64_t source_key);

 private:
  static GapSurrogate prepare(SurrogateKind kind, int walkers, const IncrementLaw& law, const LatticeSpec& spec);
  void solve(const IncrementLaw& law, const LatticeSpec& spec, const RngStream& base,
             const std::function<double(const double*)>* source);
  double interp(const double* s) const;

  SurrogateKind kind_ = SurrogateKind::Harmonic;
  int walkers_ = 0;
  int n_ = 0;
  int order_ = 1;
  double sigma_ = 1.0;
  std::uint64_t key_ = 0;
  std::vector<double> r_;
};

/// v(x) = p V(x_1..x_{k-1}) + q V(x_2..x_k) on the full k-walk, with V-hat
/// from a (k-1)-walker surrogate (V = 1 when k - 1 == 1).
class VFunction {
 public:
  VFunction() = default;
  VFunction(const IncrementLaw& law, int k, std::shared_ptr<const GapSurrogate> surrogate);
  /// Explicit mixing weights in place of the tail constants p, q.
  VFunction(int k, std::shared_ptr<const GapSurrogate> surrogate, double p_weight, double q_weight);

  int k() const { return k_; }
  double p() const { return p_; }
  double q() const { return q_; }
  const GapSurrogate* surrogate() const { return sur_.get(); }

  /// V-hat on k-1 ordered positions (0 if not ordered).
  double V(std::span<const double> y) const;
  double v1(std::span<const double> x) const { return V(x.first(k_ - 1)); }
  double v2(std::span<const double> x) const { return V(x.subspan(1, k_ - 1)); }
  double operator()(std::span<const double> x) const { return p_ * v1(x) + q_ * v2(x); }

 private:
  int k_ = 0;
  double p_ = 0.0;
  double q_ = 0.0;
  std::shared_ptr<const GapSurrogate> sur_;
};

struct USeriesOptions {
  int truncation = 64;
  std::uint64_t samples = 100000;
  double max_tail_fraction = 0.2;
  /// 1: series of E[U(x+S(1)); tau_x > 1], term j = E[v(x+S(j+1)); tau_x > j+1].
  int shift = 0;
  /// Report instead of throwing TailDominates (flag set in the result).
  bool allow_tail_dominance = false;
};

struct USeriesEstimate {
  std::vector<McEstimate> terms;  // l = 0..L
  int truncation = 0;
  double partial_sum = 0.0;
  double partial_stderr = 0.0;
  double tail_bound = 0.0;  // extrapolated mass beyond L
  double tail_stderr = 0.0;
  double beta = 0.0;        // fitted decay exponent of the terms
  double beta_stderr = 0.0;
  double total = 0.0;
  double total_stderr = 0.0;
  bool tail_dominates = false;
};

/// Green series U(x) = sum_l E[v(x+S(l)); tau_x > l] from direct paths,
/// terms 0..L, tail c l^-beta fitted on the last L/2 terms and summed.
USeriesEstimate estimate_U(std::span<const double> x, const IncrementLaw& law, const VFunction& v,
                           const USeriesOptions& opts, const RngStream& base);

/// Power-law tail extrapolation of terms[L/2..L] (fills tail, beta and total).
void extrapolate_series_tail(USeriesEstimate& est, double max_tail_fraction, bool allow_tail_dominance);

struct MixtureWeights {
  McEstimate p_of_x;
  McEstimate q_of_x;
  USeriesEstimate u;   // denominator
  USeriesEstimate u1;  // p * sum E[v1]
  USeriesEstimate u2;  // q * sum E[v2]
};

/// p(x) = p sum_l E[v1(x+S(l)); tau > l] / U(x) and the analogous q(x), from
/// one set of paths; delta-method errors use the per-path covariance.
MixtureWeights mixture_weights(std::span<const double> x, const IncrementLaw& law, const VFunction& v,
                               const USeriesOptions& opts, const RngStream& base);

struct TelescopeCheck {
  USeriesEstimate u;        // U(x)
  USeriesEstimate u_next;   // E[U(x+S(1)); tau_x > 1], independent stream
  McEstimate difference;    // U(x) - E[U(x+S(1)); tau_x > 1]
  double v_x = 0.0;
  bool consistent = false;  // |difference - v(x)| <= 3 stderr
};

TelescopeCheck u_telescope(std::span<const double> x, const IncrementLaw& law, const VFunction& v,
                           const USeriesOptions& opts, const RngStream& base);

/// One-step means E[h_j(y + X)] with X independent increments, one per
/// coordinate. Increments come from a defensive heavy-tail proposal chosen so
/// that functions growing like |X|^degree in a single coordinate have finite
/// variance. One entry per function plus a last entry for the sum of all of
/// them (joint error bar).
std::vector<McEstimate> one_step_means(std::span<const double> y, const IncrementLaw& law,
                                       const std::vector<std::function<double(std::span<const double>)>>& fns,
                                       int degree, std::uint64_t samples, const RngStream& base, double eta = 0.2);

/// E[V-hat(y + S(1)); no exit] / V-hat(y) for the walk on y.size() walkers.
McEstimate harmonic_ratio(std::span<const double> y, const IncrementLaw& law, const GapSurrogate& v_hat,
                          std::uint64_t samples, const RngStream& base);

/// s-coordinate of a gap (0 for an infinite gap).
inline double gap_to_s(double g, double sigma) {
  return g == std::numeric_limits<double>::infinity() ? 0.0 : 1.0 / std::sqrt(1.0 + g / sigma);
}

}  // namespace ordwalk
