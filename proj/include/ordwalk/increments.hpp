#pragma once

#include <cstdint>

#include "ordwalk/core.hpp"
#include "ordwalk/rng.hpp"

namespace ordwalk {

enum class TailSide { Right, Left };

struct ConditionedDraw {
  double value;
  /// log(conditional density / unconditional density) = -log P(X beyond threshold).
  double log_likelihood_ratio;
};

/// Mean-zero law with exact power tails beyond `body_cut`:
///   P(X > x) = p x^-alpha,  P(X < -x) = q x^-alpha  for x >= body_cut,
/// and a linearly tilted uniform body on [-body_cut, body_cut] whose tilt
/// cancels the tail means. Sampling is by inverse CDF, one uniform per draw.
class IncrementLaw {
 public:
  IncrementLaw() : IncrementLaw(IncrementLawSpec{}) {}
  explicit IncrementLaw(const IncrementLawSpec& spec);

  const IncrementLawSpec& spec() const { return spec_; }
  double alpha() const { return spec_.alpha; }
  double body_cut() const { return spec_.body_cut; }
  double weight_right() const { return w_plus_; }
  double weight_left() const { return w_minus_; }
  double weight_body() const { return w_body_; }
  /// Slope of the body density: b(x) = (1 + tilt * x / c) / (2c) on [-c, c].
  double tilt() const { return tilt_; }
  bool degenerate() const { return spec_.body_cut == 0.0; }
  bool has_heavy_tails() const { return w_plus_ + w_minus_ > 0.0; }

  /// Inverse CDF at u in (0,1).
  double quantile(double u) const;
  double sample(RngStream& rng) const { return quantile(rng.uniform()); }

  /// Draw from X | X > threshold (Right) or X | X < -threshold (Left), reusing
  /// the single uniform `u`. Requires threshold >= body_cut.
  double conditioned_quantile(double u, double threshold, TailSide side) const;
  ConditionedDraw sample_tail_conditioned(double threshold, TailSide side, RngStream& rng) const;

  /// P(X > t) for t >= body_cut (Right), P(X < -t) (Left).
  double tail_probability(double threshold, TailSide side) const;

  double log_density(double x) const;
  double density(double x) const;
  double cdf(double x) const;
  /// Closed-form mean of the mixture (zero up to rounding).
  double mean() const;
  /// Closed-form variance; infinite when alpha <= 2.
  double variance() const;

  std::uint64_t hash() const;

 private:
  IncrementLawSpec spec_;
  double w_plus_ = 0.0;
  double w_minus_ = 0.0;
  double w_body_ = 1.0;
  double tilt_ = 0.0;
  double inv_alpha_ = 0.0;
};

/// Builds the law; throws DomainError when the tail masses exceed one or the
/// mean-zero tilt would make the body density negative.
IncrementLaw build_law(double alpha, double p, double q, double body_cut = 1.0);

/// Defensive importance proposal for a single increment: with probability
/// eta a symmetric Pareto(beta) tail beyond body_cut (beta < alpha, heavier
/// than the target), otherwise the target law. Used to give one-step and
/// short-horizon expectations of polynomially growing functions finite
/// variance.
class HeavyTailProposal {
 public:
  HeavyTailProposal(const IncrementLaw& law, double eta, double beta);

  double eta() const { return eta_; }
  double beta() const { return beta_; }

  struct Draw {
    double value;
    double log_weight;  // log target density - log proposal density
  };
  Draw draw(double u) const;
  Draw sample(RngStream& rng) const { return draw(rng.uniform()); }
  double log_weight(double x) const;

 private:
  IncrementLaw law_;
  double eta_;
  double beta_;
};

}  // namespace ordwalk
