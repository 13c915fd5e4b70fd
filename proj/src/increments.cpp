#include "ordwalk/increments.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <sstream>

namespace ordwalk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void law_error(const std::string& op, const std::string& msg) {
  throw DomainError("increments", op, msg);
}

}  // namespace

IncrementLaw::IncrementLaw(const IncrementLawSpec& spec) : spec_(spec) {
  const double a = spec.alpha, p = spec.p, q = spec.q, c = spec.body_cut;
  if (!(a > 0.0) || !std::isfinite(a)) law_error("build_law", "alpha must be positive and finite");
  if (p < 0.0 || q < 0.0) law_error("build_law", "tail constants must be nonnegative");
  if (c < 0.0 || !std::isfinite(c)) law_error("build_law", "body_cut must be finite and >= 0");
  inv_alpha_ = 1.0 / a;
  if (c == 0.0) {
    if (p > 0.0 || q > 0.0) law_error("build_law", "body_cut = 0 is only allowed for the point mass (p = q = 0)");
    return;
  }
  w_plus_ = p * std::pow(c, -a);
  w_minus_ = q * std::pow(c, -a);
  w_body_ = 1.0 - w_plus_ - w_minus_;
  if (w_body_ < -1e-15) {
    std::ostringstream os;
    os << "tail mass (p+q)*body_cut^-alpha = " << (w_plus_ + w_minus_) << " exceeds 1; raise body_cut";
    law_error("build_law", os.str());
  }
  if (w_body_ < 0.0) w_body_ = 0.0;
  const double tail_mean = (w_plus_ - w_minus_) * a * c / (a - 1.0);
  if (tail_mean != 0.0 && !(a > 1.0)) law_error("build_law", "asymmetric tails need alpha > 1 for a finite mean");
  if (tail_mean == 0.0) {
    tilt_ = 0.0;
  } else if (w_body_ == 0.0) {
    law_error("build_law", "asymmetric tails leave no body mass to cancel the mean; raise body_cut");
  } else {
    // Body mean is w_body * tilt * c / 3.
    tilt_ = -3.0 * tail_mean / (w_body_ * c);
    if (std::abs(tilt_) > 1.0) {
      std::ostringstream os;
      os << "mean-zero tilt " << tilt_ << " makes the body density negative; raise body_cut";
      law_error("build_law", os.str());
    }
  }
}

IncrementLaw build_law(double alpha, double p, double q, double body_cut) {
  return IncrementLaw(IncrementLawSpec{alpha, p, q, body_cut});
}

double IncrementLaw::quantile(double u) const {
  const double c = spec_.body_cut;
  if (c == 0.0) return 0.0;
  if (u < w_minus_) return -std::exp(std::log(spec_.q / u) * inv_alpha_);
  const double upper = 1.0 - w_plus_;
  if (u > upper) return std::exp(std::log(spec_.p / (1.0 - u)) * inv_alpha_);
  // Body: solve B(z) = v with z = x/c, B(z) = ((z+1) + tilt (z^2-1)/2) / 2.
  double v = (u - w_minus_) / w_body_;
  if (!(w_body_ > 0.0)) v = 0.5;
  const double C = 2.0 * v - 1.0 + 0.5 * tilt_;
  const double z = 2.0 * C / (1.0 + std::sqrt(std::max(0.0, 1.0 + 2.0 * tilt_ * C)));
  return c * std::clamp(z, -1.0, 1.0);
}

double IncrementLaw::conditioned_quantile(double u, double threshold, TailSide side) const {
  if (threshold < spec_.body_cut || !(threshold > 0.0)) {
    throw DomainError("increments", "sample_tail_conditioned",
                      "threshold must be >= body_cut where the tail is an exact power law");
  }
  const double v = threshold * std::exp(-std::log(u) * inv_alpha_);
  return side == TailSide::Right ? v : -v;
}

double IncrementLaw::tail_probability(double threshold, TailSide side) const {
  if (threshold < spec_.body_cut) {
    throw DomainError("increments", "tail_probability", "threshold must be >= body_cut");
  }
  const double w = side == TailSide::Right ? spec_.p : spec_.q;
  return w * std::pow(threshold, -spec_.alpha);
}

ConditionedDraw IncrementLaw::sample_tail_conditioned(double threshold, TailSide side,
                                                      RngStream& rng) const {
  const double prob = tail_probability(threshold, side);
  if (!(prob > 0.0)) {
    throw DomainError("increments", "sample_tail_conditioned", "tail on the requested side has zero mass");
  }
  const double v = conditioned_quantile(rng.uniform(), threshold, side);
  return {v, -std::log(prob)};
}

double IncrementLaw::log_density(double x) const {
  const double c = spec_.body_cut;
  const double a = spec_.alpha;
  if (c == 0.0) return x == 0.0 ? kInf : -kInf;
  if (x > c) return spec_.p > 0.0 ? std::log(spec_.p * a) - (a + 1.0) * std::log(x) : -kInf;
  if (x < -c) return spec_.q > 0.0 ? std::log(spec_.q * a) - (a + 1.0) * std::log(-x) : -kInf;
  if (!(w_body_ > 0.0)) return -kInf;
  const double b = (1.0 + tilt_ * x / c) / (2.0 * c);
  return b > 0.0 ? std::log(w_body_ * b) : -kInf;
}

double IncrementLaw::density(double x) const {
  const double ld = log_density(x);
  return ld == -kInf ? 0.0 : std::exp(ld);
}

double IncrementLaw::cdf(double x) const {
  const double c = spec_.body_cut;
  const double a = spec_.alpha;
  if (c == 0.0) return x >= 0.0 ? 1.0 : 0.0;
  if (x < -c) return spec_.q * std::pow(-x, -a);
  if (x > c) return 1.0 - spec_.p * std::pow(x, -a);
  const double z = x / c;
  return w_minus_ + w_body_ * 0.5 * ((z + 1.0) + tilt_ * (z * z - 1.0) / 2.0);
}

double IncrementLaw::mean() const {
  const double c = spec_.body_cut;
  const double a = spec_.alpha;
  if (c == 0.0) return 0.0;
  const double body = w_body_ * tilt_ * c / 3.0;
  const double tails = (w_plus_ > 0.0 || w_minus_ > 0.0) ? (w_plus_ - w_minus_) * a * c / (a - 1.0) : 0.0;
  return body + tails;
}

double IncrementLaw::variance() const {
  const double c = spec_.body_cut;
  const double a = spec_.alpha;
  if (c == 0.0) return 0.0;
  double second = w_body_ * c * c / 3.0;
  if (w_plus_ + w_minus_ > 0.0) {
    if (!(a > 2.0)) return kInf;
    second += (w_plus_ + w_minus_) * a * c * c / (a - 2.0);
  }
  const double m = mean();
  return second - m * m;
}

std::uint64_t IncrementLaw::hash() const {
  std::uint64_t h = 0x5bd1e995ull;
  for (double v : {spec_.alpha, spec_.p, spec_.q, spec_.body_cut}) {
    h = splitmix64(h ^ std::bit_cast<std::uint64_t>(v));
  }
  return h;
}

HeavyTailProposal::HeavyTailProposal(const IncrementLaw& law, double eta, double beta)
    : law_(law), eta_(eta), beta_(beta) {
  if (!(eta >= 0.0 && eta < 1.0)) throw DomainError("increments", "HeavyTailProposal", "eta must be in [0,1)");
  if (!(beta > 0.0)) throw DomainError("increments", "HeavyTailProposal", "beta must be positive");
  if (law.degenerate()) throw DomainError("increments", "HeavyTailProposal", "law is degenerate");
}

double HeavyTailProposal::log_weight(double x) const {
  const double lf = law_.log_density(x);
  if (eta_ == 0.0) return 0.0;
  const double c = law_.body_cut();
  const double ax = std::abs(x);
  double h = 0.0;
  if (ax >= c) h = 0.5 * beta_ * std::pow(c, beta_) * std::pow(ax, -beta_ - 1.0);
  const double f = lf == -kInf ? 0.0 : std::exp(lf);
  const double g = (1.0 - eta_) * f + eta_ * h;
  return lf - std::log(g);
}

HeavyTailProposal::Draw HeavyTailProposal::draw(double u) const {
  double x;
  if (u < eta_) {
    // Symmetric Pareto(beta) beyond c.
    double v = u / eta_;
    const double c = law_.body_cut();
    if (v < 0.5) {
      x = -c * std::pow(2.0 * v, -1.0 / beta_);
    } else {
      x = c * std::pow(2.0 * (1.0 - v), -1.0 / beta_);
    }
  } else {
    x = law_.quantile((u - eta_) / (1.0 - eta_));
  }
  return {x, log_weight(x)};
}

}  // namespace ordwalk
