#include <doctest.h>

#include <cmath>
#include <vector>

#include "ordwalk/errors.hpp"
#include "ordwalk/increments.hpp"
#include "ordwalk/stats.hpp"

using namespace ordwalk;

TEST_SUITE("increments") {

TEST_CASE("exact power tails beyond body_cut") {
  const IncrementLaw law = build_law(2.5, 0.5, 0.5, 1.0);
  for (double t : {1.0, 2.0, 10.0, 1e3}) {
    CHECK(law.tail_probability(t, TailSide::Right) == doctest::Approx(0.5 * std::pow(t, -2.5)));
    CHECK(1.0 - law.cdf(t) == doctest::Approx(0.5 * std::pow(t, -2.5)));
  }
  const IncrementLaw skew = build_law(2.5, 0.2, 0.1, 1.0);
  CHECK(skew.cdf(-4.0) == doctest::Approx(0.1 * std::pow(4.0, -2.5)));
}

TEST_CASE("closed-form moments") {
  // symmetric Pareto pieces: E X^2 = (p+q) alpha / (alpha - 2)
  CHECK(build_law(2.5, 0.5, 0.5, 1.0).variance() == doctest::Approx(5.0));
  CHECK(build_law(2.5, 0.0, 0.0, 1.0).variance() == doctest::Approx(1.0 / 3.0));
  CHECK(std::abs(build_law(2.5, 0.2, 0.1, 1.0).mean()) < 1e-14);
}

TEST_CASE("sampled mean within a CLT bound") {
  const IncrementLaw law = build_law(2.5, 0.5, 0.5, 1.0);
  RngStream rng(7, 1);
  MomentSums m;
  for (int i = 0; i < 1000000; ++i) m.add(law.sample(rng));
  const double sd = std::sqrt(m.s2 / m.n - m.mean() * m.mean());
  CHECK(std::abs(m.mean()) <= 4.0 * sd / std::sqrt(m.n));
}

TEST_CASE("quantile inverts cdf") {
  const IncrementLaw law = build_law(2.5, 0.2, 0.1, 1.0);
  for (double u : {1e-6, 0.01, 0.3, 0.5, 0.77, 0.999, 1 - 1e-7}) CHECK(law.cdf(law.quantile(u)) == doctest::Approx(u));
}

TEST_CASE("tail-conditioned draws stay beyond the threshold") {
  const IncrementLaw law = build_law(2.5, 0.5, 0.5, 1.0);
  RngStream rng(3, 2);
  for (int i = 0; i < 1000; ++i) {
    CHECK(law.sample_tail_conditioned(4.0, TailSide::Right, rng).value >= 4.0);
    CHECK(law.sample_tail_conditioned(4.0, TailSide::Left, rng).value <= -4.0);
  }
}

TEST_CASE("defensive proposal weights average to one") {
  const IncrementLaw law = build_law(2.5, 0.5, 0.5, 1.0);
  const HeavyTailProposal prop(law, 0.2, 1.5);
  RngStream rng(5, 5);
  MomentSums w;
  for (int i = 0; i < 400000; ++i) w.add(std::exp(prop.sample(rng).log_weight));
  CHECK(std::abs(w.mean() - 1.0) <= 4.0 * w.std_error());
}

TEST_CASE("invalid laws are rejected") {
  CHECK_THROWS_AS(build_law(2.5, 2.0, 0.5, 1.0), DomainError);
  CHECK_THROWS_AS(build_law(-1.0, 0.5, 0.5, 1.0), DomainError);
  CHECK_THROWS_AS(build_law(2.5, 0.5, 0.5, 0.0), DomainError);
}

}
