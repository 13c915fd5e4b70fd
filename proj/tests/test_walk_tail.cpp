#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "ordwalk/experiments.hpp"
#include "ordwalk/increments.hpp"
#include "ordwalk/tail.hpp"
#include "ordwalk/walk.hpp"

using namespace ordwalk;

namespace {

const IncrementLaw& desk_law() {
  static const IncrementLaw law = build_law(2.5, 0.5, 0.5, 1.0);
  return law;
}

const std::vector<double> kDeskStart{0, 1, 2, 3};

}  // namespace

TEST_SUITE("walk-tail") {

TEST_CASE("one-step survival of two walks matches a quadrature of the law") {
  const IncrementLaw& law = desk_law();
  const double g = 1.5;
  // P(g + X2 - X1 > 0) = 1 - E[F(X1 - g)], midpoint rule in the quantile of X1
  const int m = 2000000;
  double acc = 0.0;
  for (int i = 0; i < m; ++i) acc += law.cdf(law.quantile((i + 0.5) / m) - g);
  const double exact = 1.0 - acc / m;
  const std::vector<double> x{0.0, g};
  const McEstimate e = survival_mc(x, law, 1, 400000, SubWalkSelector::Full, RngStream(1, 9));
  CHECK(std::abs(e.value - exact) <= 4.0 * e.std_error);
}

TEST_CASE("survival is exactly translation invariant under shared streams") {
  std::vector<double> t(kDeskStart);
  for (auto& v : t) v += 17.5;
  const RngStream base(4, 4);
  const McEstimate a = survival_mc(kDeskStart, desk_law(), 32, 20000, SubWalkSelector::Full, base);
  const McEstimate b = survival_mc(t, desk_law(), 32, 20000, SubWalkSelector::Full, base);
  CHECK(a.value == b.value);
}

TEST_CASE("survival curve is nonincreasing") {
  const std::vector<std::int64_t> grid{1, 2, 4, 8, 16};
  const auto c = survival_curve_mc(kDeskStart, desk_law(), grid, 50000, RngStream(2, 2));
  for (std::size_t i = 1; i < c.size(); ++i) CHECK(c[i].value <= c[i - 1].value);
}

TEST_CASE("ForcedJump agrees with Direct and collapses to it at defensive_mix = 1") {
  SurvivalMethod fj;
  fj.method = TailMethod::ForcedJump;
  fj.forced = ForcedJumpPolicy::defaults(desk_law());
  SurvivalMethod direct;
  direct.method = TailMethod::Direct;
  const McEstimate a = estimate_survival(kDeskStart, desk_law(), 16, fj, 300000, RngStream(8, 1));
  const McEstimate b = estimate_survival(kDeskStart, desk_law(), 16, direct, 300000, RngStream(8, 2));
  CHECK(std::abs(a.value - b.value) <= 3.0 * std::hypot(a.std_error, b.std_error));
  fj.forced.defensive_mix = 1.0;
  const McEstimate c = estimate_survival(kDeskStart, desk_law(), 16, fj, 300000, RngStream(8, 3));
  const McEstimate d = estimate_survival(kDeskStart, desk_law(), 16, direct, 300000, RngStream(8, 3));
  CHECK(c.value == d.value);
  CHECK(c.std_error == d.std_error);
}

TEST_CASE("carried estimator agrees with Direct") {
  SurvivalMethod fj;
  fj.method = TailMethod::ForcedJump;
  fj.forced = ForcedJumpPolicy::defaults(desk_law());
  fj.forced.carry_particles = 100000;
  SurvivalMethod direct;
  direct.method = TailMethod::Direct;
  const McEstimate a = estimate_survival(kDeskStart, desk_law(), 32, fj, 1000000, RngStream(6, 1));
  const McEstimate b = estimate_survival(kDeskStart, desk_law(), 32, direct, 2000000, RngStream(6, 2));
  CHECK(std::abs(a.value - b.value) <= 3.0 * std::hypot(a.std_error, b.std_error));
}

TEST_CASE("carried population reproduces the conditioned law of direct survivors") {
  const std::int64_t n = 16, r = 4;
  const double scale = std::sqrt(desk_law().variance() * n);
  ForcedJumpPolicy plain = ForcedJumpPolicy::defaults(desk_law());
  plain.defensive_mix = 1.0;
  const RngStream dbase(12, 1);
  const auto draws = forced_jump_survivors(kDeskStart, desk_law(), n, plain, 1000000, dbase);
  REQUIRE(draws.size() > 200);
  std::vector<double> direct;
  for (const auto& d : draws) {
    const auto path = replay_forced_path(kDeskStart, desk_law(), n, plain, dbase, d.index, n);
    for (const auto& p : path) REQUIRE(in_chamber(p));
    const auto& a = path[r];
    direct.push_back(std::max(a[3] - a[2], a[1] - a[0]) / scale);
  }
  SurvivalMethod m;
  m.method = TailMethod::ForcedJump;
  m.forced = ForcedJumpPolicy::defaults(desk_law());
  m.forced.l_force = 4;
  m.forced.first_level = r;
  m.forced.carry_particles = 200000;
  const auto pop = forced_jump_population(kDeskStart, desk_law(), n, m, 400000, RngStream(12, 2));
  REQUIRE_FALSE(pop.empty());
  CHECK(pop.front().first_step == r);
  std::vector<double> sizes, w;
  for (const auto& c : pop) {
    sizes.push_back(std::max(c.first_gaps.front(), c.first_gaps.back()) / scale);
    w.push_back(c.weight);
  }
  // 99.9% two-sample KS bound with the direct count as the smaller sample
  const double bound = 1.95 * std::sqrt(2.0 / static_cast<double>(direct.size()));
  CHECK(ks_weighted_two_sample(sizes, w, direct) < bound);
}

TEST_CASE("tail curve slope on a synthetic power law") {
  TailCurve c;
  for (std::int64_t n : {32, 64, 128, 256}) {
    c.grid.push_back(n);
    McEstimate e;
    e.value = 3.0 * std::pow(static_cast<double>(n), -2.75);
    e.std_error = 0.01 * e.value;
    c.estimates.push_back(e);
  }
  fit_tail_curve(c);
  CHECK(c.fitted_slope == doctest::Approx(-2.75));
  CHECK(std::exp(c.intercept) == doctest::Approx(3.0));
}

}
