#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "ordwalk/chain.hpp"
#include "ordwalk/errors.hpp"
#include "ordwalk/harmonic.hpp"
#include "ordwalk/increments.hpp"

using namespace ordwalk;

namespace {

const IncrementLaw& desk_law() {
  static const IncrementLaw law = build_law(2.5, 0.5, 0.5, 1.0);
  return law;
}

// V-hat of two walks: a one-dimensional lattice, cheap to build.
const GapSurrogate& two_walk_v() {
  static const GapSurrogate v = GapSurrogate::build_harmonic(2, desk_law(), LatticeSpec{}, RngStream(1, 1));
  return v;
}

}  // namespace

TEST_SUITE("harmonic") {

TEST_CASE("one-dimensional quantile rule reproduces the moments") {
  std::vector<double> nodes, w;
  quantile_rule_1d(desk_law(), 40, 24, 15.0, nodes, w);
  double s0 = 0, s1 = 0, s2 = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    s0 += w[i];
    s1 += w[i] * nodes[i];
    s2 += w[i] * nodes[i] * nodes[i];
  }
  CHECK(s0 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(s1) < 1e-6);
  CHECK(s2 == doctest::Approx(5.0).epsilon(0.01));
}

TEST_CASE("two-walk V-hat: V(0+) equals the mean strict ladder height sigma") {
  // Z = X2 - X1 is symmetric with Var Z = 2 sigma^2, so the mean strict
  // ascending ladder height is sqrt(Var Z / 2) = sigma (Spitzer).
  const double sigma = std::sqrt(desk_law().variance());
  const std::vector<double> y{0.0, 1e-9};
  CHECK(two_walk_v()(y) == doctest::Approx(sigma).epsilon(0.03));
}

TEST_CASE("two-walk V-hat grows like the gap") {
  const std::vector<double> far{0.0, 1e4};
  CHECK(two_walk_v()(far) / 1e4 == doctest::Approx(1.0).epsilon(0.01));
  // monotone in the gap
  double prev = 0.0;
  for (double g : {0.1, 0.5, 1.0, 3.0, 10.0, 100.0}) {
    const std::vector<double> y{0.0, g};
    const double v = two_walk_v()(y);
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("two-walk V-hat is harmonic for the killed walk") {
  for (double g : {0.3, 2.0, 15.0}) {
    const std::vector<double> y{0.0, g};
    const McEstimate h = harmonic_ratio(y, desk_law(), two_walk_v(), 400000, RngStream(3, static_cast<std::uint64_t>(g * 10)));
    CHECK(std::abs(h.value - 1.0) <= std::max(0.02, 3.0 * h.std_error));
  }
}

TEST_CASE("V-hat agrees with the Monte Carlo definition") {
  // V(y) = lim E[Delta(y + S(n)); tau > n]. The truncation error decays
  // slowly (the ladder height has tail index alpha - 1), so the limit is
  // taken by Aitken extrapolation over horizons growing by 16 on common paths.
  const std::vector<double> y{0.0, 2.0};
  auto at = [&](std::int64_t h) {
    VEstimateOptions o;
    o.samples = 100000;
    o.first_horizon = h / 2;
    o.max_horizon = h;
    o.rel_tol = 10.0;  // accept the value at h
    return estimate_V(y, desk_law(), o, RngStream(9, 9)).value;
  };
  const double x1 = at(256), x2 = at(4096), x3 = at(65536);
  const double d1 = x2 - x1, d2 = x3 - x2;
  REQUIRE(d1 > d2);
  REQUIRE(d2 > 0.0);
  const double limit = x3 + d2 * d2 / (d1 - d2);
  CHECK(limit == doctest::Approx(two_walk_v()(y)).epsilon(0.02));
}

TEST_CASE("surrogate cache round trip") {
  std::stringstream buf;
  two_walk_v().save(buf);
  const GapSurrogate back = GapSurrogate::load(buf, two_walk_v().key());
  CHECK(back.node_values() == two_walk_v().node_values());
  std::stringstream again;
  two_walk_v().save(again);
  CHECK_THROWS(GapSurrogate::load(again, two_walk_v().key() + 1));
}

TEST_CASE("one-step means of a constant and of a linear function") {
  const std::vector<double> y{0.0, 1.0, 2.0};
  const std::vector<std::function<double(std::span<const double>)>> fns{
      [](std::span<const double>) { return 1.0; }, [](std::span<const double> z) { return z[2] - z[0]; }};
  const auto m = one_step_means(y, desk_law(), fns, 1, 200000, RngStream(4, 4));
  REQUIRE(m.size() == 3);
  CHECK(std::abs(m[0].value - 1.0) <= 4.0 * m[0].std_error + 1e-12);
  CHECK(std::abs(m[1].value - 2.0) <= 4.0 * m[1].std_error);
}

TEST_CASE("VFunction mixes v1 and v2 with p and q") {
  const auto v_hat = std::make_shared<const GapSurrogate>(GapSurrogate::build_harmonic(2, desk_law(), LatticeSpec{},
                                                                                      RngStream(1, 1)));
  const VFunction v(desk_law(), 3, v_hat);
  const std::vector<double> x{0.0, 1.0, 4.0};
  CHECK(v(x) == doctest::Approx(0.5 * v.v1(x) + 0.5 * v.v2(x)));
  CHECK(v.v1(x) == doctest::Approx((*v_hat)(std::vector<double>{0.0, 1.0})));
  CHECK(v.v2(x) == doctest::Approx((*v_hat)(std::vector<double>{1.0, 4.0})));
}

}
