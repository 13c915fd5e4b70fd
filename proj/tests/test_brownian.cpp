#include <doctest.h>

#include <cmath>
#include <vector>

#include "ordwalk/brownian.hpp"
#include "ordwalk/errors.hpp"
#include "ordwalk/stats.hpp"

using namespace ordwalk;

TEST_SUITE("brownian") {

TEST_CASE("one-dimensional Dyson process is a standard Brownian motion") {
  MomentSums v;
  for (std::uint64_t i = 0; i < 10000; ++i) {
    RngStream r(1, i);
    const DysonPath p = simulate_dyson(1, 1.0, 1.0 / 256, {}, r);
    const double x = p.values.back();
    v.add(x * x);
  }
  CHECK(std::abs(v.mean() - 1.0) <= 3.0 * v.std_error());
}

TEST_CASE("three-dimensional Dyson paths stay ordered and scale diffusively") {
  int bad = 0;
  MomentSums s1, sq;
  for (std::uint64_t i = 0; i < 3000; ++i) {
    RngStream r(2, i);
    const DysonPath p = simulate_dyson(3, 1.0, 1.0 / 256, {}, r);
    for (std::size_t t = 0; t < p.times.size(); ++t) {
      const double* q = p.row(t);
      if (!(q[0] < q[1] && q[1] < q[2])) ++bad;
    }
    auto spread = [&](std::size_t t) {
      const double* q = p.row(t);
      const double m = (q[0] + q[1] + q[2]) / 3;
      return (q[0] - m) * (q[0] - m) + (q[1] - m) * (q[1] - m) + (q[2] - m) * (q[2] - m);
    };
    s1.add(spread(p.times.size() - 1));
    sq.add(spread(63));  // t = 1/4
  }
  CHECK(bad == 0);
  CHECK(s1.mean() / sq.mean() == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("two-dimensional Dyson gap from the origin is sqrt(2) times a Bessel-3 marginal") {
  std::vector<double> g;
  for (std::uint64_t i = 0; i < 5000; ++i) {
    RngStream r(3, i);
    const DysonPath p = simulate_dyson(2, 1.0, 1.0 / 256, {}, r);
    const double* q = p.row(p.times.size() - 1);
    g.push_back(q[1] - q[0]);
  }
  auto maxwell = [](double x) {
    const double z = x / std::sqrt(2.0);
    return z <= 0 ? 0.0 : std::erf(z / std::sqrt(2.0)) - std::sqrt(2.0 / M_PI) * z * std::exp(-z * z / 2);
  };
  CHECK(ks_distance(g, maxwell) < 0.03);
}

TEST_CASE("conditioned pair from the origin has the meander gap law") {
  // Two motions kept ordered on [0, 1]: the gap is sqrt(2) times a Brownian
  // meander, whose time-1 marginal is Rayleigh.
  std::vector<double> g;
  const auto grid = unit_time_grid(65);
  for (std::uint64_t i = 0; i < 4000; ++i) {
    RngStream r(7, i);
    const double y0[2] = {0, 0};
    const LimitPath p = sample_limit_process(y0, grid, r);
    g.push_back(p.row(64)[1] - p.row(64)[0]);
  }
  CHECK(ks_distance(g, [](double x) { return x <= 0 ? 0.0 : 1 - std::exp(-x * x / 4); }) < 0.05);
}

TEST_CASE("psi of two motions is erf(r/2)") {
  // P(B2 - B1 > -r on [0,1]) = P(|N(0,2)| < r) = erf(r / 2)
  PsiOptions o;
  o.paths = 20000;
  o.bootstrap = 50;
  const std::vector<double> r{0.25, 1.0, 3.0};
  const PsiCurve c = estimate_psi_curve(r, 2, o, RngStream(5, 5));
  for (std::size_t j = 0; j < r.size(); ++j) {
    const double se = std::max(c.extrapolated_stderr[j], 1e-3);
    CHECK(std::abs(c.extrapolated[j] - std::erf(r[j] / 2)) <= 4.0 * se + 0.01);
  }
}

TEST_CASE("theta on synthetic psi") {
  const double alpha = 2.5;
  const ThetaValue one = theta_of_a(0.1, [](double) { return 1.0; }, 20.0, alpha, 0.5);
  CHECK(one.value == doctest::Approx(std::pow(0.1, -alpha)).epsilon(1e-6));
  CHECK(one.lower == doctest::Approx(one.upper));
  CHECK(one.p_weighted == doctest::Approx(0.5 * one.value));
  // psi = min(1, y^3): alpha (1 - a^(3 - alpha)) / (3 - alpha) + 1
  const double a = 0.05;
  const ThetaValue cube = theta_of_a(a, [](double y) { return std::min(1.0, y * y * y); }, 50.0, alpha, 1.0);
  CHECK(cube.value == doctest::Approx(alpha * (1 - std::pow(a, 3 - alpha)) / (3 - alpha) + 1).epsilon(1e-4));
}

TEST_CASE("limit start law on a synthetic psi") {
  // f proportional to y^-1/2 on (0,1) and y^-7/2 beyond: mass 2 + 0.4
  const LimitStartLaw f([](double y) { return std::min(1.0, y * y * y); }, 4, 2.5, 0.3, 0.7);
  CHECK(f.theta() == doctest::Approx(2.4).epsilon(1e-4));
  CHECK(f.total_mass() == doctest::Approx(1.0).epsilon(1e-4));
  for (double y : {0.01, 0.25, 0.81}) CHECK(f.cdf(y) == doctest::Approx(2 * std::sqrt(y) / 2.4).epsilon(1e-4));
  CHECK(f.cdf(2.0) == doctest::Approx(1 - 0.4 * std::pow(2.0, -2.5) / 2.4).epsilon(1e-4));
  CHECK(f.quantile(f.cdf(0.3)) == doctest::Approx(0.3).epsilon(1e-4));
  CHECK(f.density(0.25) == doctest::Approx(std::pow(0.25, -0.5) / 2.4).epsilon(1e-4));
  RngStream rng(1, 1);
  int top = 0;
  std::vector<double> ys;
  for (int i = 0; i < 20000; ++i) {
    const LimitStart s = sample_limit_start(f, rng);
    if (s.side == JumpSide::Top) {
      ++top;
      CHECK(s.point[3] > 0);
      ys.push_back(s.point[3]);
    } else {
      ys.push_back(-s.point[0]);
    }
  }
  CHECK(std::abs(top / 20000.0 - 0.3) < 4 * std::sqrt(0.21 / 20000));
  CHECK(ks_distance(ys, [&](double y) { return f.cdf(y); }) < 0.015);
  CHECK_THROWS_AS(LimitStartLaw([](double) { return 1.0; }, 4, 2.5, 0.6, 0.6), PreconditionError);
}

TEST_CASE("psi curve interpolation") {
  PsiCurve c;
  c.k = 4;
  c.r_grid = {0.5, 1, 2};
  c.extrapolated = {0.1, 0.4, 0.9};
  CHECK(c(1.0) == doctest::Approx(0.4));
  CHECK(c(0.25) == doctest::Approx(0.1 / 8));  // r^(k-1) below the grid
  CHECK(c(10.0) == doctest::Approx(0.9));
  CHECK(c(1.5) > 0.4);
  CHECK(c(1.5) < 0.9);
}

TEST_CASE("psi curve csv round trip") {
  PsiCurve c;
  c.k = 4;
  c.r_grid = {0.5, 1};
  c.a_grid = {0.01, 0.005};
  c.values = {{0.1, 0.4}, {0.11, 0.41}};
  c.stderr_ = {{0.01, 0.01}, {0.01, 0.01}};
  c.extrapolated = {0.12, 0.42};
  c.extrapolated_stderr = {0.02, 0.02};
  c.a_step_stderr = {0.01, 0.01};
  const PsiCurve back = parse_psi_curve_csv(psi_curve_csv(c));
  CHECK(back.k == 4);
  CHECK(back.r_grid == c.r_grid);
  CHECK(back.extrapolated == c.extrapolated);
}

}
