#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "ordwalk/parallel.hpp"
#include "ordwalk/rng.hpp"
#include "ordwalk/stats.hpp"

using namespace ordwalk;

TEST_SUITE("rng-stats") {

TEST_CASE("streams are pure functions of seed, id and position") {
  RngStream a(11, 4), b(11, 4), c(11, 5);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    differs = differs || x != c.next_u64();
  }
  CHECK(differs);
  CHECK(RngStream(1, 2).child("x").stream_id() == RngStream(1, 2).child("x").stream_id());
  CHECK(RngStream(1, 2).child("x").stream_id() != RngStream(1, 2).child("y").stream_id());
}

TEST_CASE("uniform and normal moments") {
  RngStream rng(1, 1);
  MomentSums u, z;
  for (int i = 0; i < 200000; ++i) {
    u.add(rng.uniform());
    z.add(rng.normal());
  }
  CHECK(std::abs(u.mean() - 0.5) < 4 * u.std_error());
  CHECK(std::abs(z.mean()) < 4 * z.std_error());
  CHECK(z.s2 / z.n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("block reductions do not depend on the worker count") {
  auto run = [] {
    return reduce_blocks<MomentSums>(100000, [](std::uint64_t b, std::uint64_t e) {
      MomentSums m;
      for (std::uint64_t i = b; i < e; ++i) {
        RngStream r(9, i);
        m.add(r.uniform());
      }
      return m;
    });
  };
  set_workers(1);
  const auto a = run();
  set_workers(3);
  const auto b = run();
  set_workers(0);
  CHECK(a.s1 == b.s1);
  CHECK(a.s2 == b.s2);
}

TEST_CASE("weighted least squares recovers an exact line") {
  const std::vector<double> x{0, 1, 2, 3}, y{1, 3, 5, 7}, w{1, 2, 1, 5};
  const LineFit f = wls_fit(x, y, w);
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
}

TEST_CASE("KS distances") {
  std::vector<double> s;
  for (int i = 0; i < 1000; ++i) s.push_back((i + 0.5) / 1000.0);
  CHECK(ks_distance(s, [](double x) { return x; }) <= 0.0005 + 1e-12);
  CHECK(ks_two_sample(s, s) == 0.0);
  std::vector<double> shifted(s);
  for (auto& v : shifted) v += 0.25;
  CHECK(ks_two_sample(s, shifted) == doctest::Approx(0.25).epsilon(0.01));
  // weights count like repetitions
  const std::vector<double> a{1, 2}, w{3, 1}, rep{1, 1, 1, 2};
  auto unif3 = [](double x) { return std::clamp(x / 3.0, 0.0, 1.0); };
  CHECK(ks_distance(a, unif3, w) == doctest::Approx(ks_distance(rep, unif3)).epsilon(1e-12));
}

TEST_CASE("ratio estimate by the delta method") {
  const McEstimate r = ratio_estimate(2.0, 0.1, 4.0, 0.2);
  CHECK(r.value == doctest::Approx(0.5));
  CHECK(r.std_error == doctest::Approx(0.5 * std::hypot(0.05, 0.05)));
}

TEST_CASE("Hill estimator on exact Pareto") {
  RngStream rng(2, 2);
  std::vector<double> s;
  for (int i = 0; i < 200000; ++i) s.push_back(std::pow(rng.uniform(), -1.0 / 2.5));
  CHECK(hill_estimator(s, 5000) == doctest::Approx(2.5).epsilon(0.05));
}

}
