#include <doctest.h>

#include <vector>

#include "ordwalk/core.hpp"
#include "ordwalk/errors.hpp"

using namespace ordwalk;

TEST_SUITE("core") {

TEST_CASE("vandermonde and delta1 on small examples") {
  const std::vector<double> x{0, 1, 2, 3};
  // (1)(2)(3)(1)(2)(1)
  CHECK(vandermonde(x) == doctest::Approx(12.0));
  // lower: pairs among 0,1,2 -> (2)(3)(2)
  CHECK(delta1(x, Side::Lower) == doctest::Approx(12.0));
  CHECK(delta1(x, Side::Upper) == doctest::Approx(12.0));
  CHECK(delta1_all(x) == doctest::Approx(2.0 * 3 * 4 * 2 * 3 * 2));
  const std::vector<double> y{-1, 0.5, 4};
  CHECK(vandermonde(y) == doctest::Approx(1.5 * 5 * 3.5));
}

TEST_CASE("translation invariance of the geometry") {
  const std::vector<double> x{-0.3, 0.2, 1.7, 5.0};
  std::vector<double> t(x);
  for (auto& v : t) v += 123.25;
  CHECK(vandermonde(t) == doctest::Approx(vandermonde(x)));
  CHECK(delta1(t, Side::Lower) == doctest::Approx(delta1(x, Side::Lower)));
  CHECK(gaps_of(t)[2] == doctest::Approx(gaps_of(x)[2]));
}

TEST_CASE("gaps round trip") {
  const std::vector<double> g{0.5, 2, 7};
  const auto p = positions_from_gaps(g);
  REQUIRE(p.size() == 4);
  CHECK(p[0] == 0.0);
  CHECK(p[3] == doctest::Approx(9.5));
  CHECK(gaps_of(p) == g);
}

TEST_CASE("chamber membership is strict") {
  CHECK(in_chamber(std::vector<double>{0, 1, 2}));
  CHECK_FALSE(in_chamber(std::vector<double>{0, 1, 1}));
  CHECK_FALSE(in_chamber(std::vector<double>{0, 2, 1}));
}

TEST_CASE("validate_params enforces k >= 4 and k-2 < alpha < k-1") {
  WalkParams p;
  CHECK_NOTHROW(validate_params(p));
  p.k = 3;
  p.law.alpha = 1.5;
  CHECK_THROWS_AS(validate_params(p), DomainError);
  p = WalkParams{};
  p.law.alpha = 3.0;
  CHECK_THROWS_AS(validate_params(p), DomainError);
  p = WalkParams{};
  p.law.p = 0.0;
  p.law.q = 0.0;
  CHECK_THROWS_AS(validate_params(p), DomainError);
}

TEST_CASE("theory exponent of the desk configuration") {
  CHECK(theory_exponent(WalkParams{}) == doctest::Approx(2.75));
}

TEST_CASE("compact points") {
  CHECK(CompactPoint::in_chamber({0, 1, 2, 3}).valid());
  CHECK(CompactPoint::top_frozen({0, 1, 2}).dim() == 4);
  CHECK_FALSE(CompactPoint::in_chamber({0, 0, 2, 3}).valid());
}

}
