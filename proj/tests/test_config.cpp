#include <doctest.h>

#include <string>

#include "ordwalk/config.hpp"
#include "ordwalk/errors.hpp"

using namespace ordwalk;

TEST_SUITE("config") {

TEST_CASE("defaults are the desk configuration") {
  const ExperimentConfig c;
  const WalkParams p = c.params();
  CHECK(p.k == 4);
  CHECK(p.alpha() == 2.5);
  CHECK(c.start() == std::vector<double>{0, 1, 2, 3});
  CHECK(c.get_ints("grids.horizons") == std::vector<std::int64_t>{32, 64, 128, 256, 512});
}

TEST_CASE("serialize and parse round trip") {
  ExperimentConfig c;
  c.set("params.alpha", "2.75");
  c.apply_override("grids.r=0.5,1,2");
  c.set("run.output", "some dir");
  const ExperimentConfig back = ExperimentConfig::parse(c.serialize());
  CHECK(back.serialize() == c.serialize());
  CHECK(back.hash() == c.hash());
  CHECK(back.get_reals("grids.r") == std::vector<double>{0.5, 1, 2});
  CHECK(back.get_text("run.output") == "some dir");
}

TEST_CASE("canonical form ignores formatting") {
  const ExperimentConfig a = ExperimentConfig::parse("[params]\nalpha = 2.50\n");
  const ExperimentConfig b = ExperimentConfig::parse("# comment\n[params]\n  alpha=2.5   \n");
  CHECK(a.hash() == b.hash());
  CHECK(a.hash() != ExperimentConfig::parse("[params]\nalpha = 2.6\n").hash());
  // locations are not part of a run's identity
  ExperimentConfig moved = a;
  moved.set("run.output", "/elsewhere");
  moved.set("harmonic.cache", "/cache");
  CHECK(moved.hash() == a.hash());
  CHECK(moved.identity() == a.identity());
  CHECK(moved.serialize() != a.serialize());
}

TEST_CASE("bad input is rejected") {
  CHECK_THROWS_AS(ExperimentConfig::parse("[params]\nkk = 4\n"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse("[params]\nk = four\n"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse("[tail]\nsamples = 0\n"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse("[tail]\nsamples = -5\n"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse("k = 4\n"), ConfigError);
  ExperimentConfig c;
  CHECK_THROWS_AS(c.apply_override("params.k"), ConfigError);
  CHECK_THROWS_AS(c.set("grids.horizons", "32, x"), ConfigError);
  c.set("run.seed", "-1");
  CHECK_THROWS_AS(c.seed(), ConfigError);
}

TEST_CASE("every schema key has a parseable default") {
  const ExperimentConfig c;
  for (const auto& k : ExperimentConfig::schema()) CHECK(c.values().count(k.key) == 1);
}

}
