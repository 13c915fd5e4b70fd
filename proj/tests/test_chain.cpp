#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "ordwalk/chain.hpp"
#include "ordwalk/errors.hpp"
#include "ordwalk/stats.hpp"

using namespace ordwalk;

namespace {

// Coarse lattices: the checks below are structural or symmetric, so the
// surrogate accuracy does not enter.
const HarmonicContext& coarse_context() {
  static const HarmonicContext ctx = [] {
    LatticeSpec v;
    v.nodes = 12;
    LatticeSpec u = LatticeSpec::green_defaults();
    u.nodes = 8;
    return HarmonicContext::build(build_law(2.5, 0.5, 0.5, 1.0), 4, v, u, RngStream(3, 0));
  }();
  return ctx;
}

bool finite_ordered(const CompactPoint& p) { return in_chamber(p.finite); }

}  // namespace

TEST_SUITE("chain") {

TEST_CASE("branch probabilities are nonnegative and mirror-symmetric at a symmetric start") {
  const std::vector<double> x{0.0, 1.0, 2.0, 3.0};
  BranchOptions opts;
  opts.u = UEstimator::Surrogate;
  opts.one_step_samples = 200000;
  const auto b = kernel_branch_probs(x, coarse_context(), opts, RngStream(5, 0));
  CHECK(b.stay.value >= 0.0);
  CHECK(b.freeze_top.value > 0.0);
  CHECK(b.freeze_bottom.value > 0.0);
  CHECK(b.stay.value < 1.0);
  // p = q and x mirrors onto itself: the two freeze branches agree
  const double se = std::hypot(b.freeze_top.std_error, b.freeze_bottom.std_error);
  CHECK(std::abs(b.freeze_top.value - b.freeze_bottom.value) <= 4.0 * se + 1e-12);
  CHECK(b.v_x > 0.0);
}

TEST_CASE("trajectories freeze at most once and stay ordered") {
  RngStream rng(7, 0);
  for (int rep = 0; rep < 5; ++rep) {
    const auto t = run_chain(CompactPoint::in_chamber({0.0, 1.0, 2.0, 3.0}), 60, coarse_context(), 32, rng);
    REQUIRE(t.steps.size() == 60);
    int freezes = 0;
    for (std::size_t i = 0; i < t.steps.size(); ++i) {
      const auto& s = t.steps[i];
      CHECK(s.to.valid());
      CHECK(s.to.dim() == 4);
      CHECK(finite_ordered(s.to));
      if (s.branch == Branch::FreezeTop || s.branch == Branch::FreezeBottom) {
        ++freezes;
        REQUIRE(t.freeze_step.has_value());
        CHECK(*t.freeze_step == static_cast<std::int64_t>(i));
      }
      if (t.freeze_step && static_cast<std::int64_t>(i) > *t.freeze_step) {
        CHECK((s.branch == Branch::FrozenTopMove || s.branch == Branch::FrozenBottomMove));
        CHECK(s.to.frozen == t.steps[*t.freeze_step].to.frozen);
      }
    }
    CHECK(freezes <= 1);
  }
}

TEST_CASE("frozen chain: the h-transform step pushes the closest pair apart") {
  const auto& ctx = coarse_context();
  RngStream rng(11, 0);
  const auto s = CompactPoint::top_frozen({0.0, 0.3, 2.0});
  MomentSums d;
  for (int i = 0; i < 20000; ++i) {
    const auto st = sample_step(s, ctx, 64, rng);
    REQUIRE(st.to.frozen == Frozen::TopPlusInfinity);
    REQUIRE(finite_ordered(st.to));
    d.add(st.to.finite[1] - st.to.finite[0] - 0.3);
  }
  CHECK(d.mean() >= -3.0 * d.std_error());
  CHECK(d.mean() > 0.0);
}

TEST_CASE("trajectory CSV writes the frozen coordinate as an infinity") {
  Trajectory t;
  KernelStep a;
  a.from = CompactPoint::in_chamber({0.0, 1.0, 2.0});
  a.to = CompactPoint::top_frozen({0.5, 1.5});
  a.branch = Branch::FreezeTop;
  t.steps.push_back(a);
  t.freeze_step = 0;
  const std::string csv = trajectory_csv(t);
  CHECK(csv.find("step,branch,x1,x2,x3\n") == 0);
  CHECK(csv.find(",+INF\n") != std::string::npos);
  CHECK(csv.find("0,start,0,1,2\n") != std::string::npos);
}

TEST_CASE("killed chain lifetimes are reproducible and reject bad starts") {
  const std::vector<double> x{0.0, 1.0, 2.0, 3.0};
  const auto a = killed_chain_lifetime(x, coarse_context(), 50, 500, 64, RngStream(13, 0));
  const auto b = killed_chain_lifetime(x, coarse_context(), 50, 500, 64, RngStream(13, 0));
  REQUIRE(a.size() == 50);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].lifetime == b[i].lifetime);
    CHECK(a[i].lifetime >= 0);
  }
  const std::vector<double> bad{0.0, 2.0, 1.0, 3.0};
  CHECK_THROWS_AS(killed_chain_lifetime(bad, coarse_context(), 5, 10, 4, RngStream(1, 0)), PreconditionError);
}

}
