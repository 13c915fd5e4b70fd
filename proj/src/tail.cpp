#include "ordwalk/tail.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ordwalk/parallel.hpp"
#include "ordwalk/walk.hpp"

namespace ordwalk {

const char* method_name(TailMethod m) {
  switch (m) {
    case TailMethod::Direct: return "Direct";
    case TailMethod::ForcedJump: return "ForcedJump";
    case TailMethod::Splitting: return "Splitting";
  }
  return "?";
}

ForcedJumpPolicy ForcedJumpPolicy::defaults(const IncrementLaw& law) {
  ForcedJumpPolicy p;
  const double a = law.spec().p, b = law.spec().q;
  if (a + b > 0) {
    p.w_top = a / (a + b);
    p.w_bottom = b / (a + b);
  }
  return p;
}

namespace {

struct Choice {
  bool defensive = true;
  int side = 0;  // +1 top, -1 bottom
  std::int64_t step = 0;
};

// The proposal choice lives on a child stream so the increments of a
// defensive draw are exactly those of the direct estimator.
Choice choose(const ForcedJumpPolicy& pol, const RngStream& path) {
  RngStream ctl = path.child("proposal");
  Choice c;
  if (ctl.uniform() < pol.defensive_mix) return c;
  c.defensive = false;
  c.step = 1 + static_cast<std::int64_t>(ctl.uniform() * pol.l_force);
  if (c.step > pol.l_force) c.step = pol.l_force;
  c.side = ctl.uniform() * (pol.w_top + pol.w_bottom) < pol.w_top ? +1 : -1;
  return c;
}

struct FjContext {
  ForcedJumpPolicy pol;
  double threshold = 0.0;
  double p_right = 0.0;
  double p_left = 0.0;
  double top_scale = 0.0;     // w_top / (P(X >= t) * L)
  double bottom_scale = 0.0;  // w_bottom / (P(X <= -t) * L)

  FjContext(const IncrementLaw& law, std::int64_t n, const ForcedJumpPolicy& p) : pol(p) {
    if (!(p.defensive_mix > 0.0 && p.defensive_mix <= 1.0)) {
      throw DomainError("tail-estimator", "estimate_survival", "defensive_mix must lie in (0, 1]");
    }
    if (p.l_force < 1) throw DomainError("tail-estimator", "estimate_survival", "l_force must be >= 1");
    threshold = p.b * std::sqrt(static_cast<double>(n));
    if (p.defensive_mix < 1.0) {
      if (threshold < law.body_cut()) {
        throw DomainError("tail-estimator", "estimate_survival",
                          "forced threshold b*sqrt(n) is below body_cut");
      }
      const double wsum = p.w_top + p.w_bottom;
      pol.w_top = p.w_top / wsum;
      pol.w_bottom = p.w_bottom / wsum;
      p_right = law.tail_probability(threshold, TailSide::Right);
      p_left = law.tail_probability(threshold, TailSide::Left);
      if (pol.w_top > 0 && !(p_right > 0)) {
        throw DomainError("tail-estimator", "estimate_survival", "top side weighted but right tail is empty");
      }
      if (pol.w_bottom > 0 && !(p_left > 0)) {
        throw DomainError("tail-estimator", "estimate_survival", "bottom side weighted but left tail is empty");
      }
      top_scale = pol.w_top > 0 ? pol.w_top / (p_right * pol.l_force) : 0.0;
      bottom_scale = pol.w_bottom > 0 ? pol.w_bottom / (p_left * pol.l_force) : 0.0;
    }
  }

  ForcedSlot slot(const Choice& c, int k) const {
    ForcedSlot s;
    s.step = c.step;
    s.coord = c.side > 0 ? k - 1 : 0;
    s.threshold = threshold;
    s.side = c.side > 0 ? TailSide::Right : TailSide::Left;
    return s;
  }

  // Target density over proposal density of the whole increment array.
  double weight(const double* xb, const double* xt) const {
    if (pol.defensive_mix >= 1.0) return 1.0;
    double s = 0.0;
    for (int j = 0; j < pol.l_force; ++j) {
      if (xt[j] >= threshold) s += top_scale;
      if (xb[j] <= -threshold) s += bottom_scale;
    }
    return 1.0 / (pol.defensive_mix + (1.0 - pol.defensive_mix) * s);
  }
};

void stamp(McEstimate& e, std::uint64_t samples, const RngStream& base) {
  e.samples = samples;
  e.seed = base.seed();
  e.stream = base.stream_id();
}

McEstimate forced_jump_estimate(std::span<const double> x, const IncrementLaw& law, std::int64_t n,
                                const SurvivalMethod& method, std::uint64_t samples,
                                const RngStream& base, bool direct) {
  const std::vector<double> gaps = gaps_of(x);
  const int k = static_cast<int>(x.size());
  std::optional<FjContext> ctx;
  if (!direct) ctx.emplace(law, n, method.forced);
  const int L = direct ? 0 : ctx->pol.l_force;
  const bool capped = method.increment_cap.has_value();
  auto acc = reduce_blocks<WeightedSums>(samples, [&](std::uint64_t b, std::uint64_t end) {
    WeightedSums s;
    std::vector<double> xb(std::max(L, 1)), xt(std::max(L, 1));
    for (std::uint64_t i = b; i < end; ++i) {
      RngStream rng = path_stream(base, i);
      double w = 1.0;
      ForcedSlot slot;
      const ForcedSlot* fs = nullptr;
      if (!direct) {
        const Choice c = choose(ctx->pol, rng);
        if (!c.defensive) {
          slot = ctx->slot(c, k);
          fs = &slot;
        }
      }
      double biggest = 0.0;
      const std::int64_t tau = simulate_exit(gaps, law, n, rng, fs, L, xb.data(), xt.data(),
                                             capped ? &biggest : nullptr);
      if (!direct) w = ctx->weight(xb.data(), xt.data());
      double h = tau > n ? 1.0 : 0.0;
      if (capped && biggest > *method.increment_cap) h = 0.0;
      s.add(w, h);
    }
    return s;
  });
  McEstimate e;
  e.value = acc.payload.mean();
  e.std_error = acc.payload.std_error();
  e.ess = acc.ess();
  e.max_weight = acc.w_max;
  stamp(e, samples, base);
  if (!direct && acc.ess_hits() < method.min_ess) {
    std::ostringstream os;
    os << "effective sample size among surviving draws " << acc.ess_hits() << " < " << method.min_ess
       << " (n=" << n << ", samples=" << samples << ", max weight " << acc.w_max << ")";
    throw DegenerateWeights("tail-estimator", "estimate_survival", os.str());
  }
  return e;
}

// Systematic resampling of `count` indices in proportion to `w`.
std::vector<std::size_t> systematic(std::span<const double> w, std::size_t count, double u) {
  std::vector<std::size_t> out;
  out.reserve(count);
  double total = 0.0;
  for (double v : w) total += v;
  if (!(total > 0.0) || w.empty()) return out;
  std::size_t j = 0;
  double cum = w[0];
  for (std::size_t i = 0; i < count; ++i) {
    const double target = (u + static_cast<double>(i)) / static_cast<double>(count) * total;
    while (cum < target && j + 1 < w.size()) cum += w[++j];
    out.push_back(j);
  }
  return out;
}

std::vector<std::int64_t> doubling_levels(std::int64_t n, std::int64_t floor_level) {
  std::vector<std::int64_t> levels;
  for (std::int64_t h = n; h >= std::max<std::int64_t>(floor_level, 1); h = (h + 1) / 2) {
    levels.push_back(h);
    if (h == 1) break;
  }
  if (levels.empty()) levels.push_back(n);
  std::reverse(levels.begin(), levels.end());
  return levels;
}

bool advance_gaps(std::vector<double>& g, const IncrementLaw& law, std::int64_t steps, RngStream& rng);

// ForcedJump draws up to the first level, then weighted resampling and
// fixed-effort splitting. Product of level averages, unbiased; standard
// error from independent replicates.
McEstimate forced_jump_carried(std::span<const double> x, const IncrementLaw& law, std::int64_t n,
                               const SurvivalMethod& method, std::uint64_t samples,
                               const RngStream& base, std::vector<CarriedSurvivor>* population = nullptr) {
  const FjContext ctx(law, n, method.forced);
  const ForcedJumpPolicy& pol = ctx.pol;
  const int L = pol.l_force;
  const int k = static_cast<int>(x.size());
  const std::size_t ng = x.size() - 1;
  const std::vector<std::int64_t> levels = doubling_levels(n, std::max<std::int64_t>(pol.first_level, L));
  const int R = std::max(2, pol.replicates);
  const std::uint64_t n0 = std::max<std::uint64_t>(1, samples / R);
  const std::uint64_t n1 = std::max<std::uint64_t>(1, pol.carry_particles / R);
  const std::vector<double> g0 = gaps_of(x);
  MomentSums reps;
  WeightedSums first;
  for (int r = 0; r < R; ++r) {
    const RngStream rep = base.child(static_cast<std::uint64_t>(r));
    struct Stage0 {
      WeightedSums sums;
      std::vector<double> w;
      std::vector<double> gaps;
    };
    const RngStream s0 = rep.child("level0");
    auto parts = run_blocks(n0, [&](std::uint64_t b, std::uint64_t end) {
      Stage0 out;
      std::vector<double> xb(L), xt(L), ge(ng);
      for (std::uint64_t i = b; i < end; ++i) {
        RngStream rng = path_stream(s0, i);
        const Choice c = choose(pol, rng);
        ForcedSlot slot;
        if (!c.defensive) slot = ctx.slot(c, k);
        const std::int64_t tau = simulate_exit(g0, law, levels[0], rng, c.defensive ? nullptr : &slot, L,
                                               xb.data(), xt.data(), nullptr, ge.data());
        const double w = ctx.weight(xb.data(), xt.data());
        const bool alive = tau > levels[0];
        out.sums.add(w, alive ? 1.0 : 0.0);
        if (alive) {
          out.w.push_back(w);
          out.gaps.insert(out.gaps.end(), ge.begin(), ge.end());
        }
      }
      return out;
    });
    WeightedSums s0sum;
    std::vector<double> w;
    std::vector<double> gaps;
    for (auto& p : parts) {
      s0sum.merge(p.sums);
      w.insert(w.end(), p.w.begin(), p.w.end());
      gaps.insert(gaps.end(), p.gaps.begin(), p.gaps.end());
    }
    first.merge(s0sum);
    double z = s0sum.payload.mean();
    const std::vector<double> first_gaps = gaps;
    std::vector<std::size_t> pick = systematic(w, n1, rep.child("resample0").uniform());
    std::vector<std::size_t> ancestor(w.size());  // level-0 survivor behind each alive path
    std::iota(ancestor.begin(), ancestor.end(), std::size_t{0});
    struct Alive {
      std::vector<double> gaps;
      std::vector<std::size_t> ancestor;
    };
    for (std::size_t lv = 1; lv < levels.size() && z > 0.0; ++lv) {
      const RngStream stage = rep.child(static_cast<std::uint64_t>(lv));
      const std::int64_t len = levels[lv] - levels[lv - 1];
      auto alive_parts = run_blocks(n1, [&](std::uint64_t b, std::uint64_t end) {
        Alive alive;
        std::vector<double> g(ng);
        for (std::uint64_t i = b; i < end; ++i) {
          RngStream rng = path_stream(stage, i);
          std::copy_n(gaps.begin() + static_cast<std::ptrdiff_t>(pick[i] * ng), ng, g.begin());
          if (advance_gaps(g, law, len, rng)) {
            alive.gaps.insert(alive.gaps.end(), g.begin(), g.end());
            alive.ancestor.push_back(ancestor[pick[i]]);
          }
        }
        return alive;
      });
      std::vector<double> next;
      std::vector<std::size_t> next_anc;
      for (auto& p : alive_parts) {
        next.insert(next.end(), p.gaps.begin(), p.gaps.end());
        next_anc.insert(next_anc.end(), p.ancestor.begin(), p.ancestor.end());
      }
      const std::size_t m = next.size() / ng;
      z *= static_cast<double>(m) / static_cast<double>(n1);
      gaps = std::move(next);
      ancestor = std::move(next_anc);
      const std::vector<double> ones(m, 1.0);
      pick = systematic(ones, n1, rep.child(static_cast<std::uint64_t>(1000 + lv)).uniform());
    }
    reps.add(z);
    if (population && z > 0.0) {
      // Particles alive at n, equally weighted within the replicate.
      const std::size_t m = levels.size() > 1 ? gaps.size() / ng : pick.size();
      for (std::size_t i = 0; i < m; ++i) {
        CarriedSurvivor c;
        c.replicate = r;
        c.ancestor = levels.size() > 1 ? ancestor[i] : pick[i];
        c.first_step = levels[0];
        c.weight = z / static_cast<double>(m);
        c.first_gaps.assign(first_gaps.begin() + static_cast<std::ptrdiff_t>(ancestor[i] * ng),
                            first_gaps.begin() + static_cast<std::ptrdiff_t>((ancestor[i] + 1) * ng));
        const std::size_t src = levels.size() > 1 ? i : pick[i];
        c.final_gaps.assign(gaps.begin() + static_cast<std::ptrdiff_t>(src * ng),
                            gaps.begin() + static_cast<std::ptrdiff_t>((src + 1) * ng));
        population->push_back(std::move(c));
      }
    }
  }
  McEstimate e;
  e.value = reps.mean();
  e.std_error = reps.std_error();
  e.ess = first.ess();
  e.max_weight = first.w_max;
  stamp(e, n0 * R, base);
  if (first.ess_hits() < method.min_ess) {
    std::ostringstream os;
    os << "effective sample size among first-level survivors " << first.ess_hits() << " < " << method.min_ess
       << " (n=" << n << ")";
    throw DegenerateWeights("tail-estimator", "estimate_survival", os.str());
  }
  return e;
}

// Advances gap vector `g` by `steps` steps; returns false on exit.
bool advance_gaps(std::vector<double>& g, const IncrementLaw& law, std::int64_t steps, RngStream& rng) {
  const std::size_t k = g.size() + 1;
  for (std::int64_t m = 0; m < steps; ++m) {
    double prev = 0.0;
    bool out = false;
    for (std::size_t i = 0; i < k; ++i) {
      const double v = law.sample(rng);
      if (i > 0) {
        g[i - 1] += v - prev;
        if (!(g[i - 1] > 0.0)) out = true;
      }
      prev = v;
    }
    if (out) return false;
  }
  return true;
}

McEstimate splitting_estimate(std::span<const double> x, const IncrementLaw& law, std::int64_t n,
                              const SplittingPolicy& pol, std::uint64_t samples, const RngStream& base) {
  const std::vector<std::int64_t> levels = doubling_levels(n, pol.first_level);
  const int R = std::max(2, pol.replicates);
  const std::uint64_t per = std::max<std::uint64_t>(1, samples / R);
  const std::vector<double> g0 = gaps_of(x);
  MomentSums reps;
  for (int r = 0; r < R; ++r) {
    const RngStream rep = base.child(static_cast<std::uint64_t>(r));
    std::vector<std::vector<double>> pool{g0};
    double est = 1.0;
    std::int64_t done = 0;
    for (std::size_t lv = 0; lv < levels.size() && est > 0.0; ++lv) {
      const RngStream stage = rep.child(static_cast<std::uint64_t>(lv));
      const std::int64_t len = levels[lv] - done;
      auto parts = run_blocks(per, [&](std::uint64_t b, std::uint64_t end) {
        std::vector<std::vector<double>> alive;
        for (std::uint64_t i = b; i < end; ++i) {
          RngStream rng = path_stream(stage, i);
          std::size_t pick = 0;
          if (pool.size() > 1) {
            pick = static_cast<std::size_t>(rng.child("pick").uniform() * pool.size());
            pick = std::min(pick, pool.size() - 1);
          }
          std::vector<double> g = pool[pick];
          if (advance_gaps(g, law, len, rng)) alive.push_back(std::move(g));
        }
        return alive;
      });
      std::vector<std::vector<double>> next;
      for (auto& p : parts) {
        for (auto& g : p) next.push_back(std::move(g));
      }
      est *= static_cast<double>(next.size()) / static_cast<double>(per);
      pool = std::move(next);
      done = levels[lv];
    }
    reps.add(est);
  }
  McEstimate e;
  e.value = reps.mean();
  e.std_error = reps.std_error();
  stamp(e, per * R, base);
  return e;
}

}  // namespace

McEstimate estimate_survival(std::span<const double> x, const IncrementLaw& law, std::int64_t n,
                             const SurvivalMethod& method, std::uint64_t samples,
                             const RngStream& base) {
  if (!in_chamber(x)) throw PreconditionError("tail-estimator", "estimate_survival", "start must lie in the chamber");
  if (samples < 1) throw PreconditionError("tail-estimator", "estimate_survival", "samples must be >= 1");
  if (n <= 0) {
    McEstimate e;
    e.value = 1.0;
    stamp(e, samples, base);
    return e;
  }
  switch (method.method) {
    case TailMethod::Direct: return forced_jump_estimate(x, law, n, method, samples, base, true);
    case TailMethod::ForcedJump:
      if (method.forced.carry_particles > 0 &&
          n > std::max<std::int64_t>(method.forced.first_level, method.forced.l_force)) {
        return forced_jump_carried(x, law, n, method, samples, base);
      }
      return forced_jump_estimate(x, law, n, method, samples, base, false);
    case TailMethod::Splitting: return splitting_estimate(x, law, n, method.splitting, samples, base);
  }
  return {};
}

std::vector<ForcedJumpDraw> forced_jump_survivors(std::span<const double> x, const IncrementLaw& law,
                                                  std::int64_t n, const ForcedJumpPolicy& policy,
                                                  std::uint64_t samples, const RngStream& base) {
  const FjContext ctx(law, n, policy);
  const std::vector<double> gaps = gaps_of(x);
  const int k = static_cast<int>(x.size());
  const int L = ctx.pol.l_force;
  auto parts = run_blocks(samples, [&](std::uint64_t b, std::uint64_t end) {
    std::vector<ForcedJumpDraw> out;
    std::vector<double> xb(L), xt(L);
    for (std::uint64_t i = b; i < end; ++i) {
      RngStream rng = path_stream(base, i);
      const Choice c = choose(ctx.pol, rng);
      ForcedSlot slot;
      if (!c.defensive) slot = ctx.slot(c, k);
      const std::int64_t tau = simulate_exit(gaps, law, n, rng, c.defensive ? nullptr : &slot, L,
                                             xb.data(), xt.data());
      if (tau <= n) continue;
      ForcedJumpDraw d;
      d.index = i;
      d.weight = ctx.weight(xb.data(), xt.data());
      d.forced = !c.defensive;
      d.forced_side = c.defensive ? 0 : c.side;
      d.jump_step = c.step;
      d.jump_value = c.defensive ? 0.0 : (c.side > 0 ? xt[c.step - 1] : xb[c.step - 1]);
      out.push_back(d);
    }
    return out;
  });
  std::vector<ForcedJumpDraw> all;
  for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
  return all;
}

std::vector<std::vector<double>> replay_forced_path(std::span<const double> x, const IncrementLaw& law,
                                                    std::int64_t n, const ForcedJumpPolicy& policy,
                                                    const RngStream& base, std::uint64_t index,
                                                    std::int64_t horizon) {
  const FjContext ctx(law, n, policy);
  const int k = static_cast<int>(x.size());
  RngStream rng = path_stream(base, index);
  const Choice c = choose(ctx.pol, rng);
  ForcedSlot slot;
  if (!c.defensive) slot = ctx.slot(c, k);
  std::vector<std::vector<double>> path;
  std::vector<double> pos(x.begin(), x.end());
  path.push_back(pos);
  for (std::int64_t m = 1; m <= horizon; ++m) {
    for (int i = 0; i < k; ++i) {
      const double u = rng.uniform();
      const bool hit = !c.defensive && slot.step == m && slot.coord == i;
      pos[i] += hit ? law.conditioned_quantile(u, slot.threshold, slot.side) : law.quantile(u);
    }
    path.push_back(pos);
  }
  return path;
}

void fit_tail_curve(TailCurve& curve, double max_rel_error) {
  std::vector<double> lx, ly, w;
  for (std::size_t j = 0; j < curve.grid.size(); ++j) {
    const McEstimate& e = curve.estimates[j];
    if (!(e.value > 0.0) || !(e.std_error > 0.0)) continue;
    const double rel = e.std_error / e.value;
    if (rel > max_rel_error) continue;
    lx.push_back(std::log(static_cast<double>(curve.grid[j])));
    ly.push_back(std::log(e.value));
    w.push_back(1.0 / (rel * rel));
  }
  const LineFit f = wls_fit(lx, ly, w);
  curve.fitted_slope = f.slope;
  curve.slope_stderr = f.slope_se;
  curve.intercept = f.intercept;
  curve.intercept_stderr = f.intercept_se;
  curve.points_used = f.points;
}

TailCurve build_tail_curve(std::span<const double> x, const IncrementLaw& law,
                           std::span<const std::int64_t> grid, const SurvivalMethod& method,
                           std::uint64_t samples_per_point, const RngStream& base,
                           double max_rel_error) {
  for (std::size_t j = 1; j < grid.size(); ++j) {
    if (!(grid[j - 1] < grid[j])) {
      throw PreconditionError("tail-estimator", "build_tail_curve", "grid must be strictly increasing");
    }
  }
  TailCurve c;
  c.start.assign(x.begin(), x.end());
  c.grid.assign(grid.begin(), grid.end());
  c.methods.assign(grid.size(), method.method);
  if (method.method == TailMethod::Direct && !method.increment_cap) {
    // One set of paths; each exit time reused for every horizon.
    c.estimates = survival_curve_mc(x, law, grid, samples_per_point, base);
    for (auto& e : c.estimates) e.ess = static_cast<double>(samples_per_point);
  } else {
    for (std::int64_t n : grid) {
      c.estimates.push_back(
          estimate_survival(x, law, n, method, samples_per_point, base.child(static_cast<std::uint64_t>(n))));
    }
  }
  fit_tail_curve(c, max_rel_error);
  return c;
}

InterceptComparison compare_intercept(std::span<const TailCurve> curves,
                                      std::span<const McEstimate> u_estimates, double pinned_slope) {
  InterceptComparison out;
  out.pinned_slope = pinned_slope;
  std::vector<double> log_norm, log_se;
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const TailCurve& c = curves[i];
    std::vector<double> lx, ly, w;
    for (std::size_t j = 0; j < c.grid.size(); ++j) {
      const McEstimate& e = c.estimates[j];
      if (!(e.value > 0.0) || !(e.std_error > 0.0) || e.std_error / e.value > 0.25) continue;
      lx.push_back(std::log(static_cast<double>(c.grid[j])));
      ly.push_back(std::log(e.value));
      w.push_back(std::pow(e.value / e.std_error, 2));
    }
    const LineFit f = wls_fit_fixed_slope(lx, ly, w, pinned_slope);
    const McEstimate& u = u_estimates[i];
    const double ln = f.intercept - std::log(u.value);
    const double se = std::sqrt(f.intercept_se * f.intercept_se + std::pow(u.std_error / u.value, 2));
    log_norm.push_back(ln);
    log_se.push_back(se);
    McEstimate m;
    m.value = std::exp(ln);
    m.std_error = m.value * se;
    out.normalized.push_back(m);
  }
  const std::size_t n = curves.size();
  out.ratio.assign(n, std::vector<McEstimate>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      McEstimate r;
      if (i == j) {
        r.value = 1.0;
      } else {
        const double d = log_norm[i] - log_norm[j];
        const double se = std::hypot(log_se[i], log_se[j]);
        r.value = std::exp(d);
        r.std_error = r.value * se;
        if (std::abs(d) > 3.0 * se) out.consistent = false;
      }
      out.ratio[i][j] = r;
    }
  }
  return out;
}

std::string tail_curve_csv(const TailCurve& curve) {
  std::ostringstream os;
  os.precision(17);
  os << "n,p_hat,stderr,method,ess\n";
  for (std::size_t j = 0; j < curve.grid.size(); ++j) {
    const McEstimate& e = curve.estimates[j];
    os << curve.grid[j] << ',' << e.value << ',' << e.std_error << ',' << method_name(curve.methods[j])
       << ',' << e.ess << '\n';
  }
  return os.str();
}

std::vector<CarriedSurvivor> forced_jump_population(std::span<const double> x, const IncrementLaw& law,
                                                    std::int64_t n, const SurvivalMethod& method,
                                                    std::uint64_t samples, const RngStream& base,
                                                    McEstimate* estimate) {
  if (!in_chamber(x)) throw PreconditionError("tail-estimator", "forced_jump_population", "start must lie in the chamber");
  if (method.forced.carry_particles == 0)
    throw PreconditionError("tail-estimator", "forced_jump_population", "carry_particles must be positive");
  std::vector<CarriedSurvivor> out;
  const McEstimate e = forced_jump_carried(x, law, n, method, samples, base, &out);
  if (estimate) *estimate = e;
  return out;
}

}  // namespace ordwalk
