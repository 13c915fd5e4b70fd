#include "ordwalk/walk.hpp"

#include <algorithm>
#include <cmath>

#include "ordwalk/parallel.hpp"

namespace ordwalk {

namespace {

bool ordered_range(std::span<const double> x, std::size_t lo, std::size_t hi) {
  for (std::size_t i = lo + 1; i < hi; ++i) {
    if (!(x[i - 1] < x[i])) return false;
  }
  return true;
}

std::pair<std::size_t, std::size_t> selected(SubWalkSelector s, std::size_t k) {
  switch (s) {
    case SubWalkSelector::Lower: return {0, k - 1};
    case SubWalkSelector::Upper: return {1, k};
    default: return {0, k};
  }
}

}  // namespace

void step(std::span<double> state, const IncrementLaw& law, RngStream& rng) {
  for (double& v : state) v += law.sample(rng);
}

ExitResult exit_time(std::span<const double> x, const IncrementLaw& law, std::int64_t horizon,
                     SubWalkSelector selector, RngStream& rng) {
  const std::size_t k = x.size();
  const auto [lo, hi] = selected(selector, k);
  if (k < 2 || !ordered_range(x, lo, hi)) {
    throw PreconditionError("walk-engine", "exit_time", "start is not ordered on the selected coordinates");
  }
  std::vector<double> gaps = gaps_of(x);
  std::vector<double> pos(x.begin(), x.end());
  std::vector<double> inc(k);
  ExitResult r;
  for (std::int64_t m = 1; m <= horizon; ++m) {
    for (std::size_t i = 0; i < k; ++i) {
      inc[i] = law.sample(rng);
      pos[i] += inc[i];
    }
    bool out = false;
    for (std::size_t i = lo; i + 1 < hi; ++i) {
      gaps[i] += inc[i + 1] - inc[i];
      if (!(gaps[i] > 0.0)) out = true;
    }
    if (out) {
      r.tau = m;
      break;
    }
  }
  r.final_state = std::move(pos);
  return r;
}

ExitTimes exit_times_all(std::span<const double> x, const IncrementLaw& law, std::int64_t horizon,
                         RngStream& rng) {
  const std::size_t k = x.size();
  std::vector<double> gaps = gaps_of(x);
  std::vector<double> inc(k);
  const std::int64_t never = horizon + 1;
  ExitTimes t{never, never, never};
  for (std::int64_t m = 1; m <= horizon; ++m) {
    for (std::size_t i = 0; i < k; ++i) inc[i] = law.sample(rng);
    bool bottom_gap_out = false, middle_out = false, top_gap_out = false;
    for (std::size_t i = 0; i + 1 < k; ++i) {
      gaps[i] += inc[i + 1] - inc[i];
      if (!(gaps[i] > 0.0)) {
        if (i == 0) bottom_gap_out = true;
        else if (i + 2 == k) top_gap_out = true;
        else middle_out = true;
      }
    }
    if (t.full == never && (bottom_gap_out || middle_out || top_gap_out)) t.full = m;
    if (t.lower == never && (bottom_gap_out || middle_out)) t.lower = m;
    if (t.upper == never && (middle_out || top_gap_out)) t.upper = m;
    if (t.lower != never && t.upper != never) break;
  }
  return t;
}

std::int64_t simulate_exit(std::span<const double> gaps0, const IncrementLaw& law,
                           std::int64_t horizon, RngStream& rng, const ForcedSlot* forced,
                           std::int64_t record_steps, double* x_bottom, double* x_top,
                           double* max_abs_increment, double* gaps_out) {
  constexpr std::size_t kMaxGaps = 32;
  const std::size_t ng = gaps0.size();
  const std::size_t k = ng + 1;
  double gaps[kMaxGaps];
  std::copy(gaps0.begin(), gaps0.end(), gaps);
  std::int64_t tau = horizon + 1;
  const std::int64_t last = std::max(horizon, record_steps);
  double biggest = 0.0;
  for (std::int64_t m = 1; m <= last; ++m) {
    double prev = 0.0;
    bool out = false;
    const bool alive = tau > horizon;
    const bool watch = max_abs_increment != nullptr && alive && m <= horizon;
    for (std::size_t i = 0; i < k; ++i) {
      const double u = rng.uniform();
      double v;
      if (forced != nullptr && forced->step == m && forced->coord == static_cast<int>(i)) {
        v = law.conditioned_quantile(u, forced->threshold, forced->side);
      } else {
        v = law.quantile(u);
      }
      if (watch) biggest = std::max(biggest, std::abs(v));
      if (m <= record_steps) {
        if (i == 0 && x_bottom != nullptr) x_bottom[m - 1] = v;
        if (i + 1 == k && x_top != nullptr) x_top[m - 1] = v;
      }
      if (i > 0 && alive) {
        gaps[i - 1] += v - prev;
        if (!(gaps[i - 1] > 0.0)) out = true;
      }
      prev = v;
    }
    if (alive && m <= horizon && out) tau = m;
    if (tau <= horizon && m >= record_steps) break;
  }
  if (max_abs_increment != nullptr) *max_abs_increment = biggest;
  if (gaps_out != nullptr) std::copy(gaps, gaps + ng, gaps_out);
  return tau;
}

McEstimate survival_mc(std::span<const double> x, const IncrementLaw& law, std::int64_t n,
                       std::uint64_t samples, SubWalkSelector selector, const RngStream& base) {
  if (samples < 1) throw PreconditionError("walk-engine", "survival_mc", "samples must be >= 1");
  McEstimate e;
  e.samples = samples;
  e.seed = base.seed();
  e.stream = base.stream_id();
  if (n <= 0) {
    e.value = 1.0;
    return e;
  }
  const std::size_t k = x.size();
  const auto [lo, hi] = selected(selector, k);
  if (!ordered_range(x, lo, hi)) {
    throw PreconditionError("walk-engine", "survival_mc", "start is not ordered on the selected coordinates");
  }
  std::vector<double> xs(x.begin(), x.end());
  auto acc = reduce_blocks<MomentSums>(samples, [&](std::uint64_t b, std::uint64_t end) {
    MomentSums s;
    for (std::uint64_t i = b; i < end; ++i) {
      RngStream rng = path_stream(base, i);
      bool survived;
      if (selector == SubWalkSelector::Full) {
        survived = simulate_exit(gaps_of(xs), law, n, rng) > n;
      } else {
        const auto t = exit_times_all(xs, law, n, rng);
        survived = (selector == SubWalkSelector::Lower ? t.lower : t.upper) > n;
      }
      s.add(survived ? 1.0 : 0.0);
    }
    return s;
  });
  e.value = acc.mean();
  e.std_error = acc.std_error();
  return e;
}

std::vector<McEstimate> survival_curve_mc(std::span<const double> x, const IncrementLaw& law,
                                          std::span<const std::int64_t> grid, std::uint64_t samples,
                                          const RngStream& base) {
  if (!in_chamber(x)) throw PreconditionError("walk-engine", "survival_curve_mc", "start must lie in the chamber");
  if (grid.empty()) return {};
  const std::int64_t horizon = *std::max_element(grid.begin(), grid.end());
  const std::vector<double> gaps = gaps_of(x);
  struct Counts {
    std::vector<double> hits;
    void merge(const Counts& o) {
      if (hits.empty()) hits.assign(o.hits.size(), 0.0);
      for (std::size_t j = 0; j < o.hits.size(); ++j) hits[j] += o.hits[j];
    }
  };
  auto acc = reduce_blocks<Counts>(samples, [&](std::uint64_t b, std::uint64_t end) {
    Counts c;
    c.hits.assign(grid.size(), 0.0);
    for (std::uint64_t i = b; i < end; ++i) {
      RngStream rng = path_stream(base, i);
      const std::int64_t tau = simulate_exit(gaps, law, horizon, rng);
      for (std::size_t j = 0; j < grid.size(); ++j) {
        if (tau > grid[j]) c.hits[j] += 1.0;
      }
    }
    return c;
  });
  std::vector<McEstimate> out(grid.size());
  const double N = static_cast<double>(samples);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double h = acc.hits.empty() ? 0.0 : acc.hits[j];
    const double pm = h / N;
    out[j].value = pm;
    out[j].std_error = N > 1 ? std::sqrt(pm * (1.0 - pm) / (N - 1.0)) : 0.0;
    out[j].samples = samples;
    out[j].seed = base.seed();
    out[j].stream = base.stream_id();
  }
  return out;
}

std::vector<double> PathRecord::position(std::int64_t m) const {
  std::vector<double> p = start;
  for (std::int64_t j = 0; j < m; ++j) {
    for (int i = 0; i < k; ++i) p[i] += steps[static_cast<std::size_t>(j) * k + i];
  }
  return p;
}

PathRecord record_path(std::span<const double> x, const IncrementLaw& law, std::int64_t horizon,
                       RngStream& rng) {
  PathRecord r;
  r.start.assign(x.begin(), x.end());
  r.k = static_cast<int>(x.size());
  r.horizon = horizon;
  r.steps.resize(static_cast<std::size_t>(horizon) * x.size());
  std::vector<double> pos = r.start;
  for (std::int64_t m = 1; m <= horizon; ++m) {
    for (int i = 0; i < r.k; ++i) {
      const double v = law.sample(rng);
      r.steps[static_cast<std::size_t>(m - 1) * r.k + i] = v;
      pos[i] += v;
    }
    if (!r.exit_time && !in_chamber(pos)) r.exit_time = m;
  }
  return r;
}

}  // namespace ordwalk
