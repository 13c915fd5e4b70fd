#include "ordwalk/chain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ordwalk/parallel.hpp"
#include "ordwalk/walk.hpp"

namespace ordwalk {

namespace {

std::shared_ptr<const GapSurrogate> cached(const std::string& dir, const char* tag, std::uint64_t key,
                                           const std::function<GapSurrogate()>& make) {
  std::filesystem::path file;
  if (!dir.empty()) {
    char name[64];
    std::snprintf(name, sizeof name, "%s-%016llx.bin", tag, static_cast<unsigned long long>(key));
    file = std::filesystem::path(dir) / name;
    std::ifstream in(file, std::ios::binary);
    if (in) return std::make_shared<GapSurrogate>(GapSurrogate::load(in, key));
  }
  auto s = std::make_shared<GapSurrogate>(make());
  if (!file.empty()) {
    std::filesystem::create_directories(file.parent_path());
    std::ofstream out(file, std::ios::binary);
    s->save(out);
  }
  return s;
}

}  // namespace

HarmonicContext HarmonicContext::build(const IncrementLaw& law, int k, const LatticeSpec& v_spec,
                                       const LatticeSpec& u_spec, const RngStream& base,
                                       const std::string& cache_dir) {
  if (k < 2) throw PreconditionError("conditioned-chain", "HarmonicContext::build", "k must be >= 2");
  HarmonicContext ctx{law, k, nullptr, nullptr, {}};
  ctx.v_hat = build_v_hat(law, k, v_spec, base, cache_dir);
  ctx.v = VFunction(law, k, ctx.v_hat);
  const std::uint64_t ukey =
      GapSurrogate::make_key(SurrogateKind::Green, k, law, u_spec, ctx.v_hat ? ctx.v_hat->key() : 0);
  ctx.u_hat = cached(cache_dir, "uhat", ukey, [&] {
    return GapSurrogate::build_green(ctx.v, law, u_spec, base.child("u-hat"));
  });
  return ctx;
}

std::shared_ptr<const GapSurrogate> HarmonicContext::build_v_hat(const IncrementLaw& law, int k,
                                                                const LatticeSpec& v_spec, const RngStream& base,
                                                                const std::string& cache_dir) {
  if (k <= 2) return nullptr;
  const std::uint64_t vkey = GapSurrogate::make_key(SurrogateKind::Harmonic, k - 1, law, v_spec, 0);
  return cached(cache_dir, "vhat", vkey, [&] {
    return GapSurrogate::build_harmonic(k - 1, law, v_spec, base.child("v-hat"));
  });
}

const char* branch_name(Branch b) {
  switch (b) {
    case Branch::StayW: return "stay";
    case Branch::FreezeTop: return "freeze_top";
    case Branch::FreezeBottom: return "freeze_bottom";
    case Branch::FrozenTopMove: return "frozen_top_move";
    case Branch::FrozenBottomMove: return "frozen_bottom_move";
  }
  return "?";
}

BranchProbs kernel_branch_probs(std::span<const double> x, const HarmonicContext& ctx,
                                const BranchOptions& opts, const RngStream& base) {
  if (!in_chamber(x) || static_cast<int>(x.size()) != ctx.k) {
    throw PreconditionError("conditioned-chain", "kernel_branch_probs", "x must be a chamber point of dimension k");
  }
  const std::size_t k = x.size();
  BranchProbs out;
  out.v_x = ctx.v(x);
  const VFunction& v = ctx.v;
  const bool series = opts.u == UEstimator::Series;

  // One-step sums p v1, q v2 and (surrogate mode) U-hat on W, drawn jointly
  // from a defensive proposal: all three grow like |X|^(k-2) in one
  // coordinate, which has infinite variance under the plain law.
  std::vector<std::function<double(std::span<const double>)>> fns{
      [&](std::span<const double> y) { return v.p() > 0.0 ? v.p() * v.v1(y) : 0.0; },
      [&](std::span<const double> y) { return v.q() > 0.0 ? v.q() * v.v2(y) : 0.0; }};
  if (!series) fns.push_back([&](std::span<const double> y) { return in_chamber(y) ? ctx.U(y) : 0.0; });
  const auto m = one_step_means(x, ctx.law, fns, static_cast<int>(k) - 2, opts.one_step_samples, base.child("one-step"));
  const McEstimate& top_m = m[0];
  const McEstimate& bottom_m = m[1];
  const McEstimate& sum_m = m.back();

  double U = 0.0, U_se = 0.0;
  if (series) {
    USeriesOptions so = opts.series;
    so.shift = 0;
    const USeriesEstimate est = estimate_U(x, ctx.law, v, so, base.child("series"));
    U = est.total;
    U_se = est.total_stderr;
    // Same paths shifted by one step: numerator U - v(x).
    out.stay.value = (U - out.v_x) / U;
    out.stay.std_error = out.v_x * U_se / (U * U);
  } else {
    U = ctx.U(x);
    out.stay.value = m[2].value / U;
    out.stay.std_error = m[2].std_error / U;
  }
  if (!(U > 0.0)) throw DenominatorVanishes("conditioned-chain", "kernel_branch_probs", "U(x) estimate is not positive");
  out.u.value = U;
  out.u.std_error = U_se;
  auto ratio = [&](const McEstimate& num) {
    McEstimate e;
    e.value = num.value / U;
    e.std_error = std::hypot(num.std_error / U, e.value * U_se / U);
    return e;
  };
  out.freeze_top = ratio(top_m);
  out.freeze_bottom = ratio(bottom_m);
  out.mass.value = out.stay.value + out.freeze_top.value + out.freeze_bottom.value;
  // mass = 1 - (v(x) - F) / U with F the one-step freeze sum (joint samples)
  // and U independent of F; in surrogate mode U-hat carries no error and
  // the stay sum is part of the joint one-step samples.
  const double se_one = sum_m.std_error / U;
  const double se_u = series ? std::abs(out.v_x - sum_m.value) * U_se / (U * U) : 0.0;
  out.mass.std_error = std::hypot(se_one, se_u);
  for (McEstimate* e : {&out.stay, &out.freeze_top, &out.freeze_bottom, &out.mass, &out.u}) {
    e->samples = opts.one_step_samples;
    e->seed = base.seed();
    e->stream = base.stream_id();
  }
  return out;
}

namespace {

// Self-normalized resampling: draws `batch` candidates with `draw` and picks
// one in proportion to `weight`.
template <class Draw, class Weight>
std::vector<double> resample(std::size_t dim, int batch, RngStream& rng, Draw&& draw, Weight&& weight) {
  std::vector<double> cand(static_cast<std::size_t>(batch) * dim);
  std::vector<double> cum(static_cast<std::size_t>(batch));
  double total = 0.0;
  for (int m = 0; m < batch; ++m) {
    double* y = cand.data() + static_cast<std::size_t>(m) * dim;
    draw(y);
    const double w = weight(std::span<const double>(y, dim));
    total += w > 0.0 ? w : 0.0;
    cum[static_cast<std::size_t>(m)] = total;
  }
  if (!(total > 0.0)) {
    throw ResamplingDegenerate("conditioned-chain", "sample_step",
                               "all candidate weights are zero; increase the batch size");
  }
  const double u = rng.uniform() * total;
  const std::size_t pick = static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
  const std::size_t idx = std::min(pick, cum.size() - 1);
  return {cand.begin() + static_cast<std::ptrdiff_t>(idx * dim),
          cand.begin() + static_cast<std::ptrdiff_t>((idx + 1) * dim)};
}

struct FreezeProbs {
  double top, bottom;
};

FreezeProbs freeze_probs(std::span<const double> x, const HarmonicContext& ctx) {
  const double U = ctx.U(x);
  if (!(U > 0.0)) throw DenominatorVanishes("conditioned-chain", "sample_step", "U-hat vanishes at a chamber point");
  double top = ctx.v.p() > 0.0 ? ctx.v.p() * ctx.v.v1(x) / U : 0.0;
  double bottom = ctx.v.q() > 0.0 ? ctx.v.q() * ctx.v.v2(x) / U : 0.0;
  const double sum = top + bottom;
  if (sum > 1.0) {
    top /= sum;
    bottom /= sum;
  }
  return {top, bottom};
}

}  // namespace

KernelStep sample_step(const CompactPoint& s, const HarmonicContext& ctx, int batch, RngStream& rng) {
  if (!s.valid()) throw PreconditionError("conditioned-chain", "sample_step", "invalid state");
  if (batch < 1) throw PreconditionError("conditioned-chain", "sample_step", "batch must be >= 1");
  KernelStep st;
  st.from = s;
  const std::size_t nf = s.finite.size();
  auto draw_from = [&](std::span<const double> base_pos) {
    return [&, base_pos](double* y) {
      for (std::size_t j = 0; j < base_pos.size(); ++j) y[j] = base_pos[j] + ctx.law.sample(rng);
    };
  };
  auto sub_v = [&](std::span<const double> y) { return ctx.v.V(y); };
  if (s.frozen == Frozen::None) {
    const std::span<const double> x(s.finite);
    const FreezeProbs fp = freeze_probs(x, ctx);
    const double u = rng.uniform();
    if (u < fp.top) {
      st.branch = Branch::FreezeTop;
      st.branch_prob_estimate = fp.top;
      auto y = resample(nf, batch, rng, draw_from(x), [&](std::span<const double> c) { return ctx.v.v1(c); });
      y.pop_back();
      st.to = CompactPoint::top_frozen(std::move(y));
    } else if (u < fp.top + fp.bottom) {
      st.branch = Branch::FreezeBottom;
      st.branch_prob_estimate = fp.bottom;
      auto y = resample(nf, batch, rng, draw_from(x), [&](std::span<const double> c) { return ctx.v.v2(c); });
      y.erase(y.begin());
      st.to = CompactPoint::bottom_frozen(std::move(y));
    } else {
      st.branch = Branch::StayW;
      st.branch_prob_estimate = 1.0 - fp.top - fp.bottom;
      auto y = resample(nf, batch, rng, draw_from(x),
                        [&](std::span<const double> c) { return in_chamber(c) ? ctx.U(c) : 0.0; });
      st.to = CompactPoint::in_chamber(std::move(y));
    }
    return st;
  }
  // Frozen strata: the (k-1)-walk h-transformed by V-hat.
  const std::span<const double> f(s.finite);
  auto y = resample(nf, batch, rng, draw_from(f), sub_v);
  st.branch_prob_estimate = 1.0;
  if (s.frozen == Frozen::TopPlusInfinity) {
    st.branch = Branch::FrozenTopMove;
    st.to = CompactPoint::top_frozen(std::move(y));
  } else {
    st.branch = Branch::FrozenBottomMove;
    st.to = CompactPoint::bottom_frozen(std::move(y));
  }
  return st;
}

Trajectory run_chain(const CompactPoint& s0, std::int64_t steps, const HarmonicContext& ctx, int batch,
                     RngStream& rng) {
  if (!s0.valid() || static_cast<int>(s0.dim()) != ctx.k) {
    throw PreconditionError("conditioned-chain", "run_chain", "invalid start state");
  }
  Trajectory t;
  t.steps.reserve(static_cast<std::size_t>(std::max<std::int64_t>(steps, 0)));
  CompactPoint s = s0;
  for (std::int64_t i = 0; i < steps; ++i) {
    KernelStep st = sample_step(s, ctx, batch, rng);
    if (st.branch == Branch::FreezeTop || st.branch == Branch::FreezeBottom) t.freeze_step = i;
    s = st.to;
    t.steps.push_back(std::move(st));
  }
  return t;
}

std::string trajectory_csv(const Trajectory& t) {
  std::ostringstream os;
  os.precision(17);
  std::size_t k = t.steps.empty() ? 0 : t.steps.front().from.dim();
  os << "step,branch";
  for (std::size_t i = 1; i <= k; ++i) os << ",x" << i;
  os << "\n";
  auto row = [&](std::int64_t step, const char* branch, const CompactPoint& p) {
    os << step << ',' << branch;
    if (p.frozen == Frozen::BottomMinusInfinity) os << ",-INF";
    for (double c : p.finite) os << ',' << c;
    if (p.frozen == Frozen::TopPlusInfinity) os << ",+INF";
    os << "\n";
  };
  if (!t.steps.empty()) row(0, "start", t.steps.front().from);
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    row(static_cast<std::int64_t>(i + 1), branch_name(t.steps[i].branch), t.steps[i].to);
  }
  return os.str();
}

std::vector<LifetimeSample> killed_chain_lifetime(std::span<const double> x, const HarmonicContext& ctx,
                                                  std::uint64_t samples, std::int64_t cap, int batch,
                                                  const RngStream& base) {
  if (!in_chamber(x)) throw PreconditionError("conditioned-chain", "killed_chain_lifetime", "x must lie in the chamber");
  const std::size_t k = x.size();
  auto parts = run_blocks(samples, [&](std::uint64_t b, std::uint64_t e) {
    std::vector<LifetimeSample> out;
    std::vector<double> pos(k);
    for (std::uint64_t i = b; i < e; ++i) {
      RngStream rng = path_stream(base, i);
      std::copy(x.begin(), x.end(), pos.begin());
      LifetimeSample ls;
      for (;;) {
        if (ls.lifetime >= cap) {
          ls.capped = true;
          break;
        }
        const double kill = ctx.v(pos) / ctx.U(pos);
        if (rng.uniform() < kill) break;
        pos = resample(k, batch, rng, [&](double* y) {
          for (std::size_t j = 0; j < k; ++j) y[j] = pos[j] + ctx.law.sample(rng);
        }, [&](std::span<const double> c) { return in_chamber(c) ? ctx.U(c) : 0.0; });
        ++ls.lifetime;
      }
      out.push_back(ls);
    }
    return out;
  }, 64);
  std::vector<LifetimeSample> all;
  for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
  return all;
}

std::vector<LifetimeSample> time_to_freeze(std::span<const double> x, const HarmonicContext& ctx,
                                           std::uint64_t samples, std::int64_t cap, int batch,
                                           const RngStream& base) {
  if (!in_chamber(x)) throw PreconditionError("conditioned-chain", "time_to_freeze", "x must lie in the chamber");
  auto parts = run_blocks(samples, [&](std::uint64_t b, std::uint64_t e) {
    std::vector<LifetimeSample> out;
    for (std::uint64_t i = b; i < e; ++i) {
      RngStream rng = path_stream(base, i);
      CompactPoint s = CompactPoint::in_chamber(std::vector<double>(x.begin(), x.end()));
      LifetimeSample ls;
      for (;;) {
        if (ls.lifetime >= cap) {
          ls.capped = true;
          break;
        }
        KernelStep st = sample_step(s, ctx, batch, rng);
        if (st.branch != Branch::StayW) break;
        s = std::move(st.to);
        ++ls.lifetime;
      }
      out.push_back(ls);
    }
    return out;
  }, 64);
  std::vector<LifetimeSample> all;
  for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
  return all;
}

}  // namespace ordwalk
