#include <algorithm>
#include <cmath>
#include <sstream>

#include "ordwalk/harmonic.hpp"
#include "ordwalk/parallel.hpp"
#include "ordwalk/walk.hpp"

namespace ordwalk {

VFunction::VFunction(const IncrementLaw& law, int k, std::shared_ptr<const GapSurrogate> surrogate)
    : k_(k), sur_(std::move(surrogate)) {
  if (k < 2) throw PreconditionError("harmonic", "VFunction", "k must be >= 2");
  if (k > 2 && (!sur_ || sur_->walkers() != k - 1)) {
    throw PreconditionError("harmonic", "VFunction", "surrogate must be built for k-1 walkers");
  }
  const double wp = law.weight_right(), wm = law.weight_left();
  // Mixing weights are the tail constants p, q of the law.
  const double c = law.body_cut();
  const double a = law.alpha();
  p_ = c > 0.0 ? wp * std::pow(c, a) : 0.0;
  q_ = c > 0.0 ? wm * std::pow(c, a) : 0.0;
}

VFunction::VFunction(int k, std::shared_ptr<const GapSurrogate> surrogate, double p_weight, double q_weight)
    : k_(k), p_(p_weight), q_(q_weight), sur_(std::move(surrogate)) {
  if (k < 2) throw PreconditionError("harmonic", "VFunction", "k must be >= 2");
  if (k > 2 && (!sur_ || sur_->walkers() != k - 1)) {
    throw PreconditionError("harmonic", "VFunction", "surrogate must be built for k-1 walkers");
  }
  if (!(p_weight >= 0.0) || !(q_weight >= 0.0)) throw PreconditionError("harmonic", "VFunction", "weights must be >= 0");
}

double VFunction::V(std::span<const double> y) const {
  if (k_ == 2) return 1.0;
  return (*sur_)(y);
}

namespace {

// Per-term sums for the two halves p v1 and q v2 of v, plus per-path partial
// sums. Dead paths contribute zeros, which are implicit.
struct SeriesAcc {
  std::vector<double> a1, a2, b1, b2, t1, t2;
  MomentSums pa, pb, pt;
  double pab = 0.0;

  explicit SeriesAcc(std::size_t terms = 0)
      : a1(terms), a2(terms), b1(terms), b2(terms), t1(terms), t2(terms) {}
  void merge(const SeriesAcc& o) {
    if (a1.empty()) *this = SeriesAcc(o.a1.size());
    for (std::size_t i = 0; i < a1.size(); ++i) {
      a1[i] += o.a1[i];
      a2[i] += o.a2[i];
      b1[i] += o.b1[i];
      b2[i] += o.b2[i];
      t1[i] += o.t1[i];
      t2[i] += o.t2[i];
    }
    pa.merge(o.pa);
    pb.merge(o.pb);
    pt.merge(o.pt);
    pab += o.pab;
  }
};

SeriesAcc run_series(std::span<const double> x, const IncrementLaw& law, const VFunction& v, int L,
                     int shift, std::uint64_t samples, const RngStream& base) {
  const std::size_t k = x.size();
  const std::size_t terms = static_cast<std::size_t>(L) + 1;
  return reduce_blocks<SeriesAcc>(samples, [&](std::uint64_t b, std::uint64_t e) {
    SeriesAcc acc(terms);
    std::vector<double> pos(k);
    for (std::uint64_t i = b; i < e; ++i) {
      RngStream rng = path_stream(base, i);
      std::copy(x.begin(), x.end(), pos.begin());
      double sa = 0.0, sb = 0.0;
      for (int l = 0; l <= L + shift; ++l) {
        if (l > 0) {
          for (auto& p : pos) p += law.sample(rng);
          if (!in_chamber(pos)) break;
        }
        if (l < shift) continue;
        const std::size_t t = static_cast<std::size_t>(l - shift);
        const double va = v.p() > 0.0 ? v.p() * v.v1(pos) : 0.0;
        const double vb = v.q() > 0.0 ? v.q() * v.v2(pos) : 0.0;
        acc.a1[t] += va;
        acc.a2[t] += va * va;
        acc.b1[t] += vb;
        acc.b2[t] += vb * vb;
        acc.t1[t] += va + vb;
        acc.t2[t] += (va + vb) * (va + vb);
        sa += va;
        sb += vb;
      }
      acc.pa.add(sa);
      acc.pb.add(sb);
      acc.pt.add(sa + sb);
      acc.pab += sa * sb;
    }
    return acc;
  });
}

USeriesEstimate make_series(const std::vector<double>& s1, const std::vector<double>& s2,
                            const MomentSums& partial, std::uint64_t samples, int L, const RngStream& base) {
  USeriesEstimate est;
  est.truncation = L;
  const double n = static_cast<double>(samples);
  for (std::size_t t = 0; t < s1.size(); ++t) {
    MomentSums m{n, s1[t], s2[t]};
    McEstimate e;
    e.value = m.mean();
    e.std_error = m.std_error();
    e.samples = samples;
    e.seed = base.seed();
    e.stream = base.stream_id();
    est.terms.push_back(e);
  }
  est.partial_sum = partial.mean();
  est.partial_stderr = partial.std_error();
  return est;
}

}  // namespace

void extrapolate_series_tail(USeriesEstimate& est, double max_tail_fraction, bool allow_tail_dominance) {
  const int L = est.truncation;
  std::vector<double> lx, ly, lw;
  for (int l = std::max(1, L / 2); l <= L; ++l) {
    const McEstimate& t = est.terms[static_cast<std::size_t>(l)];
    if (!(t.value > 0.0) || !(t.std_error > 0.0)) continue;
    lx.push_back(std::log(static_cast<double>(l)));
    ly.push_back(std::log(t.value));
    const double rel = t.std_error / t.value;
    lw.push_back(1.0 / (rel * rel));
  }
  est.tail_bound = 0.0;
  est.tail_stderr = 0.0;
  est.tail_dominates = false;
  bool all_zero = true;
  for (int l = std::max(1, L / 2); l <= L; ++l) all_zero = all_zero && est.terms[static_cast<std::size_t>(l)].value == 0.0;
  if (all_zero) {
    // Every path has left the chamber: nothing to extrapolate.
    est.beta = std::numeric_limits<double>::infinity();
  } else if (lx.size() < 3) {
    est.tail_bound = std::numeric_limits<double>::infinity();
    est.beta = 0.0;
  } else {
    const LineFit fit = wls_fit(lx, ly, lw);
    est.beta = -fit.slope;
    est.beta_stderr = fit.slope_se;
    if (est.beta <= 1.0) {
      est.tail_bound = std::numeric_limits<double>::infinity();
    } else {
      // sum_{l > L} c l^-beta ~ integral from L + 1/2 (midpoint rule).
      const double lo = L + 0.5;
      const double c = std::exp(fit.intercept);
      const double T = c * std::pow(lo, 1.0 - est.beta) / (est.beta - 1.0);
      const double dT_da = T;
      const double dT_db = T * (std::log(lo) + 1.0 / (est.beta - 1.0));  // d/d(slope)
      const double var = dT_da * dT_da * fit.intercept_se * fit.intercept_se +
                         dT_db * dT_db * fit.slope_se * fit.slope_se + 2.0 * dT_da * dT_db * fit.cov;
      est.tail_bound = T;
      est.tail_stderr = std::sqrt(std::max(0.0, var));
    }
  }
  // A tail that cannot be fitted is reported but kept out of the total.
  const bool finite_tail = std::isfinite(est.tail_bound);
  est.total = est.partial_sum + (finite_tail ? est.tail_bound : 0.0);
  est.total_stderr = std::hypot(est.partial_stderr, finite_tail ? est.tail_stderr : 0.0);
  if (!(est.tail_bound <= max_tail_fraction * est.partial_sum)) {
    est.tail_dominates = true;
    if (!allow_tail_dominance) {
      std::ostringstream os;
      os << "extrapolated tail " << est.tail_bound << " exceeds " << max_tail_fraction
         << " of the partial sum " << est.partial_sum << " (beta " << est.beta << "); raise the truncation";
      throw TailDominates("harmonic", "estimate_U", os.str());
    }
  }
}

USeriesEstimate estimate_U(std::span<const double> x, const IncrementLaw& law, const VFunction& v,
                           const USeriesOptions& opts, const RngStream& base) {
  if (!in_chamber(x)) throw PreconditionError("harmonic", "estimate_U", "x must lie in the chamber");
  if (opts.truncation < 1) throw PreconditionError("harmonic", "estimate_U", "truncation must be >= 1");
  if (static_cast<int>(x.size()) != v.k()) throw PreconditionError("harmonic", "estimate_U", "dimension mismatch");
  const SeriesAcc acc = run_series(x, law, v, opts.truncation, opts.shift, opts.samples, base);
  USeriesEstimate est = make_series(acc.t1, acc.t2, acc.pt, opts.samples, opts.truncation, base);
  extrapolate_series_tail(est, opts.max_tail_fraction, opts.allow_tail_dominance);
  return est;
}

MixtureWeights mixture_weights(std::span<const double> x, const IncrementLaw& law, const VFunction& v,
                               const USeriesOptions& opts, const RngStream& base) {
  if (!in_chamber(x)) throw PreconditionError("harmonic", "mixture_weights", "x must lie in the chamber");
  if (opts.truncation < 1) throw PreconditionError("harmonic", "mixture_weights", "truncation must be >= 1");
  const SeriesAcc acc = run_series(x, law, v, opts.truncation, opts.shift, opts.samples, base);
  MixtureWeights out;
  out.u = make_series(acc.t1, acc.t2, acc.pt, opts.samples, opts.truncation, base);
  out.u1 = make_series(acc.a1, acc.a2, acc.pa, opts.samples, opts.truncation, base);
  out.u2 = make_series(acc.b1, acc.b2, acc.pb, opts.samples, opts.truncation, base);
  extrapolate_series_tail(out.u, opts.max_tail_fraction, opts.allow_tail_dominance);
  // A one-sided law has an identically zero half; it needs no tail.
  auto half = [&](USeriesEstimate& h) {
    if (h.partial_sum > 0.0) {
      extrapolate_series_tail(h, opts.max_tail_fraction, opts.allow_tail_dominance);
    } else {
      h.total = 0.0;
    }
  };
  half(out.u1);
  half(out.u2);
  // Ratios of totals; errors by the delta method on the per-path sums, the
  // two numerators sharing the denominator's paths.
  const double n = acc.pt.n;
  const double mean_a = acc.pa.mean(), mean_b = acc.pb.mean();
  const double cov_ab = n > 1 ? (acc.pab - n * mean_a * mean_b) / (n - 1.0) / n : 0.0;
  const double var_a = out.u1.total_stderr * out.u1.total_stderr;
  const double var_b = out.u2.total_stderr * out.u2.total_stderr;
  const double A = out.u1.total, B = out.u2.total, D = A + B;
  if (!(D > 0.0)) throw DenominatorVanishes("harmonic", "mixture_weights", "U(x) estimate is zero");
  // p = A / (A + B): dp/dA = B / D^2, dp/dB = -A / D^2.
  const double var_p = (B * B * var_a + A * A * var_b - 2.0 * A * B * cov_ab) / (D * D * D * D);
  const double se = std::sqrt(std::max(0.0, var_p));
  for (McEstimate* e : {&out.p_of_x, &out.q_of_x}) {
    e->std_error = se;
    e->samples = opts.samples;
    e->seed = base.seed();
    e->stream = base.stream_id();
  }
  out.p_of_x.value = A / D;
  out.q_of_x.value = B / D;
  return out;
}

TelescopeCheck u_telescope(std::span<const double> x, const IncrementLaw& law, const VFunction& v,
                           const USeriesOptions& opts, const RngStream& base) {
  TelescopeCheck out;
  USeriesOptions o = opts;
  o.shift = 0;
  out.u = estimate_U(x, law, v, o, base.child("telescope-u"));
  o.shift = 1;
  out.u_next = estimate_U(x, law, v, o, base.child("telescope-next"));
  out.v_x = v(x);
  out.difference.value = out.u.total - out.u_next.total;
  out.difference.std_error = std::hypot(out.u.total_stderr, out.u_next.total_stderr);
  out.difference.samples = opts.samples;
  out.difference.seed = base.seed();
  out.difference.stream = base.stream_id();
  out.consistent = std::abs(out.difference.value - out.v_x) <= 3.0 * out.difference.std_error;
  return out;
}

std::vector<McEstimate> one_step_means(std::span<const double> y, const IncrementLaw& law,
                                       const std::vector<std::function<double(std::span<const double>)>>& fns,
                                       int degree, std::uint64_t samples, const RngStream& base, double eta) {
  const double a = law.alpha();
  const double beta = std::max(0.25, std::min(a, 2.0 * a - 2.0 * degree) - 0.5);
  const HeavyTailProposal prop(law, law.has_heavy_tails() ? eta : 0.0, beta);
  const std::size_t nf = fns.size(), k = y.size();
  struct Acc {
    std::vector<MomentSums> m;
    void merge(const Acc& o) {
      if (m.size() < o.m.size()) m.resize(o.m.size());
      for (std::size_t j = 0; j < o.m.size(); ++j) m[j].merge(o.m[j]);
    }
  };
  const RngStream one = base.child("one-step-means");
  const Acc acc = reduce_blocks<Acc>(samples, [&](std::uint64_t b, std::uint64_t e) {
    Acc out;
    out.m.resize(nf + 1);
    std::vector<double> z(k);
    for (std::uint64_t i = b; i < e; ++i) {
      RngStream rng = path_stream(one, i);
      double lw = 0.0;
      for (std::size_t c = 0; c < k; ++c) {
        const auto d = prop.sample(rng);
        z[c] = y[c] + d.value;
        lw += d.log_weight;
      }
      const double w = std::exp(lw);
      double tot = 0.0;
      for (std::size_t j = 0; j < nf; ++j) {
        const double h = w * fns[j](z);
        out.m[j].add(h);
        tot += h;
      }
      out.m[nf].add(tot);
    }
    return out;
  });
  std::vector<McEstimate> res(nf + 1);
  for (std::size_t j = 0; j <= nf; ++j) {
    res[j].value = acc.m[j].mean();
    res[j].std_error = acc.m[j].std_error();
    res[j].samples = samples;
    res[j].seed = base.seed();
    res[j].stream = base.stream_id();
  }
  return res;
}

McEstimate harmonic_ratio(std::span<const double> y, const IncrementLaw& law, const GapSurrogate& v_hat,
                          std::uint64_t samples, const RngStream& base) {
  const double v0 = v_hat(y);
  if (!(v0 > 0.0)) throw PreconditionError("harmonic", "harmonic_ratio", "V-hat(y) must be positive");
  const std::vector<std::function<double(std::span<const double>)>> fns{
      [&](std::span<const double> z) { return v_hat(z); }};
  auto m = one_step_means(y, law, fns, static_cast<int>(y.size()) - 1, samples, base);
  McEstimate r = m[0];
  r.value /= v0;
  r.std_error /= v0;
  return r;
}

}  // namespace ordwalk
