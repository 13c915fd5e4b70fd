#include "ordwalk/harmonic.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseLU>

#include <algorithm>
#include <bit>
#include <functional>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "ordwalk/parallel.hpp"
#include "ordwalk/walk.hpp"

namespace ordwalk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool ordered(std::span<const double> y) { return in_chamber(y); }

}  // namespace

HarmonicEstimate estimate_V(std::span<const double> y, const IncrementLaw& law,
                            const VEstimateOptions& opts, const RngStream& base) {
  const std::size_t m = y.size();
  if (m < 2 || !ordered(y)) {
    throw PreconditionError("harmonic", "estimate_V", "start must be strictly increasing");
  }
  const double d0 = vandermonde(y);
  const std::uint64_t N = opts.samples;
  std::vector<RngStream> streams;
  streams.reserve(N);
  for (std::uint64_t i = 0; i < N; ++i) streams.push_back(path_stream(base, i));
  std::vector<double> pos(N * m);
  for (std::uint64_t i = 0; i < N; ++i) std::copy(y.begin(), y.end(), pos.begin() + i * m);
  std::vector<char> alive(N, 1);
  std::vector<double> contrib(N, 0.0);  // -Delta at exit, accumulated

  HarmonicEstimate out;
  out.samples = N;
  std::int64_t t = 0;
  double prev = d0;
  bool have_prev = false;
  for (std::int64_t h = opts.first_horizon; h <= opts.max_horizon; h *= 2) {
    struct Stage {
      MomentSums diff;
      MomentSums total;
      void merge(const Stage& o) {
        diff.merge(o.diff);
        total.merge(o.total);
      }
    };
    const std::int64_t from = t;
    auto st = reduce_blocks<Stage>(N, [&](std::uint64_t b, std::uint64_t e) {
      Stage s;
      for (std::uint64_t i = b; i < e; ++i) {
        double added = 0.0;
        if (alive[i]) {
          double* p = pos.data() + i * m;
          RngStream& rng = streams[i];
          for (std::int64_t step = from; step < h; ++step) {
            for (std::size_t j = 0; j < m; ++j) p[j] += law.sample(rng);
            if (!ordered(std::span<const double>(p, m))) {
              added = -vandermonde(std::span<const double>(p, m));
              alive[i] = 0;
              break;
            }
          }
        }
        contrib[i] += added;
        s.diff.add(added);
        s.total.add(contrib[i]);
      }
      return s;
    });
    t = h;
    const double est = d0 + st.total.mean();
    out.value = est;
    out.std_error = st.total.std_error();
    out.n_used = h;
    if (have_prev) {
      const double delta = std::abs(est - prev);
      if (delta < std::max(3.0 * st.diff.std_error(), opts.rel_tol * std::abs(est))) return out;
    }
    prev = est;
    have_prev = true;
  }
  std::ostringstream os;
  os << "no stabilization up to horizon " << opts.max_horizon << " (last value " << out.value << " +- "
     << out.std_error << ")";
  throw NonStabilized("harmonic", "estimate_V", os.str());
}

HarmonicEstimate v1(std::span<const double> x, const IncrementLaw& law, const VEstimateOptions& opts,
                    const RngStream& base) {
  if (!in_chamber(x) || x.size() < 3) throw PreconditionError("harmonic", "v1", "x must lie in the chamber, k >= 3");
  return estimate_V(x.first(x.size() - 1), law, opts, base);
}

HarmonicEstimate v2(std::span<const double> x, const IncrementLaw& law, const VEstimateOptions& opts,
                    const RngStream& base) {
  if (!in_chamber(x) || x.size() < 3) throw PreconditionError("harmonic", "v2", "x must lie in the chamber, k >= 3");
  return estimate_V(x.subspan(1), law, opts, base);
}

namespace {

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0, p1 = z;
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    // Map [-1, 1] to [0, 1].
    x[i] = 0.5 * (1.0 - z);
    w[i] = 1.0 / ((1.0 - z * z) * dp * dp);
  }
}

struct GaussRule {
  std::vector<double> t, w;
};

// Quadrature for E[F(X); X > a] from fixed Gauss-Legendre rules on [0, 1],
// restricted to the part of each quantile piece above a.
void truncated_rule(const IncrementLaw& law, double a, const GaussRule& tail, const GaussRule& body,
                    double gamma, std::vector<double>& x, std::vector<double>& w) {
  x.clear();
  w.clear();
  if (law.degenerate()) {
    if (0.0 > a) {
      x.push_back(0.0);
      w.push_back(1.0);
    }
    return;
  }
  const double c = law.body_cut();
  const double al = law.alpha();
  const double wl = law.weight_left(), wb = law.weight_body(), wr = law.weight_right();
  if (wl > 0.0 && a < -c) {
    // u = wl t^gamma, X = -c t^(-gamma/alpha) > a  <=>  t > (-a/c)^(-alpha/gamma)
    const double lo = a == -kInf ? 0.0 : std::pow(-a / c, -al / gamma);
    const double len = 1.0 - lo;
    for (std::size_t i = 0; i < tail.t.size(); ++i) {
      const double t = lo + len * tail.t[i];
      x.push_back(-c * std::pow(t, -gamma / al));
      w.push_back(tail.w[i] * len * wl * gamma * std::pow(t, gamma - 1.0));
    }
  }
  if (wb > 0.0 && a < c) {
    const double u_lo = a <= -c ? wl : law.cdf(a);
    const double u_hi = wl + wb;
    const double len = u_hi - u_lo;
    if (len > 0.0) {
      for (std::size_t i = 0; i < body.t.size(); ++i) {
        x.push_back(law.quantile(u_lo + len * body.t[i]));
        w.push_back(body.w[i] * len);
      }
    }
  }
  if (wr > 0.0) {
    // u = 1 - wr t^gamma, X = c t^(-gamma/alpha) > a  <=>  t < (a/c)^(-alpha/gamma)
    const double hi = a > c ? std::pow(a / c, -al / gamma) : 1.0;
    for (std::size_t i = 0; i < tail.t.size(); ++i) {
      const double t = hi * tail.t[i];
      x.push_back(c * std::pow(t, -gamma / al));
      w.push_back(tail.w[i] * hi * wr * gamma * std::pow(t, gamma - 1.0));
    }
  }
}

}  // namespace

void quantile_rule_1d(const IncrementLaw& law, int tail_points, int body_points, double gamma,
                      std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.clear();
  weights.clear();
  if (law.degenerate()) {
    nodes.push_back(0.0);
    weights.push_back(1.0);
    return;
  }
  std::vector<double> t, tw;
  const double c = law.body_cut();
  const double a = law.alpha();
  if (law.weight_left() > 0.0) {
    gauss_legendre(tail_points, t, tw);
    for (std::size_t i = 0; i < t.size(); ++i) {
      // u = w t^gamma, X = -c t^(-gamma/alpha).
      nodes.push_back(-c * std::pow(t[i], -gamma / a));
      weights.push_back(tw[i] * law.weight_left() * gamma * std::pow(t[i], gamma - 1.0));
    }
  }
  if (law.weight_body() > 0.0) {
    gauss_legendre(body_points, t, tw);
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double u = law.weight_left() + law.weight_body() * t[i];
      nodes.push_back(law.quantile(u));
      weights.push_back(tw[i] * law.weight_body());
    }
  }
  if (law.weight_right() > 0.0) {
    gauss_legendre(tail_points, t, tw);
    for (std::size_t i = 0; i < t.size(); ++i) {
      nodes.push_back(c * std::pow(t[i], -gamma / a));
      weights.push_back(tw[i] * law.weight_right() * gamma * std::pow(t[i], gamma - 1.0));
    }
  }
}

StepRule tensor_step_rule(const IncrementLaw& law, int walkers, int tail_points, int body_points,
                          double gamma) {
  std::vector<double> x, w;
  quantile_rule_1d(law, tail_points, body_points, gamma, x, w);
  StepRule rule;
  rule.walkers = walkers;
  std::size_t total = 1;
  for (int i = 0; i < walkers; ++i) total *= x.size();
  rule.increments.resize(total * walkers);
  rule.weights.resize(total);
  std::vector<std::size_t> idx(walkers, 0);
  for (std::size_t r = 0; r < total; ++r) {
    double wt = 1.0;
    for (int i = 0; i < walkers; ++i) {
      rule.increments[r * walkers + i] = x[idx[i]];
      wt *= w[idx[i]];
    }
    rule.weights[r] = wt;
    for (int i = walkers - 1; i >= 0; --i) {
      if (++idx[i] < x.size()) break;
      idx[i] = 0;
    }
  }
  return rule;
}

StepRule mc_step_rule(const IncrementLaw& law, int walkers, std::uint64_t samples, double eta,
                      const RngStream& base) {
  // Proposal tail index: heavier than the target and light enough that
  // Delta_1-weighted sums have finite variance.
  const double a = law.alpha();
  const double beta = std::max(0.25, std::min(a, 2.0 * a - 2.0 * walkers + 2.0) - 0.5);
  const HeavyTailProposal prop(law, eta, beta);
  StepRule rule;
  rule.walkers = walkers;
  rule.increments.resize(samples * walkers);
  rule.weights.resize(samples);
  RngStream rng = base.child("step-rule");
  for (std::uint64_t r = 0; r < samples; ++r) {
    double lw = 0.0;
    for (int i = 0; i < walkers; ++i) {
      const auto d = prop.sample(rng);
      rule.increments[r * walkers + i] = d.value;
      lw += d.log_weight;
    }
    rule.weights[r] = std::exp(lw) / static_cast<double>(samples);
  }
  return rule;
}

std::uint64_t LatticeSpec::hash() const {
  std::uint64_t h = 0x1a77ce5ull;
  for (double v : {static_cast<double>(nodes), static_cast<double>(order), sigma, static_cast<double>(tail_points),
                   static_cast<double>(body_points), gamma, static_cast<double>(mc_samples), eta, static_cast<double>(quadrature_walkers)}) {
    h = splitmix64(h ^ std::bit_cast<std::uint64_t>(v));
  }
  return h;
}

LatticeSpec LatticeSpec::green_defaults() {
  LatticeSpec s;
  s.nodes = 16;
  s.order = 1;
  s.mc_samples = 50000;
  return s;
}

std::uint64_t GapSurrogate::make_key(SurrogateKind kind, int walkers, const IncrementLaw& law, const LatticeSpec& spec,
                                     std::uint64_t source_key) {
  std::uint64_t h = splitmix64(law.hash() ^ splitmix64(static_cast<std::uint64_t>(walkers)) ^ (spec.hash() << 1));
  h = splitmix64(h ^ static_cast<std::uint64_t>(kind));
  return splitmix64(h ^ source_key);
}

namespace {

// Product over pairs inside each cluster of consecutive finite gaps of
// (1 + distance). Infinite gaps separate clusters.
double delta1_clusters(const double* g, int d) {
  double prod = 1.0;
  for (int i = 0; i < d; ++i) {
    double dist = 0.0;
    for (int j = i; j < d; ++j) {
      if (g[j] == kInf) break;
      dist += g[j];
      prod *= 1.0 + dist;
    }
  }
  return prod;
}

// Interpolation weights of the lattice nodes around s (cells of width 1/n
// per axis): multilinear for order 1, tensor 4-point Lagrange for order 3
// (shifted inward at the ends of the axis).
template <class Fn>
void for_each_stencil(const double* s, int d, int n, int order, Fn&& fn) {
  const int width = order == 3 ? 4 : 2;
  int first[8];
  double w1[8][4];
  for (int i = 0; i < d; ++i) {
    const double x = std::clamp(s[i], 0.0, 1.0) * n;
    int c = static_cast<int>(x);
    if (c >= n) c = n - 1;
    if (width == 2) {
      first[i] = c;
      w1[i][0] = 1.0 - (x - c);
      w1[i][1] = x - c;
    } else {
      const int f = std::clamp(c - 1, 0, n - 3);
      first[i] = f;
      for (int a = 0; a < 4; ++a) {
        double w = 1.0;
        for (int b = 0; b < 4; ++b) {
          if (b != a) w *= (x - (f + b)) / static_cast<double>(a - b);
        }
        w1[i][a] = w;
      }
    }
  }
  int idx[8] = {0};
  const int side = n + 1;
  for (;;) {
    double w = 1.0;
    std::size_t flat = 0;
    for (int i = 0; i < d; ++i) {
      w *= w1[i][idx[i]];
      flat = flat * side + first[i] + idx[i];
    }
    if (w != 0.0) fn(flat, w);
    int i = d - 1;
    for (; i >= 0; --i) {
      if (++idx[i] < width) break;
      idx[i] = 0;
    }
    if (i < 0) return;
  }
}

}  // namespace

double GapSurrogate::interp(const double* s) const {
  double acc = 0.0;
  for_each_stencil(s, dims(), n_, order_, [&](std::size_t flat, double w) { acc += w * r_[flat]; });
  return acc;
}

double GapSurrogate::ratio(std::span<const double> gaps) const {
  double s[8]{};
  for (int i = 0; i < dims(); ++i) s[i] = gap_to_s(gaps[i], sigma_);
  return interp(s);
}

double GapSurrogate::from_gaps(std::span<const double> gaps) const {
  for (double g : gaps) {
    if (!(g > 0.0)) return 0.0;
  }
  return ratio(gaps) * delta1_clusters(gaps.data(), dims());
}

double GapSurrogate::operator()(std::span<const double> y) const {
  double g[8];
  for (int i = 0; i < dims(); ++i) {
    g[i] = y[i + 1] - y[i];
    if (!(g[i] > 0.0)) return 0.0;
  }
  return from_gaps(std::span<const double>(g, dims()));
}

GapSurrogate GapSurrogate::build_harmonic(int walkers, const IncrementLaw& law, const LatticeSpec& spec,
                                          const RngStream& base) {
  GapSurrogate v = prepare(SurrogateKind::Harmonic, walkers, law, spec);
  v.key_ = make_key(SurrogateKind::Harmonic, walkers, law, spec, 0);
  v.solve(law, spec, base, nullptr);
  return v;
}

GapSurrogate GapSurrogate::build_green(const VFunction& vf, const IncrementLaw& law, const LatticeSpec& spec,
                                       const RngStream& base) {
  const int k = vf.k();
  GapSurrogate u = prepare(SurrogateKind::Green, k, law, spec);
  u.key_ = make_key(SurrogateKind::Green, k, law, spec, vf.surrogate() ? vf.surrogate()->key() : 0);
  const std::function<double(const double*)> source = [&vf, k](const double* g) {
    double y[10];
    y[0] = 0.0;
    for (int i = 1; i < k; ++i) y[i] = y[i - 1] + g[i - 1];
    return vf(std::span<const double>(y, static_cast<std::size_t>(k)));
  };
  u.solve(law, spec, base, &source);
  return u;
}

GapSurrogate GapSurrogate::prepare(SurrogateKind kind, int walkers, const IncrementLaw& law, const LatticeSpec& spec) {
  if (walkers < 2 || walkers > 9) throw PreconditionError("harmonic", "GapSurrogate::build", "walkers must be in [2, 9]");
  if (spec.nodes < 2) throw PreconditionError("harmonic", "GapSurrogate::build", "lattice needs >= 2 cells per axis");
  if (spec.order != 1 && spec.order != 3) throw PreconditionError("harmonic", "GapSurrogate::build", "order must be 1 or 3");
  if (spec.order == 3 && spec.nodes < 3) throw PreconditionError("harmonic", "GapSurrogate::build", "cubic lattice needs >= 3 cells");
  GapSurrogate v;
  v.kind_ = kind;
  v.walkers_ = walkers;
  v.n_ = spec.nodes;
  v.order_ = spec.order;
  const double var = law.variance();
  v.sigma_ = spec.sigma > 0.0 ? spec.sigma : (std::isfinite(var) && var > 0.0 ? std::sqrt(var) : law.body_cut());
  return v;
}

// Assembles and solves the lattice equation for R = F / Delta_1. Harmonic:
// R(a) = E[R(a') Delta_1(a') / Delta_1(a); no exit], with R = 1 at the
// all-infinite corner. Green (source f): the same plus f(a) / Delta_1(a) on
// the right, with R = 0 on every face that has an infinite gap.
void GapSurrogate::solve(const IncrementLaw& law, const LatticeSpec& spec, const RngStream& base,
                         const std::function<double(const double*)>* source) {
  GapSurrogate& v = *this;
  const int walkers = walkers_;
  const bool green = source != nullptr;
  const int d = walkers - 1;
  const int side = spec.nodes + 1;
  std::size_t M = 1;
  for (int i = 0; i < d; ++i) M *= side;

  // Up to three walkers the one-step expectation is nested quadrature:
  // X_1 over the full law, then X_{i+1} over {X_{i+1} > X_i - g_i}, so the
  // killing boundary is never cut by a rule. More walkers use a shared
  // Monte Carlo rule.
  const bool nested = walkers <= spec.quadrature_walkers;
  GaussRule tail_gl, body_gl;
  gauss_legendre(spec.tail_points, tail_gl.t, tail_gl.w);
  gauss_legendre(spec.body_points, body_gl.t, body_gl.w);
  StepRule rule;
  std::vector<double> dg;
  if (!nested) {
    rule = mc_step_rule(law, walkers, spec.mc_samples, spec.eta, base);
    dg.resize(rule.size() * d);
    for (std::size_t r = 0; r < rule.size(); ++r) {
      const double* x = rule.point(r);
      for (int i = 0; i < d; ++i) dg[r * d + i] = x[i + 1] - x[i];
    }
  }

  auto node_gaps = [&](std::size_t flat, double* g, double* s) {
    for (int i = d - 1; i >= 0; --i) {
      const int j = static_cast<int>(flat % side);
      flat /= side;
      s[i] = static_cast<double>(j) / spec.nodes;
      g[i] = j == 0 ? kInf : v.sigma_ * (1.0 / (s[i] * s[i]) - 1.0);
    }
  };

  v.r_.assign(M, 1.0);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(M));
  auto parts = run_blocks(M, [&](std::uint64_t b, std::uint64_t e) {
    std::vector<Eigen::Triplet<double>> trip;
    std::vector<double> row(M, 0.0);
    std::vector<char> mark(M, 0);
    std::vector<std::size_t> touched;
    double g[8], s[8], gp[8];
    std::vector<double> qx[10], qw[10];
    for (std::uint64_t a = b; a < e; ++a) {
      node_gaps(a, g, s);
      bool all_inf = true, any_inf = false;
      for (int i = 0; i < d; ++i) {
        all_inf = all_inf && g[i] == kInf;
        any_inf = any_inf || g[i] == kInf;
      }
      trip.emplace_back(static_cast<int>(a), static_cast<int>(a), 1.0);
      if (green ? any_inf : all_inf) {
        rhs[static_cast<Eigen::Index>(a)] = green ? 0.0 : 1.0;
        continue;
      }
      const double base_d1 = delta1_clusters(g, d);
      if (green) rhs[static_cast<Eigen::Index>(a)] = (*source)(g) / base_d1;
      touched.clear();
      auto accumulate = [&](const double* gp, double wt) {
        double sp[8];
        for (int i = 0; i < d; ++i) sp[i] = gap_to_s(gp[i], v.sigma_);
        const double val = wt * delta1_clusters(gp, d) / base_d1;
        for_each_stencil(sp, d, spec.nodes, spec.order, [&](std::size_t flat, double w) {
          if (!mark[flat]) {
            mark[flat] = 1;
            touched.push_back(flat);
          }
          row[flat] += val * w;
        });
      };
      if (nested) {
        // Depth-first over walkers; xs[j] is the increment of walker j.
        double xs[10];
        auto rec = [&](auto&& self, int j, double wt) -> void {
          if (j == walkers) {
            for (int i = 0; i < d; ++i) gp[i] = g[i] == kInf ? kInf : g[i] + xs[i + 1] - xs[i];
            accumulate(gp, wt);
            return;
          }
          const double lo = j == 0 || g[j - 1] == kInf ? -kInf : xs[j - 1] - g[j - 1];
          truncated_rule(law, lo, tail_gl, body_gl, spec.gamma, qx[j], qw[j]);
          for (std::size_t r = 0; r < qx[j].size(); ++r) {
            xs[j] = qx[j][r];
            self(self, j + 1, wt * qw[j][r]);
          }
        };
        rec(rec, 0, 1.0);
      } else {
        for (std::size_t r = 0; r < rule.size(); ++r) {
          bool ok = true;
          for (int i = 0; i < d; ++i) {
            gp[i] = g[i] == kInf ? kInf : g[i] + dg[r * d + i];
            if (!(gp[i] > 0.0)) {
              ok = false;
              break;
            }
          }
          if (ok) accumulate(gp, rule.weights[r]);
        }
      }
      std::sort(touched.begin(), touched.end());
      for (std::size_t f : touched) {
        trip.emplace_back(static_cast<int>(a), static_cast<int>(f), -row[f]);
        row[f] = 0.0;
        mark[f] = 0;
      }
    }
    return trip;
  }, 64);

  std::vector<Eigen::Triplet<double>> all;
  for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
  Eigen::VectorXd sol;
  if (M <= 4000) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(M), static_cast<Eigen::Index>(M));
    for (const auto& t : all) A(t.row(), t.col()) += t.value();
    sol = A.partialPivLu().solve(rhs);
  } else {
    Eigen::SparseMatrix<double> A(static_cast<Eigen::Index>(M), static_cast<Eigen::Index>(M));
    A.setFromTriplets(all.begin(), all.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success) {
      throw NonStabilized("harmonic", "GapSurrogate::build", "lattice system is singular");
    }
    sol = lu.solve(rhs);
  }
  for (std::size_t i = 0; i < M; ++i) v.r_[i] = sol[static_cast<Eigen::Index>(i)];
}

void GapSurrogate::save(std::ostream& out) const {
  const char magic[8] = {'O', 'W', 'V', 'S', 'U', 'R', 'R', '1'};
  out.write(magic, 8);
  auto put = [&](auto v) { out.write(reinterpret_cast<const char*>(&v), sizeof(v)); };
  put(static_cast<std::uint32_t>(1));
  put(key_);
  put(static_cast<std::int32_t>(kind_));
  put(static_cast<std::int32_t>(walkers_));
  put(static_cast<std::int32_t>(n_));
  put(static_cast<std::int32_t>(order_));
  put(sigma_);
  put(static_cast<std::uint64_t>(r_.size()));
  out.write(reinterpret_cast<const char*>(r_.data()), static_cast<std::streamsize>(r_.size() * sizeof(double)));
}

GapSurrogate GapSurrogate::load(std::istream& in, std::uint64_t expected_key) {
  char magic[8];
  in.read(magic, 8);
  if (!in || std::string(magic, 8) != "OWVSURR1") throw ConfigError("harmonic", "GapSurrogate::load", "not a surrogate cache file");
  auto get = [&](auto& v) { in.read(reinterpret_cast<char*>(&v), sizeof(v)); };
  std::uint32_t version = 0;
  std::int32_t kind = 0, walkers = 0, n = 0, order = 1;
  std::uint64_t count = 0;
  GapSurrogate v;
  get(version);
  get(v.key_);
  get(kind);
  get(walkers);
  get(n);
  get(order);
  get(v.sigma_);
  get(count);
  if (!in || version != 1) throw ConfigError("harmonic", "GapSurrogate::load", "unsupported cache version");
  if (v.key_ != expected_key) throw ConfigError("harmonic", "GapSurrogate::load", "cache key does not match law/lattice");
  v.kind_ = static_cast<SurrogateKind>(kind);
  v.walkers_ = walkers;
  v.n_ = n;
  v.order_ = order;
  v.r_.resize(count);
  in.read(reinterpret_cast<char*>(v.r_.data()), static_cast<std::streamsize>(count * sizeof(double)));
  if (!in) throw ConfigError("harmonic", "GapSurrogate::load", "truncated cache file");
  return v;
}

}  // namespace ordwalk
