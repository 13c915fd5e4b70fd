#include "ordwalk/brownian.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ordwalk/core.hpp"
#include "ordwalk/errors.hpp"
#include "ordwalk/parallel.hpp"
#include "ordwalk/walk.hpp"

namespace ordwalk {

namespace {

constexpr const char* kModule = "bm-reference";

bool strictly_increasing(const std::vector<double>& x) {
  for (std::size_t i = 1; i < x.size(); ++i)
    if (!(x[i - 1] < x[i])) return false;
  return true;
}

double min_gap(const std::vector<double>& x) {
  double g = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < x.size(); ++i) g = std::min(g, x[i] - x[i - 1]);
  return g;
}

void dyson_drift(const std::vector<double>& x, std::vector<double>& b) {
  const std::size_t n = x.size();
  std::fill(b.begin(), b.end(), 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double r = 1.0 / (x[i] - x[j]);
      b[i] += r;
      b[j] -= r;
    }
}

struct StepContext {
  RngStream& rng;
  int max_halvings;
  std::vector<double> drift, next;
};

// One Euler step of every process with a shared Brownian increment (process
// p uses the first dim(p) coordinates); on a crossing in any of them the
// increment is split along its bridge and both halves are taken in turn.
void try_step(std::vector<std::vector<double>>& xs, double h, const std::vector<double>& dw, StepContext& c,
              int depth) {
  bool ok = true;
  for (auto& x : xs) {
    c.drift.resize(x.size());
    c.next.resize(x.size());
    dyson_drift(x, c.drift);
    for (std::size_t i = 0; i < x.size(); ++i) c.next[i] = x[i] + c.drift[i] * h + dw[i];
    if (!strictly_increasing(c.next)) {
      ok = false;
      break;
    }
  }
  if (ok) {
    for (auto& x : xs) {
      c.drift.resize(x.size());
      dyson_drift(x, c.drift);
      for (std::size_t i = 0; i < x.size(); ++i) x[i] += c.drift[i] * h + dw[i];
    }
    return;
  }
  if (depth >= c.max_halvings)
    throw StepSizeUnderflow(kModule, "simulate_dyson",
                            "step halved 20 times without keeping the ordering; reduce dt");
  std::vector<double> first(dw.size()), second(dw.size());
  const double sd = std::sqrt(0.25 * h);
  for (std::size_t i = 0; i < dw.size(); ++i) {
    first[i] = 0.5 * dw[i] + sd * c.rng.normal();
    second[i] = dw[i] - first[i];
  }
  try_step(xs, 0.5 * h, first, c, depth + 1);
  try_step(xs, 0.5 * h, second, c, depth + 1);
}

std::vector<double> gl_nodes8() {
  return {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
          0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
}
std::vector<double> gl_weights8() {
  return {0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
          0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};
}

// Integral of g(u) over [u0, u1] by composite 8-point Gauss-Legendre.
double integrate(const std::function<double(double)>& g, double u0, double u1, int panels) {
  static const auto xs = gl_nodes8();
  static const auto ws = gl_weights8();
  const double h = (u1 - u0) / panels;
  double s = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = u0 + (p + 0.5) * h;
    for (int j = 0; j < 8; ++j) s += ws[j] * g(mid + 0.5 * h * xs[j]);
  }
  return 0.5 * h * s;
}

double inv_vandermonde(const double* x, int n) {
  double d = 1.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) d *= x[j] - x[i];
  return 1.0 / d;
}

}  // namespace

std::vector<double> normal_order_means(int n) {
  std::vector<double> out(n, 0.0);
  if (n <= 1) return out;
  // E Z_(i) = int z n C(n-1, i-1) Phi^(i-1) (1-Phi)^(n-i) phi dz, trapezoid on [-12, 12].
  const int m = 24000;
  const double lo = -12.0, h = 24.0 / m;
  std::vector<double> logc(n);
  for (int i = 1; i <= n; ++i)
    logc[i - 1] = std::log(n) + std::lgamma(n) - std::lgamma(i) - std::lgamma(n - i + 1);
  for (int s = 0; s <= m; ++s) {
    const double z = lo + s * h;
    const double Phi = 0.5 * std::erfc(-z / std::sqrt(2.0));
    const double phi = std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
    if (Phi <= 0.0 || Phi >= 1.0) continue;
    const double wt = (s == 0 || s == m) ? 0.5 : 1.0;
    for (int i = 1; i <= n; ++i) {
      const double lp = logc[i - 1] + (i - 1) * std::log(Phi) + (n - i) * std::log1p(-Phi);
      out[i - 1] += wt * h * z * phi * std::exp(lp);
    }
  }
  return out;
}

void advance_dyson_coupled(std::vector<std::vector<double>>& xs, double t0, double t1, RngStream& rng,
                           const DysonOptions& opts) {
  StepContext c{rng, opts.max_halvings, {}, {}};
  std::size_t dim = 0;
  for (const auto& x : xs) dim = std::max(dim, x.size());
  std::vector<double> dw(dim);
  double t = t0;
  while (t < t1) {
    const double remaining = t1 - t;
    double h = remaining;
    for (const auto& x : xs)
      if (x.size() > 1) h = std::min(h, opts.eps * std::pow(min_gap(x), 2));
    // avoid a sliver substep at the end of the interval
    if (h < remaining && remaining - h < 1e-3 * h) h = remaining;
    const double sd = std::sqrt(h);
    for (auto& d : dw) d = sd * rng.normal();
    try_step(xs, h, dw, c, 0);
    t = (h >= remaining) ? t1 : t + h;
  }
}

void advance_dyson(std::vector<double>& x, double t0, double t1, RngStream& rng, const DysonOptions& opts) {
  std::vector<std::vector<double>> xs{std::move(x)};
  advance_dyson_coupled(xs, t0, t1, rng, opts);
  x = std::move(xs[0]);
}

DysonPath simulate_dyson(int dim, double t_end, double dt, std::span<const double> start, RngStream& rng,
                         const DysonOptions& opts) {
  if (dim < 1) throw PreconditionError(kModule, "simulate_dyson", "dimension must be >= 1");
  if (!(dt > 0.0) || !(t_end > 0.0)) throw PreconditionError(kModule, "simulate_dyson", "dt and t_end must be > 0");
  if (!start.empty() && static_cast<int>(start.size()) != dim)
    throw PreconditionError(kModule, "simulate_dyson", "start has the wrong dimension");
  const bool zero_start =
      start.empty() || std::all_of(start.begin(), start.end(), [](double v) { return v == 0.0; });
  const auto steps = static_cast<std::int64_t>(std::llround(t_end / dt));

  DysonPath path;
  path.dim = dim;
  std::vector<double> x(dim, 0.0);
  std::int64_t first = 0;
  if (zero_start && dim > 1) {
    const auto means = normal_order_means(dim);
    for (int i = 0; i < dim; ++i) x[i] = std::sqrt(dt) * means[i];
    first = 1;
  } else if (!zero_start) {
    x.assign(start.begin(), start.end());
    if (!strictly_increasing(x)) throw PreconditionError(kModule, "simulate_dyson", "start is not ordered");
  }
  path.times.push_back(first * dt);
  path.values.insert(path.values.end(), x.begin(), x.end());
  for (std::int64_t s = first + 1; s <= steps; ++s) {
    advance_dyson(x, (s - 1) * dt, s * dt, rng, opts);
    path.times.push_back(s * dt);
    path.values.insert(path.values.end(), x.begin(), x.end());
  }
  return path;
}

PsiCurve estimate_psi_curve(std::span<const double> r_grid, int k, const PsiOptions& opts, const RngStream& base) {
  if (k < 2) throw PreconditionError(kModule, "estimate_psi", "k must be >= 2");
  if (r_grid.empty()) throw PreconditionError(kModule, "estimate_psi", "empty r grid");
  for (double r : r_grid)
    if (!(r > 0.0)) throw PreconditionError(kModule, "estimate_psi", "r must be > 0");
  if (opts.a_grid.empty()) throw PreconditionError(kModule, "estimate_psi", "empty a grid");
  for (std::size_t i = 0; i < opts.a_grid.size(); ++i)
    if (!(opts.a_grid[i] > 0.0) || (i > 0 && !(opts.a_grid[i] < opts.a_grid[i - 1])))
      throw PreconditionError(kModule, "estimate_psi", "a grid must be positive and decreasing");
  const int m = k - 1;
  const std::size_t nr = r_grid.size();
  const std::size_t na = opts.a_grid.size();
  const std::uint64_t n = opts.paths;
  const auto steps = static_cast<std::int64_t>(std::llround(1.0 / opts.dt));

  PsiCurve out;
  out.k = k;
  out.r_grid.assign(r_grid.begin(), r_grid.end());
  out.a_grid = opts.a_grid;
  out.paths = n;
  out.values.assign(na, std::vector<double>(nr));
  out.stderr_.assign(na, std::vector<double>(nr));

  // per a: den[i], num[i * nr + j]
  std::vector<std::vector<double>> den(na), num(na);
  for (std::size_t ia = 0; ia < na; ++ia) {
    const double a = opts.a_grid[ia];
    if (r_grid[0] <= (m - 1) * a)
      throw PreconditionError(kModule, "estimate_psi", "r must exceed (k-2) a");
    const RngStream stream = base.child("psi").child(static_cast<std::uint64_t>(ia));
    den[ia].resize(n);
    num[ia].resize(n * nr);
    // exact prefactor Delta_k(y_c, r) / Delta_{k-1}(y_c) = prod_i (r - y_i)
    std::vector<double> pref(nr, 1.0);
    for (std::size_t j = 0; j < nr; ++j)
      for (int c = 0; c < m; ++c) pref[j] *= r_grid[j] - c * a;
    run_blocks(
        n,
        [&](std::uint64_t b, std::uint64_t e) {
          std::vector<std::vector<double>> xs(1 + nr);
          for (std::uint64_t i = b; i < e; ++i) {
            RngStream rng = path_stream(stream, i);
            xs[0].resize(m);
            for (int c = 0; c < m; ++c) xs[0][c] = c * a;
            for (std::size_t j = 0; j < nr; ++j) {
              xs[1 + j] = xs[0];
              xs[1 + j].push_back(r_grid[j]);
            }
            for (std::int64_t s = 1; s <= steps; ++s)
              advance_dyson_coupled(xs, (s - 1) * opts.dt, s * opts.dt, rng, opts.dyson);
            const double d = inv_vandermonde(xs[0].data(), m);
            den[ia][i] = d;
            for (std::size_t j = 0; j < nr; ++j) num[ia][i * nr + j] = pref[j] * inv_vandermonde(xs[1 + j].data(), k);
          }
          return 0;
        },
        256);
    MomentSums ds;
    for (double d : den[ia]) ds.add(d);
    if (ds.std_error() > 0.25 * ds.mean())
      throw DenominatorVanishes(kModule, "estimate_psi", "denominator relative stderr above 25%; raise paths or coarsen a");
    for (std::size_t j = 0; j < nr; ++j) {
      double s = 0.0;
      for (std::uint64_t i = 0; i < n; ++i) s += num[ia][i * nr + j];
      out.values[ia][j] = s / ds.s1;
    }
  }

  auto extrapolate = [&](const std::vector<std::vector<double>>& v, std::size_t j) {
    if (na < 2) return v[0][j];
    const double a1 = opts.a_grid[na - 2], a2 = opts.a_grid[na - 1];
    const double p1 = v[na - 2][j], p2 = v[na - 1][j];
    return p2 + (p2 - p1) * a2 / (a1 - a2);
  };
  out.extrapolated.resize(nr);
  for (std::size_t j = 0; j < nr; ++j) out.extrapolated[j] = extrapolate(out.values, j);

  // Path-level bootstrap, each a resampled on its own paths.
  const int B = std::max(2, opts.bootstrap);
  RngStream brng = base.child("psi-bootstrap");
  std::vector<MomentSums> se_val(na * nr), se_ext(nr), se_step(nr);
  std::vector<std::vector<double>> rep(na, std::vector<double>(nr));
  std::vector<double> nsum(nr);
  for (int b = 0; b < B; ++b) {
    for (std::size_t ia = 0; ia < na; ++ia) {
      double dsum = 0.0;
      std::fill(nsum.begin(), nsum.end(), 0.0);
      for (std::uint64_t t = 0; t < n; ++t) {
        const auto i = std::min<std::uint64_t>(n - 1, static_cast<std::uint64_t>(brng.uniform() * n));
        dsum += den[ia][i];
        for (std::size_t j = 0; j < nr; ++j) nsum[j] += num[ia][i * nr + j];
      }
      for (std::size_t j = 0; j < nr; ++j) {
        rep[ia][j] = nsum[j] / dsum;
        se_val[ia * nr + j].add(rep[ia][j]);
      }
    }
    for (std::size_t j = 0; j < nr; ++j) {
      se_ext[j].add(extrapolate(rep, j));
      if (na >= 2) se_step[j].add(rep[na - 1][j] - rep[na - 2][j]);
    }
  }
  auto sd = [](const MomentSums& s) { return s.std_error() * std::sqrt(s.n); };
  out.extrapolated_stderr.resize(nr);
  out.a_step_stderr.resize(nr);
  for (std::size_t j = 0; j < nr; ++j) {
    for (std::size_t ia = 0; ia < na; ++ia) out.stderr_[ia][j] = sd(se_val[ia * nr + j]);
    out.extrapolated_stderr[j] = sd(se_ext[j]);
    out.a_step_stderr[j] = na >= 2 ? sd(se_step[j]) : 0.0;
  }
  return out;
}

McEstimate estimate_psi(double r, int k, const PsiOptions& opts, const RngStream& base) {
  const double rs[1] = {r};
  const auto c = estimate_psi_curve(rs, k, opts, base);
  McEstimate e;
  e.value = c.extrapolated[0];
  e.std_error = c.extrapolated_stderr[0];
  e.samples = c.paths;
  e.seed = base.seed();
  e.stream = base.stream_id();
  return e;
}

double PsiCurve::operator()(double r) const {
  // Clean the extrapolated values into a monotone sequence in (0, 1].
  std::vector<double> v(r_grid.size());
  double run = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) {
    double x = extrapolated[j];
    if (!(x > 0.0)) x = values.empty() ? 0.0 : values.back()[j];
    run = std::max(run, std::min(1.0, x));
    v[j] = std::max(run, 1e-300);
  }
  if (r <= r_grid.front()) return v.front() * std::pow(r / r_grid.front(), k - 1);
  if (r >= r_grid.back()) return v.back();
  const auto it = std::upper_bound(r_grid.begin(), r_grid.end(), r);
  const std::size_t j = static_cast<std::size_t>(it - r_grid.begin());
  const double t = std::log(r / r_grid[j - 1]) / std::log(r_grid[j] / r_grid[j - 1]);
  return std::exp((1.0 - t) * std::log(v[j - 1]) + t * std::log(v[j]));
}

ThetaValue theta_of_a(double a, const std::function<double(double)>& psi, double r_max, double alpha, double p) {
  if (!(a > 0.0) || !(r_max > a)) throw PreconditionError(kModule, "theta_of_a", "need 0 < a < r_max");
  const double u0 = std::log(a), u1 = std::log(r_max);
  const int panels = std::max(16, static_cast<int>(std::ceil(64.0 * (u1 - u0))));
  const double body = integrate(
      [&](double u) {
        const double y = std::exp(u);
        return psi(y) * alpha * std::pow(y, -alpha);
      },
      u0, u1, panels);
  const double tail_hi = std::pow(r_max, -alpha);
  const double tail_lo = std::clamp(psi(r_max), 0.0, 1.0) * tail_hi;
  ThetaValue t;
  t.lower = body + tail_lo;
  t.upper = body + tail_hi;
  t.value = 0.5 * (t.lower + t.upper);
  t.p_weighted = p * t.value;
  return t;
}

ThetaValue theta_of_a(double a, const PsiCurve& psi, double alpha, double p) {
  return theta_of_a(a, [&](double y) { return psi(y); }, psi.r_grid.back(), alpha, p);
}

LimitStartLaw::LimitStartLaw(const std::function<double(double)>& psi, int k, double alpha, double p_of_x,
                             double q_of_x, double y_lo, double y_hi, int cells)
    : k_(k), alpha_(alpha), p_(p_of_x), q_(q_of_x) {
  if (!(alpha > 0.0) || !(alpha < k - 1))
    throw DomainError(kModule, "LimitStartLaw", "need 0 < alpha < k-1 for f to be integrable at 0");
  if (p_of_x < 0.0 || q_of_x < 0.0 || std::abs(p_of_x + q_of_x - 1.0) > 1e-9)
    throw PreconditionError(kModule, "LimitStartLaw", "p(x) and q(x) must be nonnegative and sum to 1");
  const double l0 = std::log(y_lo), l1 = std::log(y_hi);
  y_.resize(cells + 1);
  for (int i = 0; i <= cells; ++i) y_[i] = std::exp(l0 + (l1 - l0) * i / cells);
  auto raw = [&](double y) { return psi(y) * std::pow(y, -alpha - 1.0); };
  // psi ~ psi(y_lo) (y / y_lo)^(k-1) below the table, psi ~ psi(y_hi) above it
  low_coef_ = psi(y_lo) * std::pow(y_lo, -(k - 1.0));
  high_coef_ = psi(y_hi);
  low_mass_ = low_coef_ * std::pow(y_lo, k - 1.0 - alpha) / (k - 1.0 - alpha);
  high_mass_ = high_coef_ * std::pow(y_hi, -alpha) / alpha;
  cdf_.assign(cells + 1, 0.0);
  double acc = low_mass_;
  cdf_[0] = acc;
  for (int i = 0; i < cells; ++i) {
    acc += integrate([&](double u) { const double y = std::exp(u); return raw(y) * y; }, std::log(y_[i]),
                     std::log(y_[i + 1]), 1);
    cdf_[i + 1] = acc;
  }
  theta_ = acc + high_mass_;
  for (auto& c : cdf_) c /= theta_;
  f_.resize(cells + 1);
  for (int i = 0; i <= cells; ++i) f_[i] = raw(y_[i]) / theta_;
}

LimitStartLaw::LimitStartLaw(const PsiCurve& psi, double alpha, double p_of_x, double q_of_x)
    : LimitStartLaw([psi](double y) { return psi(y); }, psi.k, alpha, p_of_x, q_of_x) {}

double LimitStartLaw::density(double y) const {
  if (!(y > 0.0)) return 0.0;
  if (y < y_.front()) return low_coef_ * std::pow(y, k_ - 2.0 - alpha_) / theta_;
  if (y >= y_.back()) return high_coef_ * std::pow(y, -alpha_ - 1.0) / theta_;
  const auto j = static_cast<std::size_t>(std::upper_bound(y_.begin(), y_.end(), y) - y_.begin());
  const double t = std::log(y / y_[j - 1]) / std::log(y_[j] / y_[j - 1]);
  const double f0 = std::max(f_[j - 1], 1e-300), f1 = std::max(f_[j], 1e-300);
  return std::exp((1.0 - t) * std::log(f0) + t * std::log(f1));
}

double LimitStartLaw::cdf(double y) const {
  if (!(y > 0.0)) return 0.0;
  if (y < y_.front()) return low_mass_ / theta_ * std::pow(y / y_.front(), k_ - 1.0 - alpha_);
  if (y >= y_.back()) return 1.0 - high_mass_ / theta_ * std::pow(y / y_.back(), -alpha_);
  const auto j = static_cast<std::size_t>(std::upper_bound(y_.begin(), y_.end(), y) - y_.begin());
  const double t = std::log(y / y_[j - 1]) / std::log(y_[j] / y_[j - 1]);
  return cdf_[j - 1] + t * (cdf_[j] - cdf_[j - 1]);
}

double LimitStartLaw::quantile(double u) const {
  const double lo = cdf_.front();
  const double hi = 1.0 - high_mass_ / theta_;
  if (u <= lo) return y_.front() * std::pow(u / lo, 1.0 / (k_ - 1.0 - alpha_));
  if (u >= hi) return y_.back() * std::pow((1.0 - u) / (1.0 - hi), -1.0 / alpha_);
  auto j = static_cast<std::size_t>(std::upper_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin());
  j = std::clamp<std::size_t>(j, 1, cdf_.size() - 1);
  const double span = cdf_[j] - cdf_[j - 1];
  const double t = span > 0.0 ? (u - cdf_[j - 1]) / span : 0.0;
  return y_[j - 1] * std::pow(y_[j] / y_[j - 1], t);
}

double LimitStartLaw::total_mass() const {
  // Trapezoid in log y over the tabulated density, independent of the cell
  // quadrature used to build the CDF.
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < y_.size(); ++i) {
    const double du = std::log(y_[i + 1] / y_[i]);
    s += 0.5 * du * (f_[i] * y_[i] + f_[i + 1] * y_[i + 1]);
  }
  return s + (low_mass_ + high_mass_) / theta_;
}

LimitStart sample_limit_start(const LimitStartLaw& law, RngStream& rng) {
  LimitStart s;
  s.point.assign(law.k(), 0.0);
  const bool top = rng.uniform() < law.p_of_x();
  const double y = law.quantile(rng.uniform());
  s.side = top ? JumpSide::Top : JumpSide::Bottom;
  if (top)
    s.point.back() = y;
  else
    s.point.front() = -y;
  return s;
}

LimitPath sample_limit_process(std::span<const double> y0, std::span<const double> t_grid, RngStream& rng,
                               const LimitProcessOptions& opts) {
  const int k = static_cast<int>(y0.size());
  if (k < 2) throw PreconditionError(kModule, "sample_limit_process", "need at least two coordinates");
  if (t_grid.size() < 2 || t_grid.front() != 0.0)
    throw PreconditionError(kModule, "sample_limit_process", "time grid must start at 0");
  std::vector<double> y(k);
  for (int i = 0; i < k; ++i) y[i] = y0[i] + opts.a * i;
  if (!strictly_increasing(y))
    throw PreconditionError(kModule, "sample_limit_process", "y0 + a (0..k-1) is not ordered");
  const std::size_t T = t_grid.size();
  const int M = std::max(1, opts.proposals);

  std::vector<double> cand(static_cast<std::size_t>(M) * T * k);
  std::vector<double> w(M);
  std::vector<double> x(k);
  for (int c = 0; c < M; ++c) {
    x = y;
    double* out = cand.data() + static_cast<std::size_t>(c) * T * k;
    std::copy(x.begin(), x.end(), out);
    for (std::size_t s = 1; s < T; ++s) {
      advance_dyson(x, t_grid[s - 1], t_grid[s], rng, opts.dyson);
      std::copy(x.begin(), x.end(), out + s * k);
    }
    w[c] = inv_vandermonde(x.data(), k);
  }
  const double ws = std::accumulate(w.begin(), w.end(), 0.0);
  double w2 = 0.0;
  for (double v : w) w2 += v * v;
  LimitPath p;
  p.k = k;
  p.times.assign(t_grid.begin(), t_grid.end());
  p.acceptance = w2 > 0.0 ? ws * ws / (w2 * M) : 0.0;
  if (p.acceptance < 1e-4)
    throw RejectionStarved(kModule, "sample_limit_process", "effective acceptance below 1e-4; raise a");
  double u = rng.uniform() * ws;
  int pick = M - 1;
  for (int c = 0; c < M; ++c) {
    u -= w[c];
    if (u < 0.0) {
      pick = c;
      break;
    }
  }
  const double* src = cand.data() + static_cast<std::size_t>(pick) * T * k;
  p.values.assign(src, src + T * k);
  return p;
}

std::vector<double> unit_time_grid(int points) {
  std::vector<double> t(std::max(points, 2));
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<double>(i) / (t.size() - 1);
  t.back() = 1.0;
  return t;
}

std::string psi_curve_csv(const PsiCurve& psi) {
  std::ostringstream o;
  o.precision(10);
  o << "# ordwalk psi-curve v1\n# k=" << psi.k << " paths=" << psi.paths << "\n";
  o << "r,psi,stderr";
  for (double a : psi.a_grid) o << ",psi_a" << a << ",stderr_a" << a;
  o << "\n";
  for (std::size_t j = 0; j < psi.r_grid.size(); ++j) {
    o << psi.r_grid[j] << "," << psi.extrapolated[j] << "," << psi.extrapolated_stderr[j];
    for (std::size_t ia = 0; ia < psi.a_grid.size(); ++ia) o << "," << psi.values[ia][j] << "," << psi.stderr_[ia][j];
    o << "\n";
  }
  return o.str();
}

std::string f_table_csv(const LimitStartLaw& law) {
  std::ostringstream o;
  o.precision(10);
  o << "# ordwalk f-table v1\n# k=" << law.k() << " alpha=" << law.alpha() << " theta=" << law.theta()
    << " p_of_x=" << law.p_of_x() << " q_of_x=" << law.q_of_x() << "\n";
  o << "y,f,cdf\n";
  const auto& g = law.grid();
  for (std::size_t i = 0; i < g.size(); i += 10) o << g[i] << "," << law.density(g[i]) << "," << law.cdf(g[i]) << "\n";
  return o.str();
}

PsiCurve parse_psi_curve_csv(const std::string& text) {
  PsiCurve c;
  std::istringstream in(text);
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto pos = line.find("k=");
      if (pos != std::string::npos) c.k = std::stoi(line.substr(pos + 2));
      const auto pp = line.find("paths=");
      if (pp != std::string::npos) c.paths = std::stoull(line.substr(pp + 6));
      continue;
    }
    if (!header) {
      if (line.rfind("r,psi,stderr", 0) != 0) throw ConfigError(kModule, "parse_psi_curve_csv", "unexpected header");
      header = true;
      continue;
    }
    std::istringstream ls(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() < 3) throw ConfigError(kModule, "parse_psi_curve_csv", "short row");
    c.r_grid.push_back(row[0]);
    c.extrapolated.push_back(row[1]);
    c.extrapolated_stderr.push_back(row[2]);
  }
  if (c.k < 2 || c.r_grid.empty()) throw ConfigError(kModule, "parse_psi_curve_csv", "missing k or rows");
  return c;
}

}  // namespace ordwalk
