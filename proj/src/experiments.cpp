#include "ordwalk/experiments.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "ordwalk/chain.hpp"
#include "ordwalk/core.hpp"
#include "ordwalk/errors.hpp"
#include "ordwalk/harmonic.hpp"
#include "ordwalk/increments.hpp"
#include "ordwalk/parallel.hpp"
#include "ordwalk/stats.hpp"
#include "ordwalk/tail.hpp"
#include "ordwalk/walk.hpp"

namespace ordwalk {

using nlohmann::json;

namespace {

constexpr const char* kModule = "experiments";

class Stopwatch {
 public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

struct Stage {
  ComparisonReport& report;
  const Progress& progress;
  Stopwatch sw;
  std::string current;

  void begin(const std::string& name) {
    finish();
    current = name;
    sw.lap();
    if (progress) progress(report.experiment + ": " + name);
  }
  void finish() {
    if (!current.empty()) report.timings.emplace_back(current, sw.lap());
    current.clear();
  }
};

ComparisonReport new_report(const std::string& name, const ExperimentConfig& cfg) {
  ComparisonReport r;
  r.experiment = name;
  r.config_text = cfg.identity();
  r.config_hash = cfg.hash();
  r.seed = cfg.seed();
  return r;
}

void add(ComparisonReport& r, int criterion, std::string name, bool pass, json measured, std::string tolerance) {
  r.verdicts.push_back({criterion, std::move(name), pass, std::move(measured), std::move(tolerance)});
}

json est_json(const McEstimate& e) {
  json j{{"value", e.value}, {"stderr", e.std_error}, {"samples", e.samples}};
  if (!std::isnan(e.ess)) j["ess"] = e.ess;
  return j;
}

json series_json(const USeriesEstimate& u) {
  return {{"total", u.total},          {"total_stderr", u.total_stderr}, {"partial_sum", u.partial_sum},
          {"tail", u.tail_bound},      {"beta", u.beta},                 {"truncation", u.truncation},
          {"tail_dominates", u.tail_dominates}};
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("IoError", kModule, "write", "cannot write " + p.string());
  out << text;
}

IncrementLaw law_of(const WalkParams& p) { return build_law(p.alpha(), p.p(), p.q(), p.law.body_cut); }

TailMethod method_of(const std::string& s) {
  if (s == "direct") return TailMethod::Direct;
  if (s == "forced_jump") return TailMethod::ForcedJump;
  if (s == "splitting") return TailMethod::Splitting;
  throw ConfigError(kModule, "config", "tail.method must be direct, forced_jump or splitting");
}

ForcedJumpPolicy policy_of(const ExperimentConfig& cfg, const IncrementLaw& law) {
  ForcedJumpPolicy p = ForcedJumpPolicy::defaults(law);
  p.l_force = static_cast<int>(cfg.get_int("tail.l_force"));
  p.b = cfg.get_real("tail.b");
  p.defensive_mix = cfg.get_real("tail.defensive_mix");
  p.carry_particles = static_cast<std::uint64_t>(std::max<std::int64_t>(0, cfg.get_int("tail.carry")));
  return p;
}

LatticeSpec v_spec_of(const ExperimentConfig& cfg) {
  LatticeSpec s;
  s.nodes = static_cast<int>(cfg.get_int("harmonic.lattice_nodes"));
  return s;
}

LatticeSpec u_spec_of(const ExperimentConfig& cfg) {
  LatticeSpec s = LatticeSpec::green_defaults();
  s.nodes = static_cast<int>(cfg.get_int("harmonic.green_nodes"));
  return s;
}

USeriesOptions series_of(const ExperimentConfig& cfg) {
  USeriesOptions o;
  o.truncation = static_cast<int>(cfg.get_int("harmonic.u_truncation"));
  o.samples = cfg.get_count("harmonic.u_samples");
  o.allow_tail_dominance = true;  // reported through the tail_dominates flag
  return o;
}

std::vector<double> checked_start(const ExperimentConfig& cfg, const WalkParams& params, const char* key) {
  auto x = cfg.get_reals(key);
  if (static_cast<int>(x.size()) != params.k || !in_chamber(x))
    throw ConfigError(kModule, "config", std::string(key) + " must be a strictly increasing vector of length k");
  return x;
}

json curve_json(const TailCurve& c) {
  json pts = json::array();
  for (std::size_t i = 0; i < c.grid.size(); ++i) {
    json e = est_json(c.estimates[i]);
    e["n"] = c.grid[i];
    pts.push_back(e);
  }
  return {{"points", pts},
          {"slope", c.fitted_slope},
          {"slope_stderr", c.slope_stderr},
          {"intercept", c.intercept},
          {"points_used", c.points_used}};
}

double min_ess(const TailCurve& c) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& e : c.estimates)
    if (!std::isnan(e.ess)) m = std::min(m, e.ess);
  return std::isinf(m) ? std::numeric_limits<double>::quiet_NaN() : m;
}

// Slope verdict shared by the tail and theorem1 experiments.
void slope_verdict(ComparisonReport& r, const TailCurve& c, TailMethod method, double exponent) {
  const double target = -exponent;
  const double ess = min_ess(c);
  const bool ess_ok = method != TailMethod::ForcedJump || ess >= 1e6;
  const bool pass = c.points_used >= 2 && std::abs(c.fitted_slope - target) <= 0.25 && ess_ok;
  add(r, 1, "heavy_tail_slope", pass,
      {{"slope", c.fitted_slope}, {"slope_stderr", c.slope_stderr}, {"target", target}, {"min_ess", ess},
       {"points_used", c.points_used}},
      "|slope - target| <= 0.25 and ForcedJump ESS >= 1e6 per point");
}

std::vector<std::vector<double>> random_gap_states(int k, int count, double lo, double hi, RngStream rng) {
  std::vector<std::vector<double>> out;
  for (int i = 0; i < count; ++i) {
    std::vector<double> g(k - 1);
    for (auto& v : g) v = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * rng.uniform());
    out.push_back(positions_from_gaps(g));
  }
  return out;
}

std::vector<double> sorted_union(std::vector<double> a, const std::vector<double>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

PsiOptions psi_options(const ExperimentConfig& cfg) {
  PsiOptions o;
  o.a_grid = cfg.get_reals("grids.a");
  o.paths = cfg.get_count("psi.paths");
  o.bootstrap = static_cast<int>(cfg.get_int("psi.bootstrap"));
  return o;
}

std::vector<double> psi_r_grid(const ExperimentConfig& cfg) {
  return sorted_union(cfg.get_reals("grids.r"), sorted_union(cfg.get_reals("grids.psi_slope_r"), {4.0}));
}

}  // namespace

bool ComparisonReport::all_pass() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.criterion == 0 || v.pass; });
}

json ComparisonReport::to_json() const {
  json vs = json::array();
  for (const auto& v : verdicts)
    vs.push_back({{"criterion", v.criterion},
                  {"name", v.name},
                  {"pass", v.pass},
                  {"measured", v.measured},
                  {"tolerance", v.tolerance}});
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash));
  return {{"schema_version", kReportSchema},
          {"experiment", experiment},
          {"seed", seed},
          {"config_hash", hash},
          {"config", config_text},
          {"all_pass", all_pass()},
          {"verdicts", vs},
          {"data", data}};
}

RngStream experiment_stream(const ExperimentConfig& cfg, const std::string& name) {
  return RngStream(cfg.seed(), derive_stream(0, name));
}

void write_report(const ComparisonReport& report, const std::filesystem::path& dir) {
  write_file(dir / (report.experiment + ".json"), report.to_json().dump(2) + "\n");
  json t = json::object();
  double total = 0.0;
  for (const auto& [stage, s] : report.timings) {
    t[stage] = s;
    total += s;
  }
  t["total"] = total;
  write_file(dir / "timing.json", t.dump(2) + "\n");
}

void write_manifest(const std::filesystem::path& dir, const ExperimentConfig& cfg, const std::string& subcommand,
                    const std::string& status, double wall_seconds) {
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(cfg.hash()));
  json m{{"schema_version", kReportSchema},
         {"subcommand", subcommand},
         {"status", status},
         {"config_hash", hash},
         {"seed", cfg.seed()},
         {"workers", workers()},
         {"version", kVersion},
         {"compiler", __VERSION__},
         {"wall_seconds", wall_seconds}};
  // Write-then-rename keeps a valid manifest on disk if the run is killed.
  std::filesystem::create_directories(dir);
  const auto tmp = dir / "manifest.json.tmp";
  write_file(tmp, m.dump(2) + "\n");
  std::filesystem::rename(tmp, dir / "manifest.json");
}

double ks_weighted_two_sample(std::vector<double> a, std::vector<double> wa, std::vector<double> b) {
  if (a.empty() || b.empty()) return 1.0;
  std::vector<std::size_t> idx(a.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return a[i] < a[j]; });
  std::sort(b.begin(), b.end());
  const double W = std::accumulate(wa.begin(), wa.end(), 0.0);
  double fa = 0.0, d = 0.0;
  std::size_t ib = 0, ia = 0;
  while (ia < idx.size() || ib < b.size()) {
    const double x = ib >= b.size() ? a[idx[ia]] : ia >= idx.size() ? b[ib] : std::min(a[idx[ia]], b[ib]);
    while (ia < idx.size() && a[idx[ia]] <= x) fa += wa[idx[ia++]] / W;
    while (ib < b.size() && b[ib] <= x) ++ib;
    d = std::max(d, std::abs(fa - static_cast<double>(ib) / b.size()));
  }
  return d;
}

// ---------------------------------------------------------------------------

ComparisonReport run_tail_experiment(const ExperimentConfig& cfg, const ExperimentEnv& env) {
  ComparisonReport r = new_report("tail", cfg);
  Stage st{r, env.progress, {}, {}};
  const WalkParams params = cfg.params();
  validate_params(params);
  const IncrementLaw law = law_of(params);
  const auto x = checked_start(cfg, params, "start.x");
  const auto grid = cfg.get_ints("grids.horizons");
  SurvivalMethod m;
  m.method = method_of(cfg.get_text("tail.method"));
  m.forced = policy_of(cfg, law);
  st.begin("tail curve");
  const TailCurve c = build_tail_curve(x, law, grid, m, cfg.get_count("tail.samples"),
                                       experiment_stream(cfg, "tail").child("curve"));
  write_file(env.out_dir / "tail_curve.csv", tail_curve_csv(c));
  r.data["curve"] = curve_json(c);
  r.data["method"] = method_name(m.method);
  slope_verdict(r, c, m.method, theory_exponent(params));
  st.finish();
  return r;
}

ComparisonReport run_theorem1_study(const ExperimentConfig& cfg, const ExperimentEnv& env) {
  ComparisonReport r = new_report("theorem1", cfg);
  Stage st{r, env.progress, {}, {}};
  const WalkParams params = cfg.params();
  validate_params(params);
  const IncrementLaw law = law_of(params);
  const auto x = checked_start(cfg, params, "start.x");
  const auto alt = checked_start(cfg, params, "start.alt");
  const auto grid = cfg.get_ints("grids.horizons");
  const RngStream root = experiment_stream(cfg, "theorem1");
  const TailMethod method = method_of(cfg.get_text("tail.method"));
  SurvivalMethod m;
  m.method = method;
  m.forced = policy_of(cfg, law);
  r.data["theory_exponent"] = theory_exponent(params);

  st.begin("tail curve");
  const TailCurve c = build_tail_curve(x, law, grid, m, cfg.get_count("tail.samples"), root.child("curve"));
  write_file(env.out_dir / "tail_curve.csv", tail_curve_csv(c));
  r.data["curve"] = curve_json(c);
  slope_verdict(r, c, method, theory_exponent(params));

  st.begin("light-tailed control");
  {
    const int kl = static_cast<int>(cfg.get_int("light.k"));
    const IncrementLaw light = build_law(params.alpha(), 0.0, 0.0, params.law.body_cut);
    std::vector<double> xl(kl);
    std::iota(xl.begin(), xl.end(), 0.0);
    SurvivalMethod d;
    d.method = TailMethod::Direct;
    const auto lgrid = cfg.get_ints("light.horizons");
    const TailCurve lc = build_tail_curve(xl, light, lgrid, d, cfg.get_count("light.samples"), root.child("light"));
    write_file(env.out_dir / "light_curve.csv", tail_curve_csv(lc));
    const double target = -kl * (kl - 1.0) / 4.0;
    r.data["light_curve"] = curve_json(lc);
    add(r, 2, "light_tail_slope", lc.points_used >= 2 && std::abs(lc.fitted_slope - target) <= 0.15,
        {{"slope", lc.fitted_slope}, {"slope_stderr", lc.slope_stderr}, {"target", target}, {"k", kl}},
        "|slope - target| <= 0.15");
  }

  st.begin("importance sampling validity");
  {
    const std::int64_t n = cfg.get_int("tail.is_check_horizon");
    const std::uint64_t N = cfg.get_count("tail.is_check_samples");
    SurvivalMethod fj;
    fj.method = TailMethod::ForcedJump;
    fj.forced = policy_of(cfg, law);
    fj.forced.carry_particles = 0;
    SurvivalMethod direct;
    direct.method = TailMethod::Direct;
    const RngStream s = root.child("is-check");
    const McEstimate a = estimate_survival(x, law, n, fj, N, s.child("fj"));
    const McEstimate b = estimate_survival(x, law, n, direct, N, s.child("direct"));
    const double joint = std::hypot(a.std_error, b.std_error);
    SurvivalMethod fj1 = fj;
    fj1.forced.defensive_mix = 1.0;
    const McEstimate a1 = estimate_survival(x, law, n, fj1, N, s.child("same"));
    const McEstimate b1 = estimate_survival(x, law, n, direct, N, s.child("same"));
    const bool identical = std::bit_cast<std::uint64_t>(a1.value) == std::bit_cast<std::uint64_t>(b1.value) &&
                           std::bit_cast<std::uint64_t>(a1.std_error) == std::bit_cast<std::uint64_t>(b1.std_error);
    add(r, 3, "forced_jump_vs_direct", std::abs(a.value - b.value) <= 3.0 * joint && identical,
        {{"n", n},
         {"forced_jump", est_json(a)},
         {"direct", est_json(b)},
         {"z", (a.value - b.value) / joint},
         {"eps_d_1_bit_identical", identical}},
        "|FJ - Direct| <= 3 joint stderr; defensive_mix = 1 bit-identical to Direct");
  }

  st.begin("intercept consistency");
  {
    SurvivalMethod ma = m;
    ma.forced.carry_particles = static_cast<std::uint64_t>(std::max<std::int64_t>(0, cfg.get_int("tail.alt_carry")));
    const TailCurve ca = build_tail_curve(alt, law, grid, ma, cfg.get_count("tail.alt_samples"), root.child("alt"));
    write_file(env.out_dir / "tail_curve_alt.csv", tail_curve_csv(ca));
    const auto v_hat = HarmonicContext::build_v_hat(law, params.k, v_spec_of(cfg), root.child("surrogate"),
                                                    cfg.get_text("harmonic.cache"));
    const VFunction v(law, params.k, v_hat);
    const USeriesOptions so = series_of(cfg);
    const USeriesEstimate ux = estimate_U(x, law, v, so, root.child("u-x"));
    const USeriesEstimate ua = estimate_U(alt, law, v, so, root.child("u-alt"));
    McEstimate ex, ea;
    ex.value = ux.total;
    ex.std_error = ux.total_stderr;
    ea.value = ua.total;
    ea.std_error = ua.total_stderr;
    const std::vector<TailCurve> curves{c, ca};
    const std::vector<McEstimate> us{ex, ea};
    const InterceptComparison ic = compare_intercept(curves, us, -theory_exponent(params));
    r.data["alt_curve"] = curve_json(ca);
    r.data["u_x"] = series_json(ux);
    r.data["u_alt"] = series_json(ua);
    add(r, 0, "intercept_consistency", ic.consistent,
        {{"normalized_x", est_json(ic.normalized[0])},
         {"normalized_alt", est_json(ic.normalized[1])},
         {"ratio", est_json(ic.ratio[0][1])}},
        "exp(intercept)/U agree across starts within 3 joint stderr (slope pinned)");
  }
  st.finish();
  return r;
}

ComparisonReport run_harmonic_experiment(const ExperimentConfig& cfg, const ExperimentEnv& env) {
  ComparisonReport r = new_report("harmonic", cfg);
  Stage st{r, env.progress, {}, {}};
  const WalkParams params = cfg.params();
  validate_params(params);
  const IncrementLaw law = law_of(params);
  const auto x = checked_start(cfg, params, "start.x");
  const int k = params.k;
  const RngStream root = experiment_stream(cfg, "harmonic");
  const std::uint64_t one = cfg.get_count("harmonic.one_step_samples");

  st.begin("V-hat");
  const auto v_hat =
      HarmonicContext::build_v_hat(law, k, v_spec_of(cfg), root.child("surrogate"), cfg.get_text("harmonic.cache"));
  const VFunction v(law, k, v_hat);

  st.begin("harmonicity");
  {
    const auto starts =
        random_gap_states(k - 1, static_cast<int>(cfg.get_int("harmonic.starts")), 0.2, 20.0, root.child("starts"));
    json rows = json::array();
    bool all = true;
    for (std::size_t i = 0; i < starts.size(); ++i) {
      const McEstimate h = harmonic_ratio(starts[i], law, *v_hat, one, root.child("ratio").child(i));
      const bool ok = std::abs(h.value - 1.0) <= std::max(0.02, 3.0 * h.std_error);
      all = all && ok;
      rows.push_back({{"y", starts[i]}, {"ratio", h.value}, {"stderr", h.std_error}, {"pass", ok}});
    }
    r.data["harmonicity"] = rows;
    add(r, 5, "v_hat_harmonicity", all, rows, "|E[V(y+S(1)); no exit]/V(y) - 1| <= max(2%, 3 stderr) at every start");
  }

  const USeriesOptions so = series_of(cfg);
  st.begin("U telescope");
  {
    const TelescopeCheck t = u_telescope(x, law, v, so, root.child("telescope"));
    r.data["telescope"] = {{"u", series_json(t.u)}, {"u_next", series_json(t.u_next)}};
    add(r, 5, "u_telescope", t.consistent,
        {{"difference", est_json(t.difference)}, {"v_x", t.v_x}},
        "U(x) - E[U(x+S(1)); tau > 1] = v(x) within 3 stderr");
  }

  st.begin("superharmonicity of v");
  {
    const std::vector<std::function<double(std::span<const double>)>> fns{
        [&](std::span<const double> y) { return in_chamber(y) ? v(y) : 0.0; }};
    const auto m = one_step_means(x, law, fns, k - 2, one, root.child("super"));
    const double margin = v(x) - m[0].value;
    add(r, 0, "v_strictly_superharmonic", margin > 3.0 * m[0].std_error,
        {{"v_x", v(x)}, {"one_step", est_json(m[0])}, {"margin", margin}}, "v(x) - E[v(x+S(1)); tau > 1] > 3 stderr");
  }

  st.begin("mixture weights");
  {
    const MixtureWeights mw = mixture_weights(x, law, v, so, root.child("mixture"));
    const double se = std::hypot(mw.p_of_x.std_error, mw.q_of_x.std_error);
    const double sum = mw.p_of_x.value + mw.q_of_x.value;
    bool pass = std::abs(sum - 1.0) <= 2.0 * se;
    json measured{{"p_of_x", est_json(mw.p_of_x)}, {"q_of_x", est_json(mw.q_of_x)}, {"sum", sum}};
    std::vector<double> mirrored(x.rbegin(), x.rend());
    for (auto& c : mirrored) c = -c;
    const double shift = x.front() - mirrored.front();
    bool symmetric = params.p() == params.q();
    for (std::size_t i = 0; i < x.size() && symmetric; ++i) symmetric = std::abs(mirrored[i] + shift - x[i]) < 1e-12;
    if (symmetric) {
      const bool half = std::abs(mw.p_of_x.value - 0.5) <= 3.0 * mw.p_of_x.std_error;
      measured["symmetric_half"] = half;
      pass = pass && half;
    }
    r.data["mixture"] = {{"u", series_json(mw.u)}, {"u1", series_json(mw.u1)}, {"u2", series_json(mw.u2)}};
    add(r, 6, "mixture_weights", pass, measured,
        "p(x)+q(x) = 1 within 2 propagated stderr; p(x) = 0.5 within 3 stderr when symmetric");
  }

  st.begin("surrogate diagnostics");
  {
    // Scale consistency: V(c y) / V(y) ~ c^((k-1)(k-2)/2) at widely separated y.
    std::vector<double> y(k - 1);
    for (int i = 0; i < k - 1; ++i) y[i] = 100.0 * i;
    const double v0 = (*v_hat)(y);
    std::vector<double> lc, lr;
    for (double c : {2.0, 4.0, 8.0}) {
      std::vector<double> z(y);
      for (auto& t : z) t *= c;
      lc.push_back(std::log(c));
      lr.push_back(std::log((*v_hat)(z) / v0));
    }
    const std::vector<double> w(lc.size(), 1.0);
    const LineFit f = wls_fit(lc, lr, w);
    const double deg = (k - 1.0) * (k - 2.0) / 2.0;
    add(r, 0, "v_hat_scale_degree", std::abs(f.slope - deg) <= 0.1 * deg, {{"slope", f.slope}, {"degree", deg}},
        "log-ratio slope within 10% of the degree of Delta");
    // Sandwich: V-hat / Delta_1 bounded on random starts.
    const auto ys = random_gap_states(k - 1, 20, 0.05, 200.0, root.child("sandwich"));
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& z : ys) {
      const double q = (*v_hat)(z) / delta1_all(z);
      lo = std::min(lo, q);
      hi = std::max(hi, q);
    }
    add(r, 0, "v_hat_sandwich", lo > 0.0 && std::isfinite(hi), {{"min_ratio", lo}, {"max_ratio", hi}},
        "0 < V-hat / Delta_1 < infinity on 20 random starts");
  }
  st.finish();
  return r;
}

ComparisonReport run_chain_experiment(const ExperimentConfig& cfg, const ExperimentEnv& env) {
  ComparisonReport r = new_report("chain", cfg);
  Stage st{r, env.progress, {}, {}};
  const WalkParams params = cfg.params();
  validate_params(params);
  const IncrementLaw law = law_of(params);
  const auto x = checked_start(cfg, params, "start.x");
  const RngStream root = experiment_stream(cfg, "chain");
  const int batch = static_cast<int>(cfg.get_int("chain.batch"));

  st.begin("surrogates");
  const HarmonicContext ctx = HarmonicContext::build(law, params.k, v_spec_of(cfg), u_spec_of(cfg),
                                                     root.child("surrogate"), cfg.get_text("harmonic.cache"));

  st.begin("trajectory");
  {
    RngStream rng = root.child("trajectory");
    const Trajectory t = run_chain(CompactPoint::in_chamber(x), cfg.get_int("chain.steps"), ctx, batch, rng);
    write_file(env.out_dir / "trajectory.csv", trajectory_csv(t));
    int freezes = 0;
    bool ordered = true;
    for (const auto& s : t.steps) {
      if (s.branch == Branch::FreezeTop || s.branch == Branch::FreezeBottom) ++freezes;
      ordered = ordered && in_chamber(s.to.finite);
    }
    r.data["freeze_step"] = t.freeze_step ? json(*t.freeze_step) : json(nullptr);
    add(r, 0, "single_freeze_and_ordering", freezes <= 1 && ordered, {{"freezes", freezes}, {"ordered", ordered}},
        "at most one freeze; finite coordinates ordered at every step");
  }

  st.begin("resampling convergence");
  {
    // Destination law of one step from x at M, 2M, 4M: KS of the minimal gap.
    const std::uint64_t draws = 20000;
    std::vector<std::vector<double>> levels;
    for (int mult : {1, 2, 4}) {
      const int M = std::max(1, batch / 4) * mult;
      const RngStream s = root.child("m-doubling").child(static_cast<std::uint64_t>(mult));
      auto parts = run_blocks(draws, [&](std::uint64_t b, std::uint64_t e) {
        std::vector<double> out;
        for (std::uint64_t i = b; i < e; ++i) {
          RngStream rng = path_stream(s, i);
          const KernelStep k = sample_step(CompactPoint::in_chamber(x), ctx, M, rng);
          const auto& f = k.to.finite;
          double g = std::numeric_limits<double>::infinity();
          for (std::size_t j = 1; j < f.size(); ++j) g = std::min(g, f[j] - f[j - 1]);
          out.push_back(g);
        }
        return out;
      }, 256);
      std::vector<double> all;
      for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
      levels.push_back(std::move(all));
    }
    const double d1 = ks_two_sample(levels[0], levels[1]);
    const double d2 = ks_two_sample(levels[1], levels[2]);
    add(r, 0, "resampling_m_doubling", d2 < 0.02, {{"ks_m_2m", d1}, {"ks_2m_4m", d2}, {"draws", draws}},
        "KS between the last two batch levels < 0.02");
  }

  st.begin("one-step drift");
  {
    // From a tight start, the minimal-gap pair moves apart on average.
    std::vector<double> tight(params.k);
    for (int i = 0; i < params.k; ++i) tight[i] = 0.5 * i;
    const std::uint64_t n = cfg.get_count("chain.drift_steps");
    const int M = static_cast<int>(cfg.get_int("chain.lifetime_batch"));
    const RngStream s = root.child("drift");
    const MomentSums acc = reduce_blocks<MomentSums>(n, [&](std::uint64_t b, std::uint64_t e) {
      MomentSums m;
      for (std::uint64_t i = b; i < e; ++i) {
        RngStream rng = path_stream(s, i);
        const KernelStep k = sample_step(CompactPoint::in_chamber(tight), ctx, M, rng);
        if (k.branch != Branch::StayW) continue;
        m.add((k.to.finite[1] - k.to.finite[0]) - 0.5);
      }
      return m;
    }, 1024);
    add(r, 0, "gap_drift_positive", acc.mean() > 3.0 * acc.std_error(),
        {{"mean_gap_change", acc.mean()}, {"stderr", acc.std_error()}, {"stay_steps", acc.n}},
        "mean change of the first gap after a stay step > 3 stderr");
  }
  st.finish();
  return r;
}

ComparisonReport run_dyson_experiment(const ExperimentConfig& cfg, const ExperimentEnv& env) {
  ComparisonReport r = new_report("dyson", cfg);
  Stage st{r, env.progress, {}, {}};
  const int dim = static_cast<int>(cfg.get_int("dyson.dim"));
  const std::uint64_t n = cfg.get_count("dyson.paths");
  const double dt = cfg.get_real("dyson.dt");
  const RngStream root = experiment_stream(cfg, "dyson");

  struct Acc {
    MomentSums spread1, spread_q, var1;
    double bad = 0, underflow = 0;
    std::string csv;
    void merge(const Acc& o) {
      spread1.merge(o.spread1);
      spread_q.merge(o.spread_q);
      var1.merge(o.var1);
      bad += o.bad;
      underflow += o.underflow;
      csv += o.csv;
    }
  };
  auto run = [&](double step, const RngStream& s, bool keep) {
    return reduce_blocks<Acc>(n, [&](std::uint64_t b, std::uint64_t e) {
      Acc a;
      std::ostringstream os;
      os.precision(10);
      for (std::uint64_t i = b; i < e; ++i) {
        RngStream rng = path_stream(s, i);
        DysonPath p;
        try {
          p = simulate_dyson(dim, 1.0, step, {}, rng);
        } catch (const StepSizeUnderflow&) {
          a.underflow += 1;
          continue;
        }
        const std::size_t T = p.times.size();
        for (std::size_t t = 0; t < T; ++t) {
          const double* row = p.row(t);
          for (int j = 1; j < dim; ++j)
            if (!(row[j - 1] < row[j])) {
              a.bad += 1;
              break;
            }
        }
        auto spread = [&](std::size_t t) {
          const double* row = p.row(t);
          const double mean = std::accumulate(row, row + dim, 0.0) / dim;
          double s2 = 0.0;
          for (int j = 0; j < dim; ++j) s2 += (row[j] - mean) * (row[j] - mean);
          return dim > 1 ? s2 : row[0] * row[0];
        };
        // rows are stored at multiples of step; locate t = 1/4 and t = 1
        std::size_t iq = 0;
        for (std::size_t t = 0; t < T; ++t)
          if (std::abs(p.times[t] - 0.25) < std::abs(p.times[iq] - 0.25)) iq = t;
        a.spread1.add(spread(T - 1));
        a.spread_q.add(spread(iq));
        a.var1.add(p.row(T - 1)[0] * p.row(T - 1)[0]);
        if (keep && i < 10)
          for (std::size_t t = 0; t < T; ++t) {
            os << i << "," << p.times[t];
            for (int j = 0; j < dim; ++j) os << "," << p.row(t)[j];
            os << "\n";
          }
      }
      a.csv = os.str();
      return a;
    }, 256);
  };
  st.begin("paths");
  const Acc a = run(dt, root.child("paths"), true);
  std::string header = "path,t";
  for (int j = 1; j <= dim; ++j) header += ",x" + std::to_string(j);
  write_file(env.out_dir / "dyson_paths.csv", "# ordwalk dyson-paths v1\n" + header + "\n" + a.csv);
  const double ratio = a.spread1.mean() / a.spread_q.mean();
  add(r, 0, "ordering_at_output_times", a.bad == 0 && a.underflow <= 1e-3 * n,
      {{"violations", a.bad}, {"underflows", a.underflow}, {"paths", n}},
      "no crossing at output times; StepSizeUnderflow in < 0.1% of paths");
  add(r, 0, "diffusive_scaling", std::abs(ratio - 4.0) <= 0.8, {{"spread_ratio_1_vs_quarter", ratio}},
      "mean squared spread ratio t=1 vs t=1/4 in 4 +- 20%");
  if (dim == 1)
    add(r, 0, "brownian_variance", std::abs(a.var1.mean() - 1.0) <= 3.0 * a.var1.std_error(),
        {{"variance", a.var1.mean()}, {"stderr", a.var1.std_error()}}, "Var X(1) = 1 within 3 stderr");
  st.begin("entrance sensitivity");
  {
    const Acc h = run(0.5 * dt, root.child("half-dt"), false);
    r.data["spread_at_1"] = {{"dt", a.spread1.mean()}, {"dt_half", h.spread1.mean()},
                             {"stderr", std::hypot(a.spread1.std_error(), h.spread1.std_error())}};
  }
  st.finish();
  return r;
}

ComparisonReport run_psi_experiment(const ExperimentConfig& cfg, const ExperimentEnv& env, PsiCurve* curve_out) {
  ComparisonReport r = new_report("psi", cfg);
  Stage st{r, env.progress, {}, {}};
  const WalkParams params = cfg.params();
  validate_params(params);
  const int k = params.k;
  const auto rg = psi_r_grid(cfg);
  const PsiOptions po = psi_options(cfg);

  st.begin("psi curve");
  const PsiCurve c = estimate_psi_curve(rg, k, po, experiment_stream(cfg, "psi"));
  write_file(env.out_dir / "psi_curve.csv", psi_curve_csv(c));
  json pts = json::array();
  for (std::size_t j = 0; j < rg.size(); ++j)
    pts.push_back({{"r", rg[j]}, {"psi", c.extrapolated[j]}, {"stderr", c.extrapolated_stderr[j]}});
  r.data["curve"] = pts;

  // monotone within 2 joint stderr
  double worst = std::numeric_limits<double>::infinity();
  bool mono = true;
  for (std::size_t j = 1; j < rg.size(); ++j) {
    const double joint = std::hypot(c.extrapolated_stderr[j], c.extrapolated_stderr[j - 1]);
    const double z = (c.extrapolated[j] - c.extrapolated[j - 1]) / std::max(joint, 1e-300);
    worst = std::min(worst, z);
    mono = mono && c.extrapolated[j] - c.extrapolated[j - 1] >= -2.0 * joint;
  }
  add(r, 7, "psi_nondecreasing", mono, {{"min_z_of_increments", worst}}, "increments >= -2 joint stderr");

  // small-r slope
  {
    std::vector<double> lx, ly, w;
    for (double rs : cfg.get_reals("grids.psi_slope_r")) {
      const auto j = static_cast<std::size_t>(std::find(rg.begin(), rg.end(), rs) - rg.begin());
      const double v = c.extrapolated[j], se = c.extrapolated_stderr[j];
      if (!(v > 0.0)) continue;
      lx.push_back(std::log(rs));
      ly.push_back(std::log(v));
      const double sl = se > 0.0 ? se / v : 1e-3;
      w.push_back(1.0 / (sl * sl));
    }
    LineFit f;
    if (lx.size() >= 2) f = wls_fit(lx, ly, w);
    add(r, 7, "psi_small_r_slope", lx.size() >= 2 && std::abs(f.slope - (k - 1)) <= 0.3,
        {{"slope", f.slope}, {"slope_stderr", f.slope_se}, {"target", k - 1}}, "|slope - (k-1)| <= 0.3");
  }
  // psi(4)
  {
    const auto j = static_cast<std::size_t>(std::find(rg.begin(), rg.end(), 4.0) - rg.begin());
    add(r, 7, "psi_at_4", c.extrapolated[j] >= 0.8, {{"psi_4", c.extrapolated[j]}, {"stderr", c.extrapolated_stderr[j]}},
        "psi(4) >= 0.8");
  }
  // a-step stability
  if (c.a_grid.size() >= 2) {
    const std::size_t na = c.a_grid.size();
    json rows = json::array();
    bool stable = true;
    for (std::size_t j = 0; j < rg.size(); ++j) {
      const double d = c.values[na - 1][j] - c.values[na - 2][j];
      const bool ok = std::abs(d) < 2.0 * c.a_step_stderr[j];
      stable = stable && ok;
      rows.push_back({{"r", rg[j]}, {"difference", d}, {"joint_stderr", c.a_step_stderr[j]}, {"pass", ok}});
    }
    add(r, 7, "psi_a_stability", stable, rows, "|psi(r; a_min) - psi(r; previous a)| < 2 joint stderr at every r");
  }

  st.begin("theta and f");
  {
    const double alpha = params.alpha();
    json th = json::array();
    double prev_diff = std::numeric_limits<double>::infinity();
    bool shrinking = true;
    for (double a : {0.4, 0.2, 0.1, 0.05, 0.025}) {
      const ThetaValue t1 = theta_of_a(a, c, alpha, params.p());
      const ThetaValue t2 = theta_of_a(0.5 * a, c, alpha, params.p());
      const double d = std::abs(t1.value - t2.value);
      shrinking = shrinking && d < prev_diff;
      prev_diff = d;
      th.push_back({{"a", a}, {"theta", t1.value}, {"lower", t1.lower}, {"upper", t1.upper}, {"diff_to_half", d}});
    }
    r.data["theta"] = th;
    add(r, 0, "theta_converges", shrinking, th, "|theta(a) - theta(a/2)| decreasing in a");
    const double pw = params.p() / (params.p() + params.q());
    const LimitStartLaw f(c, alpha, pw, 1.0 - pw);
    write_file(env.out_dir / "f_table.csv", f_table_csv(f));
    add(r, 0, "f_normalized", std::abs(f.total_mass() - 1.0) <= 1e-3,
        {{"mass", f.total_mass()}, {"theta", f.theta()}}, "|integral of f - 1| <= 1e-3");
  }
  st.finish();
  if (curve_out) *curve_out = c;
  return r;
}

ComparisonReport run_theorem2_study(const ExperimentConfig& cfg, const ExperimentEnv& env) {
  ComparisonReport r = new_report("theorem2", cfg);
  Stage st{r, env.progress, {}, {}};
  const WalkParams params = cfg.params();
  validate_params(params);
  const IncrementLaw law = law_of(params);
  const auto x = checked_start(cfg, params, "start.x");
  const int k = params.k;
  const std::int64_t n = cfg.get_int("theorem2.n");
  const auto rn = static_cast<std::int64_t>(std::ceil(std::sqrt(static_cast<double>(n))));
  // The limit is stated for unit-variance increments: rescale by sigma sqrt(n).
  const double sqn = std::sqrt(law.variance() * static_cast<double>(n));
  const RngStream root = experiment_stream(cfg, "theorem2");
  r.data["n"] = n;
  r.data["r_n"] = rn;
  r.data["scale"] = sqn;

  PsiCurve psi;
  const std::string& psi_file = cfg.get_text("theorem2.psi_curve");
  if (env.psi) {
    psi = *env.psi;
  } else if (!psi_file.empty()) {
    std::ifstream in(psi_file, std::ios::binary);
    if (!in) throw ConfigError(kModule, "config", "cannot read theorem2.psi_curve " + psi_file);
    std::ostringstream text;
    text << in.rdbuf();
    psi = parse_psi_curve_csv(text.str());
    if (psi.k != k) throw ConfigError(kModule, "config", "theorem2.psi_curve was estimated for another k");
  } else {
    st.begin("psi curve");
    psi = estimate_psi_curve(psi_r_grid(cfg), k, psi_options(cfg), root.child("psi"));
  }

  st.begin("mixture weights");
  const auto v_hat =
      HarmonicContext::build_v_hat(law, k, v_spec_of(cfg), root.child("surrogate"), cfg.get_text("harmonic.cache"));
  const VFunction v(law, k, v_hat);
  const MixtureWeights mw = mixture_weights(x, law, v, series_of(cfg), root.child("mixture"));
  const double pw = std::clamp(mw.p_of_x.value / (mw.p_of_x.value + mw.q_of_x.value), 0.0, 1.0);
  const LimitStartLaw f(psi, params.alpha(), pw, 1.0 - pw);
  write_file(env.out_dir / "f_table.csv", f_table_csv(f));
  r.data["p_of_x"] = est_json(mw.p_of_x);
  r.data["q_of_x"] = est_json(mw.q_of_x);

  st.begin("conditioned paths");
  // Carried ForcedJump: weighted draws up to r_n, then resampling and
  // splitting to n. The population at n is a self-normalized sample of the
  // walk conditioned on survival; the gaps at r_n give the jump.
  SurvivalMethod sm;
  sm.method = TailMethod::ForcedJump;
  sm.forced = ForcedJumpPolicy::defaults(law);
  sm.forced.l_force = static_cast<int>(cfg.get_int("tail.l_force"));
  sm.forced.defensive_mix = cfg.get_real("tail.defensive_mix");
  sm.forced.b = cfg.get_real("theorem2.b");
  sm.forced.first_level = rn;
  sm.forced.carry_particles = cfg.get_count("theorem2.carry");
  if (sm.forced.l_force > rn)
    throw ConfigError(kModule, "config", "tail.l_force must not exceed ceil(sqrt(theorem2.n))");
  McEstimate surv;
  const auto pop = forced_jump_population(x, law, n, sm, cfg.get_count("theorem2.samples"),
                                          root.child("forced-jump"), &surv);
  if (pop.empty()) throw DegenerateWeights(kModule, "run_theorem2_study", "no particle alive at n");
  r.data["jump_read_at"] = pop.front().first_step;

  struct Cluster {
    double w = 0.0;
    bool top = false;
  };
  std::map<std::pair<int, std::size_t>, Cluster> clusters;  // one per first-level ancestor
  std::vector<double> sizes, weights, ranges;
  double W = 0.0, Wt = 0.0;
  bool ordered = true;
  std::ostringstream os;
  os.precision(10);
  os << "replicate,ancestor,size,range,weight,side\n";
  for (const auto& c : pop) {
    const double gb = c.first_gaps.front(), gt = c.first_gaps.back();
    const bool top = gt >= gb;
    double span = 0.0;
    for (double g : c.final_gaps) {
      ordered = ordered && g > 0.0;
      span += g;
    }
    for (double g : c.first_gaps) ordered = ordered && g > 0.0;
    sizes.push_back(std::max(gt, gb) / sqn);
    ranges.push_back(span / sqn);
    weights.push_back(c.weight);
    W += c.weight;
    if (top) Wt += c.weight;
    auto& cl = clusters[{c.replicate, c.ancestor}];
    cl.w += c.weight;
    cl.top = top;
    os << c.replicate << "," << c.ancestor << "," << sizes.back() << "," << ranges.back() << "," << c.weight << ","
       << (top ? "top" : "bottom") << "\n";
  }
  write_file(env.out_dir / "conditioned_paths.csv", os.str());
  // The side is fixed by the ancestor, so clusters are the sampling units.
  const double freq = Wt / W;
  double var = 0.0, W2 = 0.0;
  for (const auto& [key, cl] : clusters) {
    var += cl.w * cl.w * std::pow((cl.top ? 1.0 : 0.0) - freq, 2);
    W2 += cl.w * cl.w;
  }
  const double freq_se = std::sqrt(var) / W;
  const double ess = W * W / W2;
  r.data["survival"] = est_json(surv);
  r.data["particles"] = pop.size();
  r.data["ancestors"] = clusters.size();
  r.data["ancestor_ess"] = ess;

  const double joint = std::hypot(freq_se, mw.p_of_x.std_error);
  add(r, 8, "jump_side_frequency", std::abs(freq - mw.p_of_x.value) <= 3.0 * joint,
      {{"top_frequency", freq}, {"stderr", freq_se}, {"p_of_x", mw.p_of_x.value}, {"p_of_x_stderr", mw.p_of_x.std_error},
       {"ancestor_ess", ess}},
      "|top frequency - p(x)| <= 3 joint stderr");
  const double ks = ks_distance(sizes, [&](double y) { return f.cdf(y); }, weights);
  add(r, 8, "jump_size_vs_f", ks <= 0.1, {{"ks", ks}, {"ancestor_ess", ess}}, "weighted KS to the tabulated f <= 0.1");
  add(r, 8, "conditioned_paths_ordered", ordered, {{"particles", pop.size()}}, "every gap positive at r_n and at n");

  st.begin("limit process");
  {
    const auto grid = unit_time_grid(static_cast<int>(cfg.get_int("grids.time_points")));
    LimitProcessOptions lo;
    lo.a = cfg.get_real("theorem2.a");
    lo.proposals = static_cast<int>(cfg.get_int("theorem2.proposals"));
    const RngStream ls = root.child("limit");
    auto lparts = run_blocks(cfg.get_count("theorem2.limit_paths"), [&](std::uint64_t b, std::uint64_t e) {
      std::vector<double> out;
      for (std::uint64_t i = b; i < e; ++i) {
        RngStream rng = path_stream(ls, i);
        const LimitStart s0 = sample_limit_start(f, rng);
        const LimitPath p = sample_limit_process(s0.point, grid, rng, lo);
        const double* end = p.row(p.times.size() - 1);
        out.push_back(end[k - 1] - end[0]);
      }
      return out;
    }, 64);
    std::vector<double> lim;
    for (auto& p : lparts) lim.insert(lim.end(), p.begin(), p.end());
    const double d = ks_weighted_two_sample(ranges, weights, lim);
    add(r, 0, "range_at_1_vs_limit", d <= 0.1, {{"ks", d}, {"limit_paths", lim.size()}},
        "weighted KS of (X_k - X_1)(1) against the limit process <= 0.1");
  }
  st.finish();
  return r;
}

ComparisonReport run_kernel_audit(const ExperimentConfig& cfg, const ExperimentEnv& env) {
  ComparisonReport r = new_report("audit", cfg);
  Stage st{r, env.progress, {}, {}};
  const WalkParams params = cfg.params();
  validate_params(params);
  const IncrementLaw law = law_of(params);
  const auto x = checked_start(cfg, params, "start.x");
  const RngStream root = experiment_stream(cfg, "audit");

  st.begin("surrogates");
  const HarmonicContext ctx = HarmonicContext::build(law, params.k, v_spec_of(cfg), u_spec_of(cfg),
                                                     root.child("surrogate"), cfg.get_text("harmonic.cache"));

  st.begin("kernel mass");
  {
    auto panel = random_gap_states(params.k, static_cast<int>(cfg.get_int("chain.panel_states")) - 1, 0.3, 5.0,
                                   root.child("panel"));
    panel.insert(panel.begin(), x);
    BranchOptions bo;
    bo.u = UEstimator::Series;
    bo.series = series_of(cfg);
    bo.one_step_samples = cfg.get_count("harmonic.one_step_samples");
    json rows = json::array();
    bool mass_ok = true, stay_ok = true, pq_ok = true;
    for (std::size_t i = 0; i < panel.size(); ++i) {
      const BranchProbs b = kernel_branch_probs(panel[i], ctx, bo, root.child("mass").child(i));
      const bool m_ok = std::abs(b.mass.value - 1.0) <= 3.0 * b.mass.std_error && std::abs(b.mass.value - 1.0) <= 0.01;
      const bool s_ok = b.stay.value < 1.0 - 3.0 * b.stay.std_error;
      const MixtureWeights mw = mixture_weights(panel[i], law, ctx.v, bo.series, root.child("pq").child(i));
      const double pq = mw.p_of_x.value + mw.q_of_x.value;
      const bool w_ok = std::abs(pq - 1.0) <= 2.0 * std::hypot(mw.p_of_x.std_error, mw.q_of_x.std_error);
      mass_ok = mass_ok && m_ok;
      stay_ok = stay_ok && s_ok;
      pq_ok = pq_ok && w_ok;
      rows.push_back({{"x", panel[i]},
                      {"stay", est_json(b.stay)},
                      {"freeze_top", est_json(b.freeze_top)},
                      {"freeze_bottom", est_json(b.freeze_bottom)},
                      {"mass", est_json(b.mass)},
                      {"u", est_json(b.u)},
                      {"v_x", b.v_x},
                      {"p_of_x", mw.p_of_x.value},
                      {"q_of_x", mw.q_of_x.value},
                      {"mass_pass", m_ok},
                      {"stay_pass", s_ok}});
    }
    r.data["panel"] = rows;
    add(r, 4, "kernel_mass", mass_ok && stay_ok, {{"mass_ok", mass_ok}, {"stay_below_one", stay_ok}},
        "|mass - 1| <= 3 joint stderr and <= 0.01; stay < 1 - 3 stderr at every panel state");
    add(r, 0, "panel_p_plus_q", pq_ok, {{"states", panel.size()}}, "p(x) + q(x) = 1 within 2 stderr");
  }

  st.begin("absorption");
  {
    bool ok = true;
    for (int i = 0; i < 20 && ok; ++i) {
      RngStream rng = root.child("absorption").child(static_cast<std::uint64_t>(i));
      const Trajectory t = run_chain(CompactPoint::in_chamber(x), 200, ctx,
                                     static_cast<int>(cfg.get_int("chain.lifetime_batch")), rng);
      bool frozen = false;
      int freezes = 0;
      for (const auto& s : t.steps) {
        if (frozen && s.to.frozen == Frozen::None) ok = false;
        if (s.branch == Branch::FreezeTop || s.branch == Branch::FreezeBottom) ++freezes;
        frozen = s.to.frozen != Frozen::None;
      }
      ok = ok && freezes <= 1;
    }
    add(r, 0, "strata_absorbing", ok, {{"trajectories", 20}}, "no exit from a frozen stratum; at most one freeze");
  }

  st.begin("lifetimes");
  {
    const std::uint64_t n = cfg.get_count("chain.lifetime_samples");
    const std::int64_t cap = cfg.get_int("chain.lifetime_cap");
    const int M = static_cast<int>(cfg.get_int("chain.lifetime_batch"));
    const auto killed = killed_chain_lifetime(x, ctx, n, cap, M, root.child("killed"));
    const auto freeze = time_to_freeze(x, ctx, n, cap, M, root.child("freeze"));
    std::vector<double> a, b;
    double capped = 0;
    MomentSums life;
    std::ostringstream os;
    os << "sample,killed_lifetime,killed_capped,time_to_freeze,freeze_capped\n";
    for (std::size_t i = 0; i < killed.size(); ++i) {
      a.push_back(static_cast<double>(killed[i].lifetime));
      b.push_back(static_cast<double>(freeze[i].lifetime));
      capped += killed[i].capped ? 1 : 0;
      life.add(a.back());
      os << i << "," << killed[i].lifetime << "," << killed[i].capped << "," << freeze[i].lifetime << ","
         << freeze[i].capped << "\n";
    }
    write_file(env.out_dir / "lifetimes.csv", os.str());
    const double frac = capped / static_cast<double>(n);
    const double ks = ks_two_sample(a, b);
    r.data["lifetime_mean"] = {{"value", life.mean()}, {"stderr", life.std_error()}};
    add(r, 9, "lifetime", frac < 1e-3 && ks < 0.05,
        {{"cap", cap}, {"cap_survival_fraction", frac}, {"ks_killed_vs_freeze", ks}, {"samples", n},
         {"max_lifetime", *std::max_element(a.begin(), a.end())}},
        "cap-survival fraction < 1e-3; KS(killed lifetime, time to freeze) < 0.05");
  }
  st.finish();
  return r;
}

}  // namespace ordwalk
