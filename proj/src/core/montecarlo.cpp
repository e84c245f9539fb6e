#include "core/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <thread>

#include <boost/random/normal_distribution.hpp>

#include "core/error.hpp"

namespace hfl::mc {

namespace {

constexpr double kSqrt2 = 1.414213562373095048801688724209698;

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// x^(1-k) with the exponents of the two solvable cases spelled out.
struct PowerLaw {
  double k;
  int special;  // 0 generic, 1 k=1/2, 2 k=-1/2, 3 k=0

  explicit PowerLaw(double kk) : k(kk) {
    if (std::abs(kk - 0.5) < 1e-12)
      special = 1;
    else if (std::abs(kk + 0.5) < 1e-12)
      special = 2;
    else if (kk == 0.0)
      special = 3;
    else
      special = 0;
  }
  double operator()(double x) const {
    switch (special) {
      case 1: return std::sqrt(x);
      case 2: return x * std::sqrt(x);
      case 3: return x;
      default: return std::pow(x, 1.0 - k);
    }
  }
};

struct Coefficients {
  double a;
  double drift_c;   // a^2 (1/4 - k/2)
  double tilt_c;    // sqrt2 a, P~ drift excess: -sigma^2 f' = sqrt2 a x^{3/2-k}
  PowerLaw pw;
  bool tilde;
  double fp_c;      // f' = fp_c x^{k-1/2}, fp_c = -sqrt2/a

  // drift, vol and sigma f' at x > 0
  void eval(double x, double& mu, double& sig) const {
    const double s = pw(x);
    sig = a * s;
    mu = drift_c * s * s / x;
    if (tilde) mu += tilt_c * s * std::sqrt(x);
  }
  double sigma_fprime(double x) const { return fp_c * a * pw(x) * std::pow(x, pw.k - 0.5); }
};

// Ziggurat sampler; deterministic for a given engine state.
using Normal = boost::random::normal_distribution<double>;

struct PathResult {
  double integral;  // int_0^t X ds
  double state;
  int where;        // 0 interior, 1 absorbed at 0, 2 absorbed at L
  double log_weight;
};

struct Engine {
  const model::ModelParams& p;
  const SimConfig& cfg;
  Coefficients co;
  bool origin_absorbs;
  bool track_weight;
  TerminalFn f_prime_override;

  Engine(const model::ModelParams& pp, const SimConfig& c, bool weight, TerminalFn fpo)
      : p(pp),
        cfg(c),
        co{pp.a(), pp.a() * pp.a() * (0.25 - 0.5 * pp.k()), kSqrt2 * pp.a(), PowerLaw(pp.k()),
           c.measure == Measure::PTilde, -kSqrt2 / pp.a()},
        origin_absorbs(model::classify_origin(pp) != model::BoundaryClass::Natural),
        track_weight(weight),
        f_prime_override(std::move(fpo)) {}

  double theta(double x) const {
    if (f_prime_override) return co.a * co.pw(x) * f_prime_override(x);
    return co.sigma_fprime(x);
  }

  // One Euler step of length h from x. Returns the new state; sets `where`
  // when the step leaves (0, L). Steps below a natural origin are redone as
  // two half steps.
  template <class Rng>
  double step(double x, double h, Rng& rng, Normal& nd, int& where,
              double& integral, double& log_w, int depth) const {
    double mu, sig;
    co.eval(x, mu, sig);
    const double z = nd(rng);
    const double dw = std::sqrt(h) * z;
    const double y = x + mu * h + sig * dw;
    const double L = p.L();
    if (y <= 0.0 && !origin_absorbs && depth < 30) {
      const double mid = step(x, 0.5 * h, rng, nd, where, integral, log_w, depth + 1);
      if (where != 0) return mid;
      return step(mid, 0.5 * h, rng, nd, where, integral, log_w, depth + 1);
    }
    if (track_weight) {
      const double th = theta(x);
      log_w += -th * dw - 0.5 * th * th * h;
    }
    if (y >= L) {
      where = 2;
      integral += 0.5 * (x + L) * h;
      return L;
    }
    if (y <= 0.0) {
      if (origin_absorbs) {
        where = 1;
        integral += 0.5 * x * h;
        return 0.0;
      }
      // Resampling gave up: keep the path alive at half its previous level.
      const double v = 0.5 * x;
      integral += 0.5 * (x + v) * h;
      return v;
    }
    if (cfg.bridge) {
      // Brownian-bridge probabilities of an unseen crossing inside the step,
      // with the coefficients frozen at x.
      const double v = sig * sig * h;
      const double eu = 2.0 * (L - x) * (L - y) / v;
      const double el = 2.0 * x * y / v;
      const double pu = eu < 40.0 ? std::exp(-eu) : 0.0;
      const double pl = origin_absorbs && el < 40.0 ? std::exp(-el) : 0.0;
      if (pu + pl > 1e-15) {
        const double u = std::generate_canonical<double, 53>(rng);
        if (u < pu) {
          where = 2;
          integral += 0.5 * (x + L) * h;
          return L;
        }
        if (u < pu + pl) {
          where = 1;
          integral += 0.5 * x * h;
          return 0.0;
        }
      }
    }
    integral += 0.5 * (x + y) * h;
    return y;
  }

  // Runs one path and writes its state at each observation step.
  void run(std::int64_t index, const std::vector<std::int64_t>& obs_steps,
           const std::vector<double>& obs_times, std::int64_t grid_steps, double dt_last,
           PathResult* out) const {
    std::mt19937_64 rng(splitmix64(cfg.seed ^ splitmix64(static_cast<std::uint64_t>(index))));
    Normal nd(0.0, 1.0);
    const double L = p.L();
    double x = cfg.x0;
    int where = 0;
    if (x >= L) where = 2;
    if (x <= 0.0) where = 1;
    double integral = 0.0;
    double log_w = 0.0;
    double absorbed_time = 0.0;
    const std::int64_t total = obs_steps.back();
    std::size_t next = 0;
    for (std::int64_t i = 1; i <= total && where == 0; ++i) {
      const double h = (i == grid_steps) ? dt_last : cfg.dt;
      x = step(x, h, rng, nd, where, integral, log_w, 0);
      if (where != 0) absorbed_time = (i - 1) * cfg.dt + h;
      while (next < obs_steps.size() && obs_steps[next] == i && where == 0) {
        out[next] = {integral, x, 0, log_w};
        ++next;
      }
    }
    // Absorbed (or absorbed at the start): the frozen state accrues exactly.
    for (; next < obs_steps.size(); ++next) {
      const double t_obs = obs_times[next];
      const double frozen = where == 2 ? L : (where == 1 ? 0.0 : x);
      out[next] = {integral + frozen * (t_obs - absorbed_time), frozen, where, log_w};
    }
  }
};

std::int64_t steps_for(double t, double dt) {
  const double r = t / dt;
  const double n = std::round(r);
  if (std::abs(r - n) > 1e-9 * std::max(1.0, r)) return -1;
  return static_cast<std::int64_t>(n);
}

int thread_count(const SimConfig& cfg, std::int64_t n) {
  int t = cfg.threads > 0 ? cfg.threads : static_cast<int>(std::thread::hardware_concurrency());
  t = std::max(1, t);
  return static_cast<int>(std::min<std::int64_t>(t, n));
}

// Runs all paths; results[path * nobs + j].
std::vector<PathResult> run_paths(const Engine& eng, const std::vector<std::int64_t>& obs_steps,
                                  const std::vector<double>& obs_times, std::int64_t grid_steps,
                                  double dt_last) {
  const std::int64_t n = eng.cfg.n_paths;
  const std::size_t nobs = obs_steps.size();
  std::vector<PathResult> results(static_cast<std::size_t>(n) * nobs);
  const int nt = thread_count(eng.cfg, n);
  auto work = [&](int id) {
    for (std::int64_t i = id; i < n; i += nt) eng.run(i, obs_steps, obs_times, grid_steps, dt_last, &results[i * nobs]);
  };
  if (nt == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (int id = 0; id < nt; ++id) pool.emplace_back(work, id);
    for (auto& th : pool) th.join();
  }
  return results;
}

struct Welford {
  std::int64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;
  void add(double v) {
    ++n;
    const double d = v - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (v - mean);
  }
  double standard_error() const {
    if (n < 2) return 0.0;
    return std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n));
  }
};

}  // namespace

const char* to_string(Measure m) noexcept { return m == Measure::P ? "P" : "P_tilde"; }

void SimConfig::validate(const model::ModelParams& p) const {
  auto bad = [](const std::string& msg) { fail(ErrorCode::ConfigInvalid, "SimConfig: " + msg); };
  if (!(std::isfinite(x0) && x0 >= 0.0 && x0 <= p.L())) bad("x0 must lie in [0, L]");
  if (!(std::isfinite(dt) && dt > 0.0)) bad("dt must be > 0");
  if (!(std::isfinite(horizon) && horizon > 0.0)) bad("horizon must be > 0");
  if (dt > horizon) bad("dt must not exceed the horizon");
  if (horizon / dt > 1e9) bad("more than 1e9 steps per path");
  if (n_paths < 1) bad("n_paths must be >= 1");
  if (threads < 0) bad("threads must be >= 0");
  if (hist_bins < 1) bad("hist_bins must be >= 1");
}

std::vector<PathStats> simulate_at(const model::ModelParams& p, const SimConfig& cfg,
                                   const TerminalFn& g, const std::vector<double>& times) {
  cfg.validate(p);
  if (times.empty()) fail(ErrorCode::ConfigInvalid, "simulate: no observation times");
  // The grid is dt-spaced up to the horizon; a horizon off the grid ends
  // with one shorter step.
  std::int64_t total = static_cast<std::int64_t>(std::ceil(cfg.horizon / cfg.dt - 1e-9));
  total = std::max<std::int64_t>(total, 1);
  const double dt_last = cfg.horizon - (total - 1) * cfg.dt;

  std::vector<std::int64_t> obs;
  std::vector<double> obs_t;
  for (std::size_t j = 0; j < times.size(); ++j) {
    const double t = times[j];
    if (!(t > 0.0 && t <= cfg.horizon * (1.0 + 1e-12)))
      fail(ErrorCode::ConfigInvalid, "simulate: observation times must lie in (0, horizon]");
    std::int64_t s = std::abs(t - cfg.horizon) <= 1e-12 * cfg.horizon ? total : steps_for(t, cfg.dt);
    if (s < 1 || s > total) fail(ErrorCode::ConfigInvalid, "simulate: observation time off the dt grid");
    if (j > 0 && s <= obs.back())
      fail(ErrorCode::ConfigInvalid, "simulate: observation times must increase");
    obs.push_back(s);
    obs_t.push_back(s == total ? cfg.horizon : s * cfg.dt);
  }

  Engine eng(p, cfg, false, nullptr);
  const auto results = run_paths(eng, obs, obs_t, total, dt_last);
  const std::size_t nobs = obs.size();
  const double L = p.L();
  const double n = static_cast<double>(cfg.n_paths);

  std::vector<PathStats> out(nobs);
  for (std::size_t j = 0; j < nobs; ++j) {
    PathStats& st = out[j];
    st.time = obs_t[j];
    Histogram& hist = st.terminal_histogram;
    const int bins = cfg.hist_bins;
    hist.edges.resize(bins + 1);
    for (int b = 0; b <= bins; ++b) hist.edges[b] = L * b / bins;
    hist.counts.assign(bins, 0);
    Welford w;
    std::int64_t at0 = 0, atL = 0;
    if (cfg.keep_terminal) st.terminal.reserve(cfg.n_paths);
    for (std::int64_t i = 0; i < cfg.n_paths; ++i) {
      const PathResult& r = results[i * nobs + j];
      w.add(std::exp(-r.integral) * g(r.state));
      if (r.where == 1) ++at0;
      else if (r.where == 2) ++atL;
      else hist.counts[std::min(bins - 1, static_cast<int>(r.state / L * bins))]++;
      if (cfg.keep_terminal) st.terminal.push_back(r.state);
    }
    st.price_mean = w.mean;
    st.price_stderr = w.standard_error();
    st.absorbed_at_0 = static_cast<double>(at0) / n;
    st.absorbed_at_L = static_cast<double>(atL) / n;
    hist.masses.resize(bins);
    for (int b = 0; b < bins; ++b) hist.masses[b] = static_cast<double>(hist.counts[b]) / n;
  }
  return out;
}

PathStats simulate(const model::ModelParams& p, const SimConfig& cfg, const TerminalFn& g) {
  return simulate_at(p, cfg, g, {cfg.horizon}).front();
}

MeasureReport compare_measures(const model::ModelParams& p, const SimConfig& cfg, double T,
                               const CompareOptions& opts) {
  if (cfg.measure != Measure::P)
    fail(ErrorCode::ConfigInvalid, "compare_measures: simulation measure must be P");
  SimConfig base = cfg;
  base.horizon = T;
  base.validate(p);
  const auto phi = opts.test_fn ? opts.test_fn : TerminalFn([](double x) { return x; });

  std::int64_t total = static_cast<std::int64_t>(std::ceil(T / cfg.dt - 1e-9));
  total = std::max<std::int64_t>(total, 1);
  const double dt_last = T - (total - 1) * cfg.dt;
  const std::vector<std::int64_t> obs{total};

  Engine under_p(p, base, true, opts.f_prime);
  const auto rp = run_paths(under_p, obs, {T}, total, dt_last);
  SimConfig tilde = base;
  tilde.measure = Measure::PTilde;
  tilde.seed = splitmix64(cfg.seed ^ 0x5851f42d4c957f2dULL);
  Engine under_q(p, tilde, false, nullptr);
  const auto rq = run_paths(under_q, obs, {T}, total, dt_last);

  Welford wv, ww, wq;
  for (std::int64_t i = 0; i < cfg.n_paths; ++i) {
    const double z = std::exp(rp[i].log_weight);
    ww.add(z);
    wv.add(rp[i].where == 0 ? z * phi(rp[i].state) : 0.0);
    wq.add(rq[i].where == 0 ? phi(rq[i].state) : 0.0);
  }
  const double se_v = wv.standard_error(), se_q = wq.standard_error();
  return {wv.mean, se_v, wq.mean, se_q, ww.mean, ww.standard_error(),
          std::sqrt(se_v * se_v + se_q * se_q)};
}

DensityHistogram density_histogram(const model::ModelParams& p, const SimConfig& cfg, double T,
                                   int bins) {
  if (cfg.measure != Measure::PTilde)
    fail(ErrorCode::ConfigInvalid, "density_histogram: simulation measure must be P_tilde");
  if (bins < 1) fail(ErrorCode::ConfigInvalid, "density_histogram: bins must be >= 1");
  SimConfig c = cfg;
  c.horizon = T;
  c.hist_bins = bins;
  c.keep_terminal = false;
  const PathStats st = simulate(p, c, [](double) { return 1.0; });
  const auto& h = st.terminal_histogram;
  const double n = static_cast<double>(c.n_paths);
  const double width = p.L() / bins;
  DensityHistogram out;
  out.counts = h.counts;
  out.masses = h.masses;
  out.absorbed_at_0 = st.absorbed_at_0;
  out.absorbed_at_L = st.absorbed_at_L;
  out.n_paths = c.n_paths;
  for (int b = 0; b < bins; ++b) {
    const double m = h.masses[b];
    out.centers.push_back(0.5 * (h.edges[b] + h.edges[b + 1]));
    out.density.push_back(m / width);
    out.std_error.push_back(std::sqrt(m * (1.0 - m) / n) / width);
  }
  return out;
}

}  // namespace hfl::mc
