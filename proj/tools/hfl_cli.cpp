// hfl: command-line front end over the C API. Every subcommand prints CSV
// (or short text for classify) to stdout or, with --output, writes it
// atomically through a temporary file.
#include <CLI11.hpp>

#include <hfl/hfl.h>

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInternal = 2;

// Thrown by command bodies; carries the exit code.
struct CliFailure : std::runtime_error {
  int code;
  CliFailure(int c, const std::string& what) : std::runtime_error(what), code(c) {}
};

int exit_code_for(hfl_status s) {
  switch (s) {
    case HFL_ERR_DEPTH_EXCEEDED:
    case HFL_ERR_NO_CONVERGENCE:
    case HFL_ERR_INCONCLUSIVE:
    case HFL_ERR_BRACKET_SCAN_EXHAUSTED:
    case HFL_ERR_SERIES_NOT_CONVERGED:
    case HFL_ERR_INTERNAL:
      return kExitInternal;
    default:
      return kExitUsage;
  }
}

void check(hfl_status s) {
  if (s != HFL_OK) {
    std::string msg = hfl_last_error();
    if (msg.empty()) msg = hfl_status_name(s);
    throw CliFailure(exit_code_for(s), msg);
  }
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Comma-separated numbers, or start:stop:count for an evenly spaced grid.
std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  auto number = [&](const std::string& s) {
    size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size())
      throw CliFailure(kExitUsage, std::string(what) + ": cannot parse '" + s + "'");
    return v;
  };
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(CLI::detail::trim_copy(p));
    if (parts.size() != 3) throw CliFailure(kExitUsage, std::string(what) + ": expected start:stop:count");
    const double lo = number(parts[0]), hi = number(parts[1]);
    const double cnt = number(parts[2]);
    if (cnt < 1 || cnt != std::floor(cnt)) throw CliFailure(kExitUsage, std::string(what) + ": bad count");
    const int n = static_cast<int>(cnt);
    for (int i = 0; i < n; ++i) out.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
    return out;
  }
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ',');) out.push_back(number(CLI::detail::trim_copy(p)));
  if (out.empty()) throw CliFailure(kExitUsage, std::string(what) + ": empty list");
  return out;
}

// Writes to stdout, or to `path` through a sibling temporary and rename.
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
    std::fflush(stdout);
    return;
  }
  const std::string tmp = path + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw CliFailure(kExitUsage, "cannot open '" + tmp + "' for writing");
    f << text;
    f.flush();
    if (!f) {
      std::remove(tmp.c_str());
      throw CliFailure(kExitUsage, "write to '" + tmp + "' failed");
    }
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw CliFailure(kExitUsage, "cannot rename '" + tmp + "' to '" + path + "'");
  }
}

struct Model {
  hfl_model* h = nullptr;
  Model(double k, double a, double L) { check(hfl_model_create(k, a, L, &h)); }
  ~Model() { hfl_model_destroy(h); }
  Model(const Model&) = delete;
  Model& operator=(const Model&) = delete;
};

struct Density {
  hfl_density* h = nullptr;
  Density(const Model& m, int n_max, double tau_min) { check(hfl_density_create(m.h, n_max, tau_min, &h)); }
  ~Density() { hfl_density_destroy(h); }
  Density(const Density&) = delete;
  Density& operator=(const Density&) = delete;
};

struct Options {
  double k = 0.5, a = 1.0, L = 1.0;
  std::string output;
  std::string config;
  std::string preset;

  double eps = -1.0;  // classify; <= 0 means L/2
  int n = 4;
  int n_max = 25;
  double tau_min = 0.01;

  std::string x = "0.5";
  double t = 0.0;
  std::string T = "0.2";
  int grid = 50;
  std::string maturities;
  std::string pricer = "analytic";

  std::string payoff = "one";
  double strike = 0.5;
  double f_offset = 0.0;

  double x0 = 0.5;
  double dt = 1e-4;
  double horizon = 1.0;
  long long paths = 10000;
  unsigned long long seed = 1;
  std::string measure = "P";
  int threads = 0;
  int bins = 50;
  bool bridge = true;
  std::string times;
  std::string terminal;
  std::string histogram;
  bool zero_f_prime = false;
};

hfl_payoff make_payoff(const Options& o) {
  if (o.payoff == "one") return {HFL_PAYOFF_ONE, 0.0};
  if (o.payoff == "linear") return {HFL_PAYOFF_LINEAR, 0.0};
  if (o.payoff == "put-on-rate") return {HFL_PAYOFF_PUT_ON_RATE, o.strike};
  throw CliFailure(kExitUsage, "unknown payoff '" + o.payoff + "' (one, linear, put-on-rate)");
}

hfl_sim_config make_sim(const Options& o) {
  hfl_sim_config c;
  hfl_sim_config_default(&c);
  c.x0 = o.x0;
  c.dt = o.dt;
  c.horizon = o.horizon;
  c.n_paths = o.paths;
  c.seed = o.seed;
  if (o.measure == "P")
    c.measure = HFL_MEASURE_P;
  else if (o.measure == "Ptilde" || o.measure == "P_tilde")
    c.measure = HFL_MEASURE_P_TILDE;
  else
    throw CliFailure(kExitUsage, "unknown measure '" + o.measure + "' (P, Ptilde)");
  c.threads = o.threads;
  c.hist_bins = o.bins;
  c.bridge = o.bridge ? 1 : 0;
  return c;
}

// Commands ------------------------------------------------------------------

int cmd_classify(const Options& o) {
  Model m(o.k, o.a, o.L);
  hfl_classification c;
  check(hfl_classify(m.h, o.eps > 0.0 ? o.eps : 0.5 * o.L, &c));
  char spec[96];
  check(hfl_spectrum_text(m.h, spec, sizeof spec));
  std::ostringstream out;
  out << "origin: " << hfl_boundary_name(c.boundary) << "; spectrum: " << spec << "\n";
  int rc = kExitOk;
  if (c.numeric_status == HFL_OK) {
    auto integral = [](bool finite, double v) { return finite ? "finite " + fmt(v) : std::string("infinite"); };
    out << "numeric origin: " << hfl_boundary_name(c.numeric_boundary) << "\n"
        << "I0: " << integral(c.i0_finite, c.i0_estimate) << "\n"
        << "J0: " << integral(c.j0_finite, c.j0_estimate) << "\n";
    if (c.numeric_boundary != c.boundary) {
      out << "disagreement: closed-form and numeric classes differ\n";
      rc = kExitInternal;
    }
  } else {
    out << "numeric origin: undecided (" << hfl_status_name(static_cast<hfl_status>(c.numeric_status))
        << ")\n";
    rc = kExitInternal;
  }
  emit(o.output, out.str());
  return rc;
}

int cmd_eigen(const Options& o) {
  Model m(o.k, o.a, o.L);
  hfl_eigen* e = nullptr;
  check(hfl_eigen_solve(m.h, o.n, &e));
  std::ostringstream out;
  out << "n,lambda,c_n,residual\n";
  try {
    for (int i = 1; i <= o.n; ++i) {
      double lambda = 0.0, c_n = 0.0, res = 0.0;
      check(hfl_eigen_pair(e, i, &lambda, &c_n));
      check(hfl_eigen_equation(m.h, lambda, &res));
      out << i << "," << fmt(lambda) << "," << fmt(c_n) << "," << fmt(res) << "\n";
    }
  } catch (...) {
    hfl_eigen_destroy(e);
    throw;
  }
  hfl_eigen_destroy(e);
  emit(o.output, out.str());
  return kExitOk;
}

int cmd_density(const Options& o) {
  if (o.grid < 1) throw CliFailure(kExitUsage, "--grid must be >= 1");
  const std::vector<double> xs = parse_list(o.x, "--x");
  if (xs.size() != 1) throw CliFailure(kExitUsage, "--x takes a single value for density");
  const std::vector<double> Ts = parse_list(o.T, "--T");
  Model m(o.k, o.a, o.L);
  Density d(m, o.n_max, o.tau_min);
  std::ostringstream out;
  const bool sweep = Ts.size() > 1;
  out << (sweep ? "T,y,gamma\n" : "y,gamma\n");
  for (double T : Ts) {
    for (int i = 1; i <= o.grid; ++i) {
      const double y = o.L * i / o.grid;
      // The killed density obeys the Dirichlet condition at the absorbing
      // level, so the y = L row is its boundary value.
      double g = 0.0;
      if (i < o.grid) check(hfl_density_eval(d.h, o.t, xs[0], T, y, &g, nullptr));
      if (sweep) out << fmt(T) << ",";
      out << fmt(y) << "," << fmt(g) << "\n";
    }
  }
  emit(o.output, out.str());
  return kExitOk;
}

hfl_pricer parse_pricer(const std::string& s) {
  if (s == "analytic") return HFL_PRICER_ANALYTIC;
  if (s == "duhamel") return HFL_PRICER_DUHAMEL;
  throw CliFailure(kExitUsage, "unknown pricer '" + s + "' (analytic, duhamel)");
}

int cmd_bond(const Options& o, const char* default_maturities, bool allow_t) {
  const std::vector<double> xs = parse_list(o.x, "--x");
  const std::vector<double> Ts =
      parse_list(o.maturities.empty() ? default_maturities : o.maturities, "--maturities");
  const hfl_pricer pricer = parse_pricer(o.pricer);
  const double t = allow_t ? o.t : 0.0;
  Model m(o.k, o.a, o.L);
  Density d(m, o.n_max, o.tau_min);
  std::ostringstream out;
  const bool sweep = xs.size() > 1;
  out << (sweep ? "x,T,B,Y\n" : "T,B,Y\n");
  for (double x : xs) {
    std::vector<double> B(Ts.size()), Y(Ts.size());
    if (t == 0.0) {
      check(hfl_yield_curve(d.h, pricer, x, Ts.data(), Ts.size(), B.data(), Y.data()));
    } else {
      for (size_t i = 0; i < Ts.size(); ++i) {
        if (pricer == HFL_PRICER_ANALYTIC) {
          check(hfl_bond(d.h, t, x, Ts[i], &B[i]));
        } else {
          hfl_duhamel r;
          check(hfl_price_general(d.h, {HFL_PAYOFF_ONE, 0.0}, t, x, Ts[i], 0.0, &r));
          B[i] = r.value;
        }
        Y[i] = -std::log(B[i]) / (Ts[i] - t);
      }
    }
    for (size_t i = 0; i < Ts.size(); ++i) {
      if (sweep) out << fmt(x) << ",";
      out << fmt(Ts[i]) << "," << fmt(B[i]) << "," << fmt(Y[i]) << "\n";
    }
  }
  emit(o.output, out.str());
  return kExitOk;
}

int cmd_price(const Options& o) {
  const hfl_payoff pay = make_payoff(o);
  const std::vector<double> xs = parse_list(o.x, "--x");
  const std::vector<double> Ts = parse_list(o.T, "--T");
  Model m(o.k, o.a, o.L);
  Density d(m, o.n_max, o.tau_min);
  std::ostringstream out;
  out << "payoff,strike,t,x,T,value,sliver,sliver_bound\n";
  for (double x : xs)
    for (double T : Ts) {
      hfl_duhamel r;
      check(hfl_price_general(d.h, pay, o.t, x, T, o.f_offset, &r));
      out << o.payoff << "," << (pay.kind == HFL_PAYOFF_PUT_ON_RATE ? fmt(o.strike) : std::string()) << ","
          << fmt(o.t) << "," << fmt(x) << "," << fmt(T) << "," << fmt(r.value) << "," << fmt(r.sliver)
          << "," << fmt(r.sliver_bound) << "\n";
    }
  emit(o.output, out.str());
  return kExitOk;
}

int cmd_simulate(const Options& o) {
  const hfl_payoff pay = make_payoff(o);
  const hfl_sim_config cfg = make_sim(o);
  std::vector<double> times = o.times.empty() ? std::vector<double>{o.horizon} : parse_list(o.times, "--times");
  Model m(o.k, o.a, o.L);
  hfl_sim* sim = nullptr;
  check(hfl_simulate(m.h, &cfg, pay, times.data(), times.size(), o.terminal.empty() ? 0 : 1, &sim));
  std::ostringstream out, hist, term;
  try {
    out << "time,price_mean,price_stderr,absorbed_at_0,absorbed_at_L\n";
    hist << "time,lower,upper,mass\n";
    term << "time,path,x\n";
    for (size_t i = 0; i < times.size(); ++i) {
      hfl_sim_summary s;
      check(hfl_sim_summary_at(sim, i, &s));
      out << fmt(s.time) << "," << fmt(s.price_mean) << "," << fmt(s.price_stderr) << ","
          << fmt(s.absorbed_at_0) << "," << fmt(s.absorbed_at_L) << "\n";
      size_t bins = 0;
      const double *edges = nullptr, *masses = nullptr;
      check(hfl_sim_histogram(sim, i, &bins, &edges, &masses));
      for (size_t b = 0; b < bins; ++b)
        hist << fmt(s.time) << "," << fmt(edges[b]) << "," << fmt(edges[b + 1]) << "," << fmt(masses[b]) << "\n";
      if (!o.terminal.empty()) {
        size_t n = 0;
        const double* v = nullptr;
        check(hfl_sim_terminal(sim, i, &n, &v));
        for (size_t p = 0; p < n; ++p) term << fmt(s.time) << "," << p << "," << fmt(v[p]) << "\n";
      }
    }
  } catch (...) {
    hfl_sim_destroy(sim);
    throw;
  }
  hfl_sim_destroy(sim);
  if (!o.histogram.empty()) emit(o.histogram, hist.str());
  if (!o.terminal.empty()) emit(o.terminal, term.str());
  emit(o.output, out.str());
  return kExitOk;
}

int cmd_compare(const Options& o) {
  hfl_sim_config cfg = make_sim(o);
  cfg.measure = HFL_MEASURE_P;
  const std::vector<double> Ts = parse_list(o.T, "--T");
  Model m(o.k, o.a, o.L);
  std::ostringstream out;
  out << "T,weighted_mean,weighted_stderr,tilde_mean,tilde_stderr,weight_mean,weight_stderr,"
         "combined_stderr,z\n";
  for (double T : Ts) {
    hfl_measure_report r;
    check(hfl_compare_measures(m.h, &cfg, T, o.zero_f_prime ? 1 : 0, &r));
    const double z = r.combined_stderr > 0.0 ? (r.weighted_mean - r.tilde_mean) / r.combined_stderr : 0.0;
    out << fmt(T) << "," << fmt(r.weighted_mean) << "," << fmt(r.weighted_stderr) << "," << fmt(r.tilde_mean)
        << "," << fmt(r.tilde_stderr) << "," << fmt(r.weight_mean) << "," << fmt(r.weight_stderr) << ","
        << fmt(r.combined_stderr) << "," << fmt(z) << "\n";
  }
  emit(o.output, out.str());
  return kExitOk;
}

// Config files and presets ---------------------------------------------------

using KeyValues = std::vector<std::pair<std::string, std::string>>;

const std::map<std::string, KeyValues>& presets() {
  static const std::map<std::string, KeyValues> p = {
      {"fig-eigen", {{"k", "0.5"}, {"a", "1"}, {"L", "1"}, {"n", "4"}}},
      {"fig-density-khalf",
       {{"k", "0.5"}, {"a", "1"}, {"L", "1"}, {"x", "0.5"}, {"t", "0"}, {"T", "0.05,0.1,0.15,0.2,0.25,0.3"},
        {"grid", "100"}}},
      {"fig-yield-kneghalf",
       {{"k", "-0.5"},
        {"a", "1"},
        {"L", "1"},
        {"x", "0.33333333333333331,0.5,0.66666666666666663"},
        {"maturities", "0.2:2:10"}}},
  };
  return p;
}

KeyValues read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CliFailure(kExitUsage, "cannot read config '" + path + "'");
  KeyValues kv;
  std::string line;
  for (int no = 1; std::getline(in, line); ++no) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    CLI::detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw CliFailure(kExitUsage, path + ":" + std::to_string(no) + ": expected 'key = value'");
    std::string key = CLI::detail::trim_copy(line.substr(0, eq));
    std::string value = CLI::detail::trim_copy(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw CliFailure(kExitUsage, path + ":" + std::to_string(no) + ": empty key or value");
    for (auto& ch : key)
      if (ch == '_') ch = '-';
    kv.emplace_back(key, value);
  }
  return kv;
}

// Value of --name / --name=value in raw argv, if present.
std::string scan_flag(const std::vector<std::string>& args, const std::string& name) {
  std::string found;
  for (size_t i = 0; i < args.size(); ++i) {
    if (args[i] == name && i + 1 < args.size())
      found = args[i + 1];
    else if (args[i].rfind(name + "=", 0) == 0)
      found = args[i].substr(name.size() + 1);
  }
  return found;
}

void add_model(CLI::App* s, Options& o, double default_k = 0.5) {
  o.k = default_k;
  s->add_option("--k", o.k, "family exponent")->capture_default_str();
  s->add_option("--a", o.a, "volatility scale (> 0)")->capture_default_str();
  s->add_option("--L", o.L, "absorbing upper level (> 0)")->capture_default_str();
  s->add_option("-o,--output", o.output, "write to this file atomically instead of stdout");
  s->add_option("--config", o.config, "key = value config file (default: $HFL_CONFIG)");
  s->add_option("--preset", o.preset, "parameter preset")
      ->check(CLI::IsMember({"fig-eigen", "fig-density-khalf", "fig-yield-kneghalf"}));
}

void add_spectral(CLI::App* s, Options& o) {
  s->add_option("--n-max", o.n_max, "eigenpairs in the k=1/2 expansion")->capture_default_str();
  s->add_option("--tau-min", o.tau_min, "shortest horizon accepted by the density")->capture_default_str();
}

void add_sim(CLI::App* s, Options& o) {
  s->add_option("--x0", o.x0, "initial rate")->capture_default_str();
  s->add_option("--dt", o.dt, "Euler step")->capture_default_str();
  s->add_option("--paths", o.paths, "number of paths")->capture_default_str();
  s->add_option("--seed", o.seed, "RNG seed")->capture_default_str();
  s->add_option("--threads", o.threads, "worker threads (0: all cores)")->capture_default_str();
  s->add_option("--bridge", o.bridge, "Brownian-bridge boundary-crossing test (true/false)")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Power-law short-rate models with an absorbing cap", "hfl"};
  app.require_subcommand(1);
  app.set_version_flag("--version", hfl_version());
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  Options o;
  std::map<CLI::App*, int (*)(const Options&)> run;

  auto* classify = app.add_subcommand("classify", "boundary and spectrum class of the origin");
  add_model(classify, o);
  classify->add_option("--eps", o.eps, "upper end of the I0/J0 probe (default L/2)");

  auto* eigen = app.add_subcommand("eigen", "eigenvalues and normalizers for k=1/2");
  add_model(eigen, o);
  eigen->add_option("--n", o.n, "number of eigenpairs")->capture_default_str();

  auto* density = app.add_subcommand("density", "transition density under the transformed measure");
  add_model(density, o);
  add_spectral(density, o);
  density->add_option("--x", o.x, "starting rate")->capture_default_str();
  density->add_option("--t", o.t, "start time")->capture_default_str();
  density->add_option("--T", o.T, "horizon(s): list or start:stop:count")->capture_default_str();
  density->add_option("--grid", o.grid, "y = L i / grid, i = 1..grid")->capture_default_str();

  auto* bond = app.add_subcommand("bond", "zero-coupon bond prices and yields");
  auto* yield = app.add_subcommand("yield", "spot yield curve at t=0");
  for (auto* s : {bond, yield}) {
    add_model(s, o);
    add_spectral(s, o);
    s->add_option("--x", o.x, "starting rate(s)")->capture_default_str();
    s->add_option("--maturities", o.maturities, "list or start:stop:count");
    s->add_option("--pricer", o.pricer, "analytic or duhamel")->capture_default_str();
  }
  bond->add_option("--t", o.t, "valuation time")->capture_default_str();

  auto* price = app.add_subcommand("price", "general payoff by Duhamel quadrature");
  add_model(price, o);
  add_spectral(price, o);
  price->add_option("--payoff", o.payoff, "one, linear or put-on-rate")->capture_default_str();
  price->add_option("--strike", o.strike, "strike of put-on-rate")->capture_default_str();
  price->add_option("--x", o.x, "starting rate(s)")->capture_default_str();
  price->add_option("--t", o.t, "valuation time")->capture_default_str();
  price->add_option("--T", o.T, "maturity(ies)")->capture_default_str();
  price->add_option("--f-offset", o.f_offset, "additive constant in f (prices are invariant)")
      ->capture_default_str();

  auto* simulate = app.add_subcommand("simulate", "Euler-Maruyama Monte Carlo of the discounted payoff");
  add_model(simulate, o);
  add_sim(simulate, o);
  simulate->add_option("--horizon", o.horizon, "simulation horizon")->capture_default_str();
  simulate->add_option("--times", o.times, "observation times on the dt grid (default: horizon)");
  simulate->add_option("--measure", o.measure, "P or Ptilde")->capture_default_str();
  simulate->add_option("--bins", o.bins, "terminal histogram bins")->capture_default_str();
  simulate->add_option("--payoff", o.payoff, "one, linear or put-on-rate")->capture_default_str();
  simulate->add_option("--strike", o.strike, "strike of put-on-rate")->capture_default_str();
  simulate->add_option("--terminal", o.terminal, "dump per-path terminal states to this CSV");
  simulate->add_option("--histogram", o.histogram, "write terminal histograms to this CSV");

  auto* compare = app.add_subcommand("compare-measures", "check the change of measure by simulation");
  add_model(compare, o);
  add_sim(compare, o);
  compare->add_option("--T", o.T, "horizon(s)")->capture_default_str();
  compare->add_flag("--zero-f-prime", o.zero_f_prime, "drop f' from the weight (negative control)");

  run[classify] = cmd_classify;
  run[eigen] = cmd_eigen;
  run[density] = cmd_density;
  run[bond] = [](const Options& op) { return cmd_bond(op, "0.25,0.5,1", true); };
  run[yield] = [](const Options& op) { return cmd_bond(op, "0.2:2:10", false); };
  run[price] = cmd_price;
  run[simulate] = cmd_simulate;
  run[compare] = cmd_compare;

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    // Config entries, then preset entries, then the user's own flags: with
    // TakeLast the last occurrence wins, so flags override both.
    size_t sub_pos = args.size();
    CLI::App* sub = nullptr;
    for (size_t i = 0; i < args.size(); ++i)
      if (!args[i].empty() && args[i][0] != '-') {
        sub = app.get_subcommand_ptr(args[i]).get();
        sub_pos = i;
        break;
      }
    if (sub) {
      std::set<std::string> known;
      for (auto* s : app.get_subcommands([](CLI::App*) { return true; }))
        for (const auto* op : s->get_options())
          for (const auto& ln : op->get_lnames()) known.insert(ln);
      for (const char* skip : {"help", "config", "preset", "output"}) known.erase(skip);

      std::vector<std::string> tail(args.begin() + sub_pos + 1, args.end());
      std::string cfg = scan_flag(tail, "--config");
      if (cfg.empty())
        if (const char* env = std::getenv("HFL_CONFIG")) cfg = env;
      KeyValues kv;
      if (!cfg.empty()) kv = read_config(cfg);
      const std::string preset = scan_flag(tail, "--preset");
      if (!preset.empty()) {
        const auto it = presets().find(preset);
        if (it != presets().end()) kv.insert(kv.end(), it->second.begin(), it->second.end());
      }
      std::vector<std::string> injected;
      for (const auto& [key, value] : kv) {
        if (!known.count(key)) throw CliFailure(kExitUsage, "config: unknown key '" + key + "'");
        const CLI::Option* opt = sub->get_option_no_throw("--" + key);
        if (!opt) continue;
        if (opt->get_expected_min() == 0) {
          if (CLI::detail::to_flag_value(value) > 0) injected.push_back("--" + key);
        } else {
          injected.push_back("--" + key + "=" + value);
        }
      }
      args.insert(args.begin() + sub_pos + 1, injected.begin(), injected.end());
    }
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  } catch (const CliFailure& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.code;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }

  for (auto& [sub, fn] : run) {
    if (!sub->parsed()) continue;
    try {
      return fn(o);
    } catch (const CliFailure& e) {
      std::fprintf(stderr, "error: %s\n", e.what());
      return e.code;
    } catch (const std::exception& e) {
      std::fprintf(stderr, "error: %s\n", e.what());
      return kExitInternal;
    }
  }
  return kExitUsage;
}
