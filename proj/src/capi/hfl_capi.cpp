#include "hfl/hfl.h"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <exception>
#include <limits>
#include <memory>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "core/error.hpp"
#include "core/model.hpp"
#include "core/montecarlo.hpp"
#include "core/pricing.hpp"
#include "core/spectral.hpp"

struct hfl_model {
  hfl::model::ModelParams params;
};

struct hfl_eigen {
  hfl::spectral::EigenSystem sys;
};

struct hfl_density {
  hfl::spectral::DensityField field;
};

struct hfl_sim {
  std::vector<hfl::mc::PathStats> stats;
};

namespace {

thread_local std::string g_last_error;

hfl_status from_code(hfl::ErrorCode c) { return static_cast<hfl_status>(static_cast<int>(c)); }

// Runs fn, translating exceptions into status codes and the thread's
// last-error message.
template <class Fn>
hfl_status guarded(Fn&& fn) {
  try {
    fn();
    return HFL_OK;
  } catch (const hfl::Error& e) {
    g_last_error = e.what();
    return from_code(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return HFL_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return HFL_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return HFL_ERR_INTERNAL;
  }
}

hfl_status null_arg(const char* what) {
  g_last_error = std::string(what) + ": null pointer argument";
  return HFL_ERR_NULL_POINTER;
}

hfl::pricing::Payoff to_payoff(hfl_payoff p) {
  switch (p.kind) {
    case HFL_PAYOFF_ONE: return hfl::pricing::Payoff::one();
    case HFL_PAYOFF_LINEAR: return hfl::pricing::Payoff::linear();
    case HFL_PAYOFF_PUT_ON_RATE: return hfl::pricing::Payoff::put_on_rate(p.strike);
  }
  hfl::fail(hfl::ErrorCode::InvalidArgument, "unknown payoff kind");
}

hfl::mc::SimConfig to_config(const hfl_sim_config& c) {
  hfl::mc::SimConfig s;
  s.x0 = c.x0;
  s.dt = c.dt;
  s.horizon = c.horizon;
  s.n_paths = c.n_paths;
  s.seed = c.seed;
  if (c.measure != HFL_MEASURE_P && c.measure != HFL_MEASURE_P_TILDE)
    hfl::fail(hfl::ErrorCode::ConfigInvalid, "unknown measure");
  s.measure = c.measure == HFL_MEASURE_P ? hfl::mc::Measure::P : hfl::mc::Measure::PTilde;
  s.threads = c.threads;
  s.hist_bins = c.hist_bins;
  s.bridge = c.bridge != 0;
  return s;
}

hfl_boundary to_boundary(hfl::model::BoundaryClass b) {
  switch (b) {
    case hfl::model::BoundaryClass::Regular: return HFL_BOUNDARY_REGULAR;
    case hfl::model::BoundaryClass::Exit: return HFL_BOUNDARY_EXIT;
    case hfl::model::BoundaryClass::Natural: return HFL_BOUNDARY_NATURAL;
  }
  return HFL_BOUNDARY_NATURAL;
}

}  // namespace

extern "C" {

const char* hfl_version(void) { return "0.1.0"; }

const char* hfl_status_name(hfl_status status) {
  switch (status) {
    case HFL_OK: return "OK";
    case HFL_ERR_NULL_POINTER: return "NullPointer";
    case HFL_ERR_INTERNAL: return "Internal";
    default: break;
  }
  const int v = static_cast<int>(status);
  if (v >= 1 && v <= static_cast<int>(hfl::ErrorCode::ConfigInvalid))
    return hfl::to_string(static_cast<hfl::ErrorCode>(v));
  return "Unknown";
}

const char* hfl_last_error(void) { return g_last_error.c_str(); }

const char* hfl_boundary_name(hfl_boundary b) {
  switch (b) {
    case HFL_BOUNDARY_REGULAR: return "regular";
    case HFL_BOUNDARY_EXIT: return "exit";
    case HFL_BOUNDARY_NATURAL: return "natural";
  }
  return "unknown";
}

hfl_status hfl_model_create(double k, double a, double L, hfl_model** out) {
  if (!out) return null_arg("hfl_model_create");
  *out = nullptr;
  return guarded([&] { *out = new hfl_model{hfl::model::ModelParams(k, a, L)}; });
}

void hfl_model_destroy(hfl_model* model) { delete model; }

hfl_status hfl_model_params(const hfl_model* model, double* k, double* a, double* L) {
  if (!model || !k || !a || !L) return null_arg("hfl_model_params");
  *k = model->params.k();
  *a = model->params.a();
  *L = model->params.L();
  return HFL_OK;
}

hfl_status hfl_model_coefficients(const hfl_model* model, double x, hfl_coefficients* out) {
  if (!model || !out) return null_arg("hfl_model_coefficients");
  return guarded([&] {
    namespace m = hfl::model;
    const auto& p = model->params;
    *out = {m::drift(p, x),        m::vol(p, x),      m::drift_tilde(p, x),
            m::f_func(p, x),       m::f_prime(p, x),  m::f_second(p, x),
            m::scale_density(p, x), m::speed_density(p, x)};
  });
}

hfl_status hfl_classify(const hfl_model* model, double eps, hfl_classification* out) {
  if (!model || !out) return null_arg("hfl_classify");
  return guarded([&] {
    const auto& p = model->params;
    const auto spec = hfl::model::classify_spectrum(p);
    hfl_classification c{};
    c.boundary = to_boundary(hfl::model::classify_origin(p));
    c.spectrum = spec.kind == hfl::model::SpectrumKind::PurelyDiscrete
                     ? HFL_SPECTRUM_DISCRETE
                     : (spec.kind == hfl::model::SpectrumKind::PurelyContinuous ? HFL_SPECTRUM_CONTINUOUS
                                                                                 : HFL_SPECTRUM_MIXED);
    c.cutoff = spec.cutoff;
    c.i0_estimate = c.j0_estimate = std::numeric_limits<double>::quiet_NaN();
    try {
      const auto r = hfl::model::classify_origin_numeric(p, eps);
      c.numeric_status = HFL_OK;
      c.numeric_boundary = to_boundary(r.boundary);
      c.i0_finite = r.i0_finite;
      c.j0_finite = r.j0_finite;
      c.i0_estimate = r.i0_estimate;
      c.j0_estimate = r.j0_estimate;
    } catch (const hfl::Error& e) {
      if (e.code() == hfl::ErrorCode::InvalidArgument) throw;
      c.numeric_status = from_code(e.code());
      c.numeric_boundary = c.boundary;
    }
    *out = c;
  });
}

hfl_status hfl_spectrum_text(const hfl_model* model, char* buf, size_t size) {
  if (!model || !buf) return null_arg("hfl_spectrum_text");
  return guarded([&] {
    const std::string s = hfl::model::to_string(hfl::model::classify_spectrum(model->params));
    if (s.size() + 1 > size) hfl::fail(hfl::ErrorCode::InvalidArgument, "hfl_spectrum_text: buffer too small");
    std::memcpy(buf, s.c_str(), s.size() + 1);
  });
}

hfl_status hfl_eigen_solve(const hfl_model* model, int n_max, hfl_eigen** out) {
  if (!model || !out) return null_arg("hfl_eigen_solve");
  *out = nullptr;
  return guarded([&] { *out = new hfl_eigen{hfl::spectral::solve_eigen(model->params, n_max)}; });
}

void hfl_eigen_destroy(hfl_eigen* eigen) { delete eigen; }

hfl_status hfl_eigen_count(const hfl_eigen* eigen, int* n) {
  if (!eigen || !n) return null_arg("hfl_eigen_count");
  *n = eigen->sys.n_max();
  return HFL_OK;
}

hfl_status hfl_eigen_pair(const hfl_eigen* eigen, int n, double* lambda, double* c_n) {
  if (!eigen || !lambda || !c_n) return null_arg("hfl_eigen_pair");
  return guarded([&] {
    const auto& e = eigen->sys.pair(n);
    *lambda = e.lambda;
    *c_n = e.c_n;
  });
}

hfl_status hfl_eigen_psi(const hfl_eigen* eigen, int n, double x, double* out) {
  if (!eigen || !out) return null_arg("hfl_eigen_psi");
  return guarded([&] { *out = hfl::spectral::psi_n(eigen->sys, n, x); });
}

hfl_status hfl_eigen_equation(const hfl_model* model, double lambda, double* out) {
  if (!model || !out) return null_arg("hfl_eigen_equation");
  return guarded([&] { *out = hfl::spectral::eigen_equation(model->params, lambda); });
}

hfl_status hfl_psi_rho(const hfl_model* model, double rho, double x, double* out) {
  if (!model || !out) return null_arg("hfl_psi_rho");
  return guarded([&] { *out = hfl::spectral::psi_rho(model->params, rho, x); });
}

hfl_status hfl_greens_wronskian(const hfl_model* model, double lambda, double x, double* out) {
  if (!model || !out) return null_arg("hfl_greens_wronskian");
  return guarded([&] { *out = hfl::spectral::greens_wronskian(model->params, lambda, x); });
}

hfl_status hfl_density_create(const hfl_model* model, int n_max, double tau_min, hfl_density** out) {
  if (!model || !out) return null_arg("hfl_density_create");
  *out = nullptr;
  return guarded([&] {
    hfl::spectral::DensityOptions opts;
    if (tau_min > 0.0) opts.tau_min = tau_min;
    *out = new hfl_density{hfl::spectral::DensityField::for_params(model->params, n_max, opts)};
  });
}

void hfl_density_destroy(hfl_density* density) { delete density; }

hfl_status hfl_density_eval(const hfl_density* density, double t, double x, double T, double y,
                            double* value, double* tail_bound) {
  if (!density || !value) return null_arg("hfl_density_eval");
  return guarded([&] {
    const auto v = density->field.evaluate(t, x, T, y);
    *value = v.value;
    if (tail_bound) *tail_bound = v.tail_bound;
  });
}

hfl_status hfl_q_source(const hfl_model* model, hfl_payoff payoff, double t, double x, double T,
                        double f_offset, double* out) {
  if (!model || !out) return null_arg("hfl_q_source");
  return guarded([&] { *out = hfl::pricing::q_source(model->params, to_payoff(payoff), t, x, T, f_offset); });
}

hfl_status hfl_price_general(const hfl_density* density, hfl_payoff payoff, double t, double x,
                             double T, double f_offset, hfl_duhamel* out) {
  if (!density || !out) return null_arg("hfl_price_general");
  return guarded([&] {
    hfl::pricing::DuhamelOptions opts;
    opts.f_offset = f_offset;
    const auto& f = density->field;
    const auto r = hfl::pricing::price_general(f.params(), f, to_payoff(payoff), t, x, T, opts);
    *out = {r.value, r.sliver, r.sliver_bound};
  });
}

hfl_status hfl_bond(const hfl_density* density, double t, double x, double T, double* out) {
  if (!density || !out) return null_arg("hfl_bond");
  return guarded([&] {
    const auto& f = density->field;
    hfl::pricing::BondOptions opts;
    opts.tau_min = f.options().tau_min;
    if (f.is_discrete())
      *out = hfl::pricing::bond_k_half(f.params(), *f.eigen_system(), t, x, T, opts);
    else
      *out = hfl::pricing::bond_k_neg_half(f.params(), t, x, T, opts);
  });
}

hfl_status hfl_yield_curve(const hfl_density* density, hfl_pricer pricer, double x,
                           const double* maturities, size_t n, double* bonds, double* yields) {
  if (!density || !maturities || !bonds || !yields) return null_arg("hfl_yield_curve");
  return guarded([&] {
    const auto& f = density->field;
    hfl::pricing::BondOptions opts;
    opts.tau_min = f.options().tau_min;
    const auto which = pricer == HFL_PRICER_DUHAMEL ? hfl::pricing::Pricer::Duhamel
                                                    : hfl::pricing::Pricer::Analytic;
    const auto curve = hfl::pricing::yield_curve(f.params(), which, f, x,
                                                 std::vector<double>(maturities, maturities + n), opts);
    for (size_t i = 0; i < n; ++i) {
      bonds[i] = curve[i].bond;
      yields[i] = curve[i].yield;
    }
  });
}

void hfl_sim_config_default(hfl_sim_config* cfg) {
  if (!cfg) return;
  const hfl::mc::SimConfig d;
  *cfg = {d.x0, d.dt, d.horizon, d.n_paths, d.seed, HFL_MEASURE_P, d.threads, d.hist_bins, d.bridge ? 1 : 0};
}

hfl_status hfl_simulate(const hfl_model* model, const hfl_sim_config* cfg, hfl_payoff payoff,
                        const double* times, size_t n_times, int keep_terminal, hfl_sim** out) {
  if (!model || !cfg || !out || (n_times > 0 && !times)) return null_arg("hfl_simulate");
  *out = nullptr;
  return guarded([&] {
    auto c = to_config(*cfg);
    c.keep_terminal = keep_terminal != 0;
    const auto pay = to_payoff(payoff);
    std::vector<double> ts(times, times + n_times);
    if (ts.empty()) ts.push_back(c.horizon);
    auto sim = std::make_unique<hfl_sim>();
    sim->stats = hfl::mc::simulate_at(model->params, c, pay.g, ts);
    *out = sim.release();
  });
}

void hfl_sim_destroy(hfl_sim* sim) { delete sim; }

hfl_status hfl_sim_summary_at(const hfl_sim* sim, size_t index, hfl_sim_summary* out) {
  if (!sim || !out) return null_arg("hfl_sim_summary_at");
  return guarded([&] {
    if (index >= sim->stats.size()) hfl::fail(hfl::ErrorCode::IndexOutOfRange, "hfl_sim_summary_at: index");
    const auto& s = sim->stats[index];
    *out = {s.time, s.price_mean, s.price_stderr, s.absorbed_at_0, s.absorbed_at_L};
  });
}

hfl_status hfl_sim_histogram(const hfl_sim* sim, size_t index, size_t* bins, const double** edges,
                             const double** masses) {
  if (!sim || !bins || !edges || !masses) return null_arg("hfl_sim_histogram");
  return guarded([&] {
    if (index >= sim->stats.size()) hfl::fail(hfl::ErrorCode::IndexOutOfRange, "hfl_sim_histogram: index");
    const auto& h = sim->stats[index].terminal_histogram;
    *bins = h.masses.size();
    *edges = h.edges.data();
    *masses = h.masses.data();
  });
}

hfl_status hfl_sim_terminal(const hfl_sim* sim, size_t index, size_t* n, const double** values) {
  if (!sim || !n || !values) return null_arg("hfl_sim_terminal");
  return guarded([&] {
    if (index >= sim->stats.size()) hfl::fail(hfl::ErrorCode::IndexOutOfRange, "hfl_sim_terminal: index");
    const auto& v = sim->stats[index].terminal;
    *n = v.size();
    *values = v.data();
  });
}

hfl_status hfl_compare_measures(const hfl_model* model, const hfl_sim_config* cfg, double T,
                                int zero_f_prime, hfl_measure_report* out) {
  if (!model || !cfg || !out) return null_arg("hfl_compare_measures");
  return guarded([&] {
    hfl::mc::CompareOptions opts;
    if (zero_f_prime) opts.f_prime = [](double) { return 0.0; };
    const auto r = hfl::mc::compare_measures(model->params, to_config(*cfg), T, opts);
    *out = {r.weighted_mean, r.weighted_stderr, r.tilde_mean,     r.tilde_stderr,
            r.weight_mean,   r.weight_stderr,   r.combined_stderr};
  });
}

hfl_status hfl_density_histogram(const hfl_model* model, const hfl_sim_config* cfg, double T, int bins,
                                 double* centers, double* density, double* stderr_density,
                                 double* absorbed_at_0, double* absorbed_at_L) {
  if (!model || !cfg || !centers || !density || !stderr_density || !absorbed_at_0 || !absorbed_at_L)
    return null_arg("hfl_density_histogram");
  return guarded([&] {
    const auto h = hfl::mc::density_histogram(model->params, to_config(*cfg), T, bins);
    for (int b = 0; b < bins; ++b) {
      centers[b] = h.centers[b];
      density[b] = h.density[b];
      stderr_density[b] = h.std_error[b];
    }
    *absorbed_at_0 = h.absorbed_at_0;
    *absorbed_at_L = h.absorbed_at_L;
  });
}

}  // extern "C"
