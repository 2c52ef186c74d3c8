#include <algorithm>
#include <cmath>
#include <numbers>

#include "scramble/classical.hpp"
#include "scramble/entanglement.hpp"
#include "scramble/errors.hpp"
#include "scramble/fits.hpp"
#include "scramble/runner.hpp"

namespace scramble {

namespace {

using Jobs = std::vector<std::pair<std::string, ExperimentConfig>>;
using JobOutputs = std::vector<std::vector<RunOutput>>;

ExperimentConfig make(const std::string& method, std::initializer_list<const char*> settings) {
  ExperimentConfig c;
  c.method = method;
  for (const char* s : settings) apply_override(c, s);
  return c;
}

std::string num(double x) { return format_double(x); }
std::string tag(double x) {
  std::string s = num(x);
  std::replace(s.begin(), s.end(), '.', 'p');
  return s;
}

const DataTable& find_output(const std::vector<RunOutput>& outs, const std::string& name) {
  for (const auto& o : outs)
    if (o.name == name) return o.table;
  throw DomainError("job produced no '" + name + "' output");
}

TimeSeriesRecord find_series(const std::vector<RunOutput>& outs, const std::string& name) {
  return record_from_table(find_output(outs, name));
}

double window_mean(const TimeSeriesRecord& r, double lo, double hi) {
  double s = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < r.size(); ++i)
    if (r.times[i] >= lo && r.times[i] <= hi) {
      s += r.values[i];
      ++n;
    }
  if (n == 0) throw DomainError("empty averaging window");
  return s / static_cast<double>(n);
}

std::pair<double, double> window_max(const TimeSeriesRecord& r, double lo, double hi) {
  double best = -INFINITY, at = lo;
  for (std::size_t i = 0; i < r.size(); ++i)
    if (r.times[i] >= lo && r.times[i] <= hi && r.values[i] > best) {
      best = r.values[i];
      at = r.times[i];
    }
  return {at, best};
}

std::vector<RunOutput> phase_space_summary(const JobOutputs&, const Jobs&) {
  DataTable t;
  t.columns = {"q", "p", "energy"};
  const int nq = 81, np = 81;
  for (int i = 0; i < nq; ++i)
    for (int j = 0; j < np; ++j) {
      const double q = -1.0 + 2.0 * i / (nq - 1);
      const double p = -0.5 * std::numbers::pi + std::numbers::pi * j / (np - 1);
      t.rows.push_back({num(q), num(p), num(classical_energy(bloch_from_qp(q, p), 1.0, 0.5))});
    }
  t.metadata["physics.hf"] = "0.5";
  t.metadata["separatrix_energy"] = num(classical_energy(BlochVector::UnitZ(), 1.0, 0.5));
  return {{"energy_grid", std::move(t)}};
}

std::vector<RunOutput> level_ratio_summary(const JobOutputs& outs, const Jobs& jobs) {
  DataTable t;
  t.columns = {"K", "r_plus", "r_minus", "r_mixed"};
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto& lr = find_output(outs[i], "level_ratio");
    std::map<std::string, std::string> r{{"1", "nan"}, {"-1", "nan"}, {"0", "nan"}};
    for (const auto& row : lr.rows) r[row[0]] = row[1];
    t.rows.push_back({num(jobs[i].second.physics.K), r["1"], r["-1"], r["0"]});
  }
  t.metadata["poisson"] = num(0.386);
  t.metadata["wigner_dyson"] = num(0.5295);
  return {{"level_ratio_vs_K", std::move(t)}};
}

std::vector<RunOutput> dpt_peak_summary(const JobOutputs& outs, const Jobs& jobs) {
  DataTable t;
  t.columns = {"N", "ln_N", "t_peak", "fq_peak"};
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto fq = find_series(outs[i], "qfi");
    const double n = jobs[i].second.physics.N;
    const auto [at, best] = window_max(fq, 0.0, 3.0 * std::log(n));
    t.rows.push_back({num(n), num(std::log(n)), num(at), num(best)});
  }
  return {{"qfi_peak_vs_N", std::move(t)}};
}

std::vector<RunOutput> chaotic_saturation_summary(const JobOutputs& outs, const Jobs& jobs) {
  DataTable t;
  t.columns = {"N", "fq_mean", "fq_infinite_temperature", "tmi_mean", "tmi_random_state"};
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto& c = jobs[i].second;
    const double n = c.physics.N;
    const double t_max = c.numerics.t_max;
    const auto blocks = tmi_blocks(c);
    const double fq = window_mean(find_series(outs[i], "qfi"), 0.5 * t_max, t_max) * n;
    const double i3 = window_mean(find_series(outs[i], "tmi"), 0.5 * t_max, t_max);
    t.rows.push_back({num(n), num(fq), num(1.0 + n / 3.0), num(i3),
                      num(ergodic_tmi_reference(blocks[0], blocks[1], blocks[2]))});
  }
  t.metadata["window"] = "second half of each run";
  return {{"saturation_vs_N", std::move(t)}};
}

FigureRecipe table1_recipe();

}  // namespace

std::vector<std::string> figure_names() {
  return {"phase-space",          "level-ratio",      "semiclassics",        "entanglement-vs-scrambling",
          "quench-entanglement",  "long-range",       "two-regimes",         "dpt-and-kicked",
          "semiclassical-observables", "long-range-scaling", "dpt-entanglement", "chaotic-saturation",
          "table1"};
}

FigureRecipe figure_recipe(const std::string& name) {
  FigureRecipe r;
  r.name = name;
  if (name == "phase-space") {
    r.description = "mean-field phase space at hf = 1/2 and Poincare sections at K = 0.2 and K = 20 (hf = 2, tau = 1)";
    r.columns = {"energy_grid.csv: q, p, classical energy on an 81 x 81 grid (hf = 1/2); contour at separatrix_energy",
                 "separatrix/m*.csv: t, component of the orbit from the pole at hf = 1/2",
                 "poincare-K*/poincare.csv: orbit, q, p; orbit 0 starts at the pole"};
    r.jobs = {{"separatrix", make("classical", {"physics.hf=0.5", "numerics.t_max=20", "numerics.sample_dt=0.01"})},
              {"poincare-K0p2", make("poincare", {"physics.K=0.2", "numerics.t_max=400"})},
              {"poincare-K20", make("poincare", {"physics.K=20", "numerics.t_max=400", "numerics.dt=0.01"})}};
    r.summarize = phase_space_summary;
  } else if (name == "level-ratio") {
    r.description = "mean level spacing ratio of the Floquet operator versus K (N = 1000, h = 2, tau = 1)";
    r.columns = {"level_ratio_vs_K.csv: K, r per parity sector (+1, -1) and for the mixed spectrum",
                 "K*/quasienergies.csv: index, quasienergy, parity"};
    for (double k : {0.2, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 8.0, 10.0, 15.0, 20.0}) {
      auto c = make("spectrum", {"physics.N=1000", "physics.hf=2", "physics.tau=1"});
      c.physics.K = k;
      r.jobs.push_back({"K" + tag(k), c});
    }
    r.summarize = level_ratio_summary;
  } else if (name == "semiclassics") {
    r.description = "square commutator from ED and the semiclassical approximations (N = 50, hf = 2)";
    r.columns = {"<method>/cqt.csv: t, c(t)"};
    for (const char* m : {"ed-quench", "twa", "dtwa", "cumulant", "hp"}) {
      auto c = make(m, {"physics.N=50", "physics.hf=2", "numerics.t_max=10", "numerics.sample_dt=0.02",
                        "numerics.n_samples=5000"});
      r.jobs.push_back({m, c});
    }
  } else if (name == "entanglement-vs-scrambling") {
    r.description = "QFI, TMI and square commutator after a regular quench (N = 100, hf = 2, blocks 1, 10, 20)";
    r.columns = {"qfi.csv: t, f_Q/N", "tmi.csv: t, I3", "cqt.csv: t, c(t)", "mz.csv: t, <m_z>"};
    r.jobs = {{"ed", make("ed-quench", {"physics.N=100", "physics.hf=2", "numerics.t_max=200",
                                        "numerics.sample_dt=0.1", "analysis.blocks=1,10,20"})}};
  } else if (name == "quench-entanglement") {
    r.description = "QFI and TMI after quenches below, at and above the transition (N = 450), and long-time QFI against DTWA (N = 100, hf = 2)";
    r.columns = {"hf*/qfi.csv, hf*/tmi.csv: t, f_Q/N and I3 with blocks 1, 50, 200",
                 "long-ed/qfi.csv, long-dtwa/qfi.csv: t, f_Q/N"};
    for (double h : {0.2, 0.5, 2.0}) {
      auto c = make("ed-quench", {"physics.N=450", "numerics.t_max=40", "numerics.sample_dt=0.05",
                                  "analysis.blocks=1,50,200"});
      c.physics.hf = h;
      r.jobs.push_back({"hf" + tag(h), c});
    }
    r.jobs.push_back({"long-ed", make("ed-quench", {"physics.N=100", "physics.hf=2", "numerics.t_max=150",
                                                    "numerics.sample_dt=0.1"})});
    r.jobs.push_back({"long-dtwa", make("dtwa", {"physics.N=100", "physics.hf=2", "numerics.t_max=150",
                                                 "numerics.sample_dt=0.1", "numerics.n_samples=5000",
                                                 "numerics.dt=0.005"})});
  } else if (name == "long-range") {
    r.description = "minimal TMI and f_Q/N for long-range chains (full space, N = 12, hf = 0.75)";
    r.columns = {"alpha*/tmi.csv: t, min over contiguous partitions of I3", "alpha*/qfi.csv: t, f_Q/N"};
    for (double a : {0.5, 1.5, 2.5}) {
      auto c = make("full-ed", {"physics.N=12", "physics.hf=0.75", "numerics.t_max=40", "numerics.sample_dt=0.25"});
      c.physics.alpha = a;
      r.jobs.push_back({"alpha" + tag(a), c});
    }
  } else if (name == "two-regimes") {
    r.description = "square commutator after a regular quench for several N (hf = 2) and DTWA at N = 20";
    r.columns = {"N*/cqt.csv: t, c(t)", "dtwa-N20/cqt.csv: t, c(t) with 5000 samples"};
    for (int n : {20, 100, 200, 300, 400}) {
      auto c = make("ed-quench", {"physics.hf=2", "numerics.sample_dt=0.1"});
      c.physics.N = n;
      c.numerics.t_max = 2.0 * n;
      r.jobs.push_back({"N" + std::to_string(n), c});
    }
    r.jobs.push_back({"dtwa-N20", make("dtwa", {"physics.N=20", "physics.hf=2", "numerics.t_max=3",
                                                "numerics.sample_dt=0.02", "numerics.n_samples=5000"})});
  } else if (name == "dpt-and-kicked") {
    r.description = "square commutator at the transition (hf = 1/2) and for the kicked top (K = 20, hf = 2, tau = 0.6), ED and TWA at N = 800";
    r.columns = {"dpt-ed/cqt.csv, dpt-twa/cqt.csv: t, c(t)", "kick-ed/cqt.csv, kick-twa/cqt.csv: t = n tau, c(t)"};
    r.jobs = {{"dpt-ed", make("ed-quench", {"physics.N=800", "physics.hf=0.5", "numerics.t_max=2000",
                                            "numerics.sample_dt=0.1"})},
              {"dpt-twa", make("twa", {"physics.N=800", "physics.hf=0.5", "numerics.t_max=12",
                                       "numerics.sample_dt=0.05", "numerics.n_samples=10000"})},
              {"kick-ed", make("ed-kick", {"physics.N=800", "physics.hf=2", "physics.K=20", "physics.tau=0.6",
                                           "numerics.t_max=600"})},
              {"kick-twa", make("twa", {"physics.N=800", "physics.hf=2", "physics.K=20", "physics.tau=0.6",
                                        "numerics.t_max=12", "numerics.n_samples=10000"})}};
  } else if (name == "semiclassical-observables") {
    r.description = "<m_z> and f_Q/N from ED, TWA and DTWA (N = 100, hf = 2, 5000 samples)";
    r.columns = {"<method>/mz.csv: t, <m_z>", "ed/qfi.csv, dtwa/qfi.csv: t, f_Q/N"};
    r.jobs = {{"ed", make("ed-quench", {"physics.N=100", "physics.hf=2", "numerics.t_max=100"})},
              {"twa", make("twa", {"physics.N=100", "physics.hf=2", "numerics.t_max=100", "numerics.dt=0.005"})},
              {"dtwa", make("dtwa", {"physics.N=100", "physics.hf=2", "numerics.t_max=100", "numerics.dt=0.005"})}};
  } else if (name == "long-range-scaling") {
    r.description = "size dependence of f_Q/N and the minimal TMI for alpha = 0.5, 1.5, 2.5 (full space, hf = 0.75)";
    r.columns = {"alpha*-N*/qfi.csv, alpha*-N*/tmi.csv"};
    for (double a : {0.5, 1.5, 2.5})
      for (int n : {8, 10, 12}) {
        auto c = make("full-ed", {"physics.hf=0.75", "numerics.t_max=40", "numerics.sample_dt=0.5"});
        c.physics.alpha = a;
        c.physics.N = n;
        r.jobs.push_back({"alpha" + tag(a) + "-N" + std::to_string(n), c});
      }
  } else if (name == "dpt-entanglement") {
    r.description = "QFI at the transition (h0 = 0, hf = 1/2): peak time against ln N";
    r.columns = {"qfi_peak_vs_N.csv: N, ln N, time and value of the first f_Q/N maximum",
                 "N*/qfi.csv: t, f_Q/N"};
    for (int n : {100, 200, 400, 800}) {
      auto c = make("ed-quench", {"physics.hf=0.5", "numerics.t_max=30", "numerics.sample_dt=0.05"});
      c.physics.N = n;
      r.jobs.push_back({"N" + std::to_string(n), c});
    }
    r.summarize = dpt_peak_summary;
  } else if (name == "chaotic-saturation") {
    r.description = "entanglement saturation in the chaotic kicked top (K = 20, hf = 2, tau = 1)";
    r.columns = {"saturation_vs_N.csv: N, late-time f_Q, 1 + N/3, late-time I3, ln n~",
                 "N*/qfi.csv, N*/tmi.csv, N*/cqt.csv"};
    for (int n : {50, 100, 200}) {
      auto c = make("ed-kick", {"physics.hf=2", "physics.K=20", "physics.tau=1", "numerics.t_max=200"});
      c.physics.N = n;
      r.jobs.push_back({"N" + std::to_string(n), c});
    }
    r.summarize = chaotic_saturation_summary;
  } else if (name == "table1") {
    r = table1_recipe();
  } else {
    std::string list;
    for (const auto& n : figure_names()) list += (list.empty() ? "" : ", ") + n;
    throw ConfigError("unknown figure '" + name + "'; available: " + list);
  }
  return r;
}

namespace {

// Drift per decade of a late-time plateau: 10^slope - 1 of a log-log fit.
double drift_per_decade(const TimeSeriesRecord& r, double lo, double hi) {
  return std::pow(10.0, fit_power_law(r, lo, hi).slope) - 1.0;
}

// First sample after `from` where the series reaches `level`.
double first_crossing(const TimeSeriesRecord& r, double from, double level) {
  for (std::size_t i = 0; i < r.size(); ++i)
    if (r.times[i] >= from && r.values[i] >= level) return r.times[i];
  throw DomainError("series never reaches " + num(level));
}

std::vector<RunOutput> table1_summary(const JobOutputs& outs, const Jobs& jobs) {
  DataTable t;
  t.columns = {"protocol", "regime", "observable", "law", "fit", "value", "r_squared", "t_lo", "t_hi"};
  auto row = [&](const std::string& protocol, const std::string& regime, const std::string& obs,
                 const std::string& law, const std::string& fit, double value, double r2, double lo, double hi) {
    t.rows.push_back({protocol, regime, obs, law, fit, num(value), num(r2), num(lo), num(hi)});
  };
  auto job = [&](const std::string& name) -> const std::vector<RunOutput>& {
    for (std::size_t i = 0; i < jobs.size(); ++i)
      if (jobs[i].first == name) return outs[i];
    throw DomainError("table1: missing job " + name);
  };
  auto size_of = [&](const std::string& name) {
    for (const auto& [n, c] : jobs)
      if (n == name) return static_cast<double>(c.physics.N);
    throw DomainError("table1: missing job " + name);
  };

  {
    const double n = size_of("quench-long");
    const double t_ehr = std::sqrt(n);
    const auto c_early = find_series(job("quench-early"), "cqt");
    const auto c = find_series(job("quench-long"), "cqt");
    const auto fq = find_series(job("quench-long"), "qfi");
    const double t_star = window_max(c, 2.0 * t_ehr, c.times.back()).first;
    const auto early = fit_power_law(c_early, 0.01, 0.1);
    row("quench", "t < t_Ehr", "c(t)", "t^2/N^3", "power exponent", early.slope, early.r_squared, 0.01, 0.1);
    const auto late = fit_power_law(c, 2.0 * t_ehr, t_star);
    row("quench", "t_Ehr < t < t*", "c(t)", "t^4/N^4 or t^3/N^4", "power exponent", late.slope, late.r_squared,
        2.0 * t_ehr, t_star);
    const auto grow = fit_power_law(fq, 0.1 * t_ehr, t_ehr);
    row("quench", "t < t_Ehr", "f_Q", "growth", "power exponent", grow.slope, grow.r_squared, 0.1 * t_ehr, t_ehr);
    const auto sat = fit_power_law(fq, 2.0 * t_ehr, 0.8 * t_star);
    row("quench", "t_Ehr < t < t*", "f_Q", "const.", "drift per decade", std::pow(10.0, sat.slope) - 1.0,
        sat.r_squared, 2.0 * t_ehr, 0.8 * t_star);
  }
  {
    const double n = size_of("dpt");
    const double t_ehr = std::log(n);
    const auto c = find_series(job("dpt"), "cqt");
    const auto fq = find_series(job("dpt"), "qfi");
    const auto early = fit_exponential(c, 1.0, t_ehr);
    row("dpt", "t < t_Ehr", "c(t)", "exp(2 t)/N^3", "exponential rate", early.slope, early.r_squared, 1.0, t_ehr);
    const double t_star = window_max(c, 2.0 * t_ehr, c.times.back()).first;
    const auto late = fit_power_law(c, 2.0 * t_ehr, t_star);
    row("dpt", "t_Ehr < t < t*", "c(t)", "t/N", "power exponent", late.slope, late.r_squared, 2.0 * t_ehr, t_star);
    const auto [t_peak, fq_peak] = window_max(fq, 0.0, 3.0 * t_ehr);
    row("dpt", "t < t_Ehr", "f_Q", "peak", "peak time / ln N", t_peak / t_ehr, std::nan(""), 0.0, 3.0 * t_ehr);
    row("dpt", "t < t_Ehr", "f_Q", "peak", "peak value", fq_peak, std::nan(""), 0.0, 3.0 * t_ehr);
    const auto sat = fit_power_law(fq, 3.0 * t_ehr, 0.8 * t_star);
    row("dpt", "t_Ehr < t < t*", "f_Q", "const.", "drift per decade", std::pow(10.0, sat.slope) - 1.0,
        sat.r_squared, 3.0 * t_ehr, 0.8 * t_star);
  }
  {
    const auto& cfg = std::find_if(jobs.begin(), jobs.end(), [](const auto& j) { return j.first == "kicked"; })->second;
    const double t_max = cfg.numerics.t_max;
    const auto c = find_series(job("kicked"), "cqt");
    const auto fq = find_series(job("kicked"), "qfi");
    const double plateau = window_mean(c, 0.5 * t_max, t_max);
    const double t_sat = first_crossing(c, 0.0, 0.5 * plateau);
    const auto early = fit_exponential(c, cfg.physics.tau, t_sat);
    row("kicked", "t < t_Ehr", "c(t)", "exp(lambda t)", "exponential rate", early.slope, early.r_squared,
        cfg.physics.tau, t_sat);
    const double hi = std::min(10.0 * t_sat, t_max);
    row("kicked", "t_Ehr < t < t*", "c(t)", "const.", "drift per decade", drift_per_decade(c, 2.0 * t_sat, hi),
        fit_power_law(c, 2.0 * t_sat, hi).r_squared, 2.0 * t_sat, hi);
    row("kicked", "t < t_Ehr", "f_Q", "growth", "f_Q at t_sat / f_Q(0)", fq.at(t_sat) / fq.values.front(),
        std::nan(""), 0.0, t_sat);
    row("kicked", "t_Ehr < t < t*", "f_Q", "const.", "drift per decade", drift_per_decade(fq, 2.0 * t_sat, t_max),
        fit_power_law(fq, 2.0 * t_sat, t_max).r_squared, 2.0 * t_sat, t_max);
  }
  t.metadata["quench"] = "h0 = 0 -> hf = 2, N = " + num(size_of("quench-long")) + "; t_Ehr = sqrt N, t* = argmax c";
  t.metadata["dpt"] = "h0 = 0 -> hf = 1/2, N = " + num(size_of("dpt")) + "; t_Ehr = ln N, t* = argmax c";
  t.metadata["kicked"] = "K = 20, hf = 2, N = " + num(size_of("kicked")) + "; t_sat = first time c reaches half its plateau";
  return {{"table1", std::move(t)}};
}

FigureRecipe table1_recipe() {
  FigureRecipe r;
  r.name = "table1";
  r.description = "fitted growth laws of c(t) and f_Q for the regular quench, the quench at the transition and the kicked top";
  r.columns = {"table1.csv: protocol, regime, observable, expected law, fitted quantity, value, r^2, window",
               "quench-early/, quench-long/, dpt/, kicked/: the underlying ED runs"};
  r.jobs = {{"quench-early", make("ed-quench", {"physics.N=200", "physics.hf=2", "numerics.t_max=0.1",
                                                "numerics.sample_dt=0.002", "analysis.blocks=1,2,3"})},
            {"quench-long", make("ed-quench", {"physics.N=200", "physics.hf=2", "numerics.t_max=400",
                                               "numerics.sample_dt=0.5", "analysis.blocks=1,2,3"})},
            {"dpt", make("ed-quench", {"physics.N=800", "physics.hf=0.5", "numerics.t_max=800",
                                       "numerics.sample_dt=0.25", "analysis.blocks=1,2,3"})},
            {"kicked", make("ed-kick", {"physics.N=200", "physics.hf=2", "physics.K=20", "physics.tau=0.6",
                                        "numerics.t_max=120", "analysis.blocks=1,2,3"})}};
  r.summarize = table1_summary;
  return r;
}

}  // namespace

}  // namespace scramble
