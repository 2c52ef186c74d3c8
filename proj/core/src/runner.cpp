#include "scramble/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <json.hpp>

#include "scramble/classical.hpp"
#include "scramble/closures.hpp"
#include "scramble/collective.hpp"
#include "scramble/entanglement.hpp"
#include "scramble/errors.hpp"
#include "scramble/exact_dynamics.hpp"
#include "scramble/full_ed.hpp"
#include "scramble/parallel.hpp"
#include "scramble/semiclassics.hpp"
#include "scramble/spectral.hpp"

#ifndef SCRAMBLE_VERSION
#define SCRAMBLE_VERSION "unknown"
#endif

namespace scramble {

namespace {

using json = nlohmann::ordered_json;

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

int period_count(const ExperimentConfig& c) {
  return static_cast<int>(std::floor(c.numerics.t_max / c.physics.tau + 1e-9));
}

std::vector<double> stroboscopic_times(const ExperimentConfig& c) {
  std::vector<double> t(static_cast<std::size_t>(period_count(c)) + 1);
  for (std::size_t n = 0; n < t.size(); ++n) t[n] = static_cast<double>(n) * c.physics.tau;
  return t;
}

std::vector<double> sample_times(const ExperimentConfig& c) {
  return uniform_times(c.numerics.t_max, c.numerics.sample_dt);
}

void require_collective(const ExperimentConfig& c) {
  if (c.physics.alpha != 0.0)
    throw DomainError(c.method + " works on the symmetric sector and needs physics.alpha = 0; use full-ed or dtwa");
}

void require_unkicked(const ExperimentConfig& c) {
  if (c.physics.K != 0.0) throw DomainError(c.method + " integrates the unkicked flow and needs physics.K = 0");
}

void require_polarized(const ExperimentConfig& c) {
  if (c.physics.h0 != 0.0)
    throw DomainError(c.method + " starts from |up...up> and needs physics.h0 = 0");
}

TimeSeriesRecord series(const std::string& label, const std::vector<double>& t, const std::vector<double>& v) {
  TimeSeriesRecord r;
  r.label = label;
  r.times = t;
  r.values = v;
  return r;
}

class Outputs {
 public:
  explicit Outputs(const ExperimentConfig& c) : echo_(config_echo(c)) {}

  void add(const std::string& name, TimeSeriesRecord rec) { add(name, table_from_record(rec)); }
  void add(const std::string& name, DataTable t) {
    for (const auto& [k, v] : echo_) t.metadata[k] = v;
    out_.push_back({name, std::move(t)});
  }
  std::vector<RunOutput> take() { return std::move(out_); }

 private:
  std::map<std::string, std::string> echo_;
  std::vector<RunOutput> out_;
};

struct StateObservables {
  std::vector<double> mz, fq, tmi;
};

StateObservables dicke_observables(const Eigen::MatrixXcd& columns, int n, const std::vector<int>& blocks,
                                   std::size_t threads) {
  const auto nt = static_cast<std::size_t>(columns.cols());
  StateObservables o{std::vector<double>(nt), std::vector<double>(nt), std::vector<double>(nt)};
  const Eigen::VectorXd mzd = mz_diagonal(n);
  const BlockPartition part{blocks[0], blocks[1], blocks[2]};
  part.validate(n);
  parallel_for(nt, threads, [&](std::size_t j) {
    DickeState psi;
    psi.n_spins = n;
    psi.amplitudes = columns.col(static_cast<Eigen::Index>(j));
    o.mz[j] = psi.amplitudes.cwiseAbs2().dot(mzd);
    o.fq[j] = qfi(psi).density;
    o.tmi[j] = tmi(psi, part);
  });
  return o;
}

void add_dicke_outputs(Outputs& out, const std::vector<double>& times, const StateObservables& o,
                       const std::vector<int>& blocks, TimeSeriesRecord c) {
  out.add("mz", series("mz", times, o.mz));
  c.label = "c";
  out.add("cqt", std::move(c));
  auto fq = series("fq", times, o.fq);
  fq.set_meta("normalisation", "f_Q / N");
  out.add("qfi", std::move(fq));
  auto i3 = series("tmi", times, o.tmi);
  i3.set_meta("blocks", std::to_string(blocks[0]) + "," + std::to_string(blocks[1]) + "," +
                            std::to_string(blocks[2]));
  out.add("tmi", std::move(i3));
}

std::vector<RunOutput> run_ed(const ExperimentConfig& c, std::size_t threads, bool kicked) {
  require_collective(c);
  const auto& p = c.physics;
  const DickeState psi0 = ground_state(p.N, p.J, p.h0);
  std::vector<double> times;
  SpectralDecomposition gen;
  if (kicked) {
    const auto u = build_floquet(p.N, p.J, p.hf, p.K, p.tau);
    const auto parity = build_parity(p.N);
    gen = diagonalize_unitary(u, p.tau, &parity);
    times = stroboscopic_times(c);
  } else {
    require_unkicked(c);
    gen = diagonalize_hermitian(build_lmg_hamiltonian(p.N, p.J, p.hf));
    times = sample_times(c);
  }
  const auto blocks = tmi_blocks(c);
  const auto obs = dicke_observables(evolve_columns(psi0.amplitudes, gen, times), p.N, blocks, threads);
  Outputs out(c);
  add_dicke_outputs(out, times, obs, blocks, square_commutator(psi0, gen, times));
  return out.take();
}

SemiclassicalDynamics semiclassical_dynamics(const ExperimentConfig& c) {
  return {c.physics.J, c.physics.hf, c.physics.K, c.physics.tau, c.numerics.dt};
}

std::vector<RunOutput> run_twa(const ExperimentConfig& c, std::size_t threads) {
  require_collective(c);
  require_polarized(c);
  const auto dyn = semiclassical_dynamics(c);
  const auto times = dyn.kicked() ? stroboscopic_times(c) : sample_times(c);
  const auto samples = twa_sample(c.physics.N, static_cast<std::size_t>(c.numerics.n_samples), c.numerics.seed);
  Outputs out(c);
  auto mz = twa_observable(samples, dyn, times, [](const BlochVector& m) { return m.z(); }, threads);
  mz.label = "mz";
  out.add("mz", std::move(mz));
  auto cq = twa_square_commutator(samples, c.physics.N, dyn, times, 1.0, threads);
  cq.label = "c";
  out.add("cqt", std::move(cq));
  return out.take();
}

std::vector<RunOutput> run_dtwa(const ExperimentConfig& c, std::size_t threads) {
  require_polarized(c);
  const auto& p = c.physics;
  DtwaModel model;
  if (p.alpha == 0.0) {
    model = dtwa_all_to_all(p.N, p.J, p.hf, p.K, p.tau, c.numerics.dt);
  } else {
    if (p.K != 0.0) throw DomainError("kicked DTWA is only available for alpha = 0");
    const auto bc = c.analysis.boundary == "periodic" ? Boundary::Periodic : Boundary::Open;
    model = dtwa_with_couplings(build_couplings(p.N, p.alpha, p.J, bc).j, p.hf, c.numerics.dt);
  }
  const auto times = model.kicked() ? stroboscopic_times(c) : sample_times(c);
  const auto ensemble = dtwa_sample(p.N, static_cast<std::size_t>(c.numerics.n_samples), c.numerics.seed);
  DtwaOptions opt;
  opt.estimator = c.analysis.estimator == "product" ? CommutatorEstimator::Product
                                                     : CommutatorEstimator::WeylSymmetrized;
  opt.threads = threads;
  auto res = dtwa_run(ensemble, model, times, opt);
  Outputs out(c);
  res.mz.label = "mz";
  res.fq.label = "fq";
  res.fq.set_meta("normalisation", "f_Q / N");
  res.c.label = "c";
  out.add("mz", std::move(res.mz));
  out.add("qfi", std::move(res.fq));
  out.add("cqt", std::move(res.c));
  return out.take();
}

std::vector<RunOutput> run_closure(const ExperimentConfig& c, bool hp) {
  require_collective(c);
  require_unkicked(c);
  const auto& p = c.physics;
  const BlochVector m0 = classical_ground_state(p.J, p.h0);
  const auto times = sample_times(c);
  TimeSeriesRecord r;
  if (hp) {
    const auto [theta, phi] = lab_to_frame_angles(m0);
    r = holstein_primakoff_c(p.N, p.J, p.hf, theta, phi, times, c.numerics.dt);
  } else {
    const auto form = c.analysis.closure == "as-printed" ? ClosureForm::AsPrinted : ClosureForm::Derived;
    r = cumulant_closure_c(p.N, p.J, p.hf, m0, times, c.numerics.dt, form);
  }
  r.label = "c";
  Outputs out(c);
  out.add("cqt", std::move(r));
  return out.take();
}

std::vector<RunOutput> run_classical(const ExperimentConfig& c) {
  require_collective(c);
  const auto& p = c.physics;
  const BlochVector m0 = classical_ground_state(p.J, p.h0);
  std::vector<double> times;
  std::vector<BlochVector> ms;
  if (p.K != 0.0) {
    times = stroboscopic_times(c);
    const KickParams kp{p.J, p.hf, p.K, p.tau, c.numerics.dt};
    BlochVector m = m0;
    for (std::size_t i = 0; i < times.size(); ++i) {
      if (i) m = kicked_map(m, kp);
      ms.push_back(m);
    }
  } else {
    times = sample_times(c);
    ms = integrate_flow(m0, p.J, p.hf, times, c.numerics.dt).m;
  }
  std::vector<double> comp[3], energy;
  for (const auto& m : ms) {
    for (int a = 0; a < 3; ++a) comp[a].push_back(m[a]);
    energy.push_back(classical_energy(m, p.J, p.hf));
  }
  Outputs out(c);
  out.add("mx", series("mx", times, comp[0]));
  out.add("my", series("my", times, comp[1]));
  out.add("mz", series("mz", times, comp[2]));
  out.add("energy", series("energy", times, energy));
  return out.take();
}

std::vector<RunOutput> run_poincare(const ExperimentConfig& c) {
  require_collective(c);
  const auto& p = c.physics;
  const KickParams kp{p.J, p.hf, p.K, p.tau, c.numerics.dt};
  std::vector<BlochVector> seeds{classical_ground_state(p.J, p.h0)};
  const int extra = c.analysis.n_orbits - 1;
  for (int i = 0; i < extra; ++i) {
    const double q = -0.95 + 1.9 * (i + 0.5) / extra;
    seeds.push_back(bloch_from_qp(q, i % 2 ? -0.6 : 0.6));
  }
  const auto orbits = poincare_section(seeds, period_count(c), kp);
  DataTable t;
  t.columns = {"orbit", "q", "p"};
  for (std::size_t o = 0; o < orbits.size(); ++o)
    for (const auto& [q, pp] : orbits[o]) t.rows.push_back({std::to_string(o), format_double(q), format_double(pp)});
  t.metadata["occupancy_orbit0"] = format_double(occupancy_fraction(orbits.front()));
  Outputs out(c);
  out.add("poincare", std::move(t));
  return out.take();
}

std::vector<RunOutput> run_lyapunov(const ExperimentConfig& c) {
  require_collective(c);
  const auto& p = c.physics;
  const KickParams kp{p.J, p.hf, p.K, p.tau, c.numerics.dt};
  const auto res = lyapunov_benettin(classical_ground_state(p.J, p.h0), kp, period_count(c));
  const double total = period_count(c) * p.tau;
  TimeSeriesRecord r;
  r.label = "lambda";
  for (std::size_t i = 0; i < res.trace.size(); ++i)
    r.push(total * static_cast<double>(i + 1) / static_cast<double>(res.trace.size()), res.trace[i]);
  r.set_meta("exponent", res.exponent);
  Outputs out(c);
  out.add("lyapunov", std::move(r));
  return out.take();
}

std::vector<RunOutput> run_spectrum(const ExperimentConfig& c) {
  require_collective(c);
  const auto& p = c.physics;
  const auto u = build_floquet(p.N, p.J, p.hf, p.K, p.tau);
  const auto fs = floquet_spectrum(u, build_parity(p.N), p.tau);
  DataTable levels;
  levels.columns = {"index", "quasienergy", "parity"};
  for (Eigen::Index i = 0; i < fs.quasienergies.size(); ++i)
    levels.rows.push_back({std::to_string(i), format_double(fs.quasienergies[i]),
                           std::to_string(fs.parity_labels[static_cast<std::size_t>(i)])});
  levels.metadata["modulus_residual"] = format_double(fs.modulus_residual);
  DataTable ratio;
  ratio.columns = {"sector", "r"};
  for (int sector : {1, -1, 0}) {
    try {
      ratio.rows.push_back({std::to_string(sector), format_double(level_spacing_ratio(fs, sector))});
    } catch (const DomainError& e) {
      ratio.metadata["skipped_sector_" + std::to_string(sector)] = e.what();
    }
  }
  Outputs out(c);
  out.add("quasienergies", std::move(levels));
  out.add("level_ratio", std::move(ratio));
  return out.take();
}

std::vector<RunOutput> run_full_ed(const ExperimentConfig& c, std::size_t threads) {
  require_polarized(c);
  const auto& p = c.physics;
  const auto bc = c.analysis.boundary == "periodic" ? Boundary::Periodic : Boundary::Open;
  const auto scan = c.analysis.tmi_scan == "all" ? PartitionScan::All : PartitionScan::Contiguous;
  const auto h = build_longrange_hamiltonian(p.N, p.alpha, p.J, p.hf, bc);
  const FullState psi0 = FullState::polarized_up(p.N);
  std::vector<double> times;
  std::vector<FullState> states;
  TimeSeriesRecord cq;
  if (p.K != 0.0) {
    const auto u = build_full_floquet(h, p.K, p.tau);
    times = stroboscopic_times(c);
    states = full_evolve_kicked(psi0, u, period_count(c));
    cq = full_square_commutator_kicked(psi0, u, period_count(c));
  } else {
    const FullPropagator prop(h);
    times = sample_times(c);
    states = full_evolve(psi0, prop, times);
    cq = full_square_commutator(psi0, prop, times);
  }
  std::vector<double> mz(times.size()), fq(times.size()), i3(times.size());
  parallel_for(times.size(), threads, [&](std::size_t j) {
    mz[j] = full_mz(states[j]);
    fq[j] = full_qfi(states[j]).density;
    i3[j] = min_tmi(states[j], scan).value;
  });
  Outputs out(c);
  out.add("mz", series("mz", times, mz));
  cq.label = "c";
  out.add("cqt", std::move(cq));
  auto f = series("fq", times, fq);
  f.set_meta("normalisation", "f_Q / N");
  out.add("qfi", std::move(f));
  auto t = series("tmi", times, i3);
  t.set_meta("partitions", c.analysis.tmi_scan);
  out.add("tmi", std::move(t));
  return out.take();
}

std::string records_json(const std::vector<RunOutput>& outputs) {
  json doc = json::object();
  for (const auto& o : outputs) {
    json t;
    t["metadata"] = o.table.metadata;
    t["columns"] = o.table.columns;
    t["rows"] = o.table.rows;
    doc[o.name] = std::move(t);
  }
  return doc.dump(1) + "\n";
}

void write_outputs(const std::vector<RunOutput>& outputs, const ExperimentConfig& cfg,
                   const std::filesystem::path& dir, const std::string& prefix, RunManifest& m) {
  const auto& f = cfg.output.formats;
  const bool csv = std::find(f.begin(), f.end(), "csv") != f.end();
  const bool js = std::find(f.begin(), f.end(), "json") != f.end();
  auto record = [&](const std::string& rel, const std::string& body, std::size_t rows) {
    write_file_atomic(dir / rel, body);
    m.outputs.push_back({prefix + rel, sha256_hex(body), rows});
  };
  if (csv)
    for (const auto& o : outputs) record(o.name + ".csv", to_csv(o.table), o.table.size());
  if (js && !outputs.empty()) {
    std::size_t rows = 0;
    for (const auto& o : outputs) rows += o.table.size();
    record("records.json", records_json(outputs), rows);
  }
}

}  // namespace

const char* code_version() { return SCRAMBLE_VERSION; }

std::vector<RunOutput> compute(const ExperimentConfig& cfg) {
  validate(cfg);
  if (cfg.is_figure()) throw ConfigError("figure recipes run through run_figure");
  const std::size_t threads = resolve_thread_count(static_cast<std::size_t>(cfg.numerics.thread_count));
  const auto& m = cfg.method;
  if (m == "ed-quench") return run_ed(cfg, threads, false);
  if (m == "ed-kick") return run_ed(cfg, threads, true);
  if (m == "twa") return run_twa(cfg, threads);
  if (m == "dtwa") return run_dtwa(cfg, threads);
  if (m == "cumulant") return run_closure(cfg, false);
  if (m == "hp") return run_closure(cfg, true);
  if (m == "classical") return run_classical(cfg);
  if (m == "poincare") return run_poincare(cfg);
  if (m == "lyapunov") return run_lyapunov(cfg);
  if (m == "spectrum") return run_spectrum(cfg);
  if (m == "full-ed") return run_full_ed(cfg, threads);
  throw ConfigError("method: unknown '" + m + "'");
}

std::string RunManifest::to_json() const {
  json j;
  j["method"] = method;
  j["config_hash"] = config_hash;
  j["code_version"] = code_version;
  j["started"] = started;
  j["finished"] = finished;
  j["seed"] = seed;
  j["directory"] = directory;
  j["config"] = canonical_config;
  j["summary"] = summary;
  j["outputs"] = json::array();
  for (const auto& o : outputs) j["outputs"].push_back({{"file", o.file}, {"sha256", o.sha256}, {"rows", o.rows}});
  return j.dump(2) + "\n";
}

RunManifest RunManifest::from_json(const std::string& text) {
  RunManifest m;
  try {
    const auto j = json::parse(text);
    m.method = j.at("method").get<std::string>();
    m.config_hash = j.at("config_hash").get<std::string>();
    m.code_version = j.at("code_version").get<std::string>();
    m.started = j.at("started").get<std::string>();
    m.finished = j.at("finished").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.directory = j.at("directory").get<std::string>();
    m.canonical_config = j.at("config").get<std::string>();
    m.summary = j.at("summary").get<std::map<std::string, std::string>>();
    for (const auto& o : j.at("outputs"))
      m.outputs.push_back({o.at("file").get<std::string>(), o.at("sha256").get<std::string>(),
                           o.at("rows").get<std::size_t>()});
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed manifest: ") + e.what());
  }
  return m;
}

ExperimentConfig load_config_or_manifest(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{')
    return parse_config(RunManifest::from_json(text).canonical_config);
  return parse_config(text);
}

RunManifest run(const ExperimentConfig& cfg) {
  validate(cfg);
  if (cfg.is_figure())
    return run_figure(cfg.figure_name(), {}, cfg.output.directory, cfg.numerics.thread_count);
  RunManifest m;
  m.started = utc_now();
  m.method = cfg.method;
  m.config_hash = config_hash(cfg);
  m.code_version = code_version();
  m.seed = cfg.numerics.seed;
  m.canonical_config = canonical_text(cfg);
  m.directory = cfg.output.directory;
  const auto outputs = compute(cfg);
  for (const auto& o : outputs)
    for (const auto& [k, v] : o.table.metadata)
      if (k == "exponent" || k.rfind("occupancy", 0) == 0) m.summary[o.name + "." + k] = v;
  write_outputs(outputs, cfg, cfg.output.directory, "", m);
  m.finished = utc_now();
  write_file_atomic(std::filesystem::path(cfg.output.directory) / "manifest.json", m.to_json());
  return m;
}

RunManifest run_figure(const std::string& name, const std::vector<std::string>& overrides,
                       const std::filesystem::path& directory, int threads) {
  FigureRecipe recipe = figure_recipe(name);
  for (auto& [job, cfg] : recipe.jobs) {
    for (const auto& o : overrides) apply_override(cfg, o);
    cfg.output.directory = (directory / job).string();
    validate(cfg);
  }
  RunManifest m;
  m.started = utc_now();
  m.method = "figure:" + name;
  m.code_version = code_version();
  m.directory = directory.string();
  std::string all_configs;
  for (const auto& [job, cfg] : recipe.jobs) all_configs += "[" + job + "]\n" + canonical_text(cfg);
  m.canonical_config = all_configs;
  m.config_hash = sha256_hex(all_configs);
  m.seed = recipe.jobs.empty() ? 0 : recipe.jobs.front().second.numerics.seed;

  const std::size_t pool = resolve_thread_count(static_cast<std::size_t>(std::max(threads, 0)));
  const std::size_t n_jobs = recipe.jobs.size();
  const int per_job = static_cast<int>(std::max<std::size_t>(1, pool / std::max<std::size_t>(1, n_jobs)));
  std::vector<std::vector<RunOutput>> results(n_jobs);
  parallel_for(n_jobs, pool, [&](std::size_t i) {
    ExperimentConfig cfg = recipe.jobs[i].second;
    cfg.numerics.thread_count = per_job;
    results[i] = compute(cfg);
  });
  for (std::size_t i = 0; i < n_jobs; ++i) {
    const auto& [job, cfg] = recipe.jobs[i];
    write_outputs(results[i], cfg, directory / job, job + "/", m);
  }
  if (recipe.summarize) {
    auto summary = recipe.summarize(results, recipe.jobs);
    ExperimentConfig fmt;
    write_outputs(summary, fmt, directory, "", m);
    for (const auto& s : summary)
      for (const auto& [k, v] : s.table.metadata) m.summary[s.name + "." + k] = v;
  }
  std::string readme = recipe.name + ": " + recipe.description + "\n\n";
  for (const auto& line : recipe.columns) readme += line + "\n";
  write_file_atomic(directory / "README.txt", readme);
  m.finished = utc_now();
  write_file_atomic(directory / "manifest.json", m.to_json());
  return m;
}

}  // namespace scramble
