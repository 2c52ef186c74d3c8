#include "scramble/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <set>

#include "scramble/errors.hpp"
#include "scramble/io.hpp"

namespace scramble {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string shortest(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw ConfigError("cannot format value");
  return std::string(buf, ptr);
}

double as_double(std::string_view key, std::string_view v) {
  try {
    const double x = parse_double(v);
    if (!std::isfinite(x)) throw DomainError("not finite");
    return x;
  } catch (const DomainError&) {
    throw ConfigError(std::string(key) + ": expected a finite number, got '" + std::string(v) + "'");
  }
}

long long as_integer(std::string_view key, std::string_view v) {
  try {
    return parse_integer(v);
  } catch (const DomainError&) {
    throw ConfigError(std::string(key) + ": expected an integer, got '" + std::string(v) + "'");
  }
}

int as_int(std::string_view key, std::string_view v) {
  const long long x = as_integer(key, v);
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
    throw ConfigError(std::string(key) + ": value out of range");
  return static_cast<int>(x);
}

std::vector<std::string> split_list(std::string_view v) {
  std::vector<std::string> out;
  v = trim(v);
  if (v.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto pos = v.find(',', start);
    const auto item = trim(v.substr(start, pos == std::string_view::npos ? pos : pos - start));
    out.emplace_back(item);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <class T>
std::string join(const std::vector<T>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    if constexpr (std::is_same_v<T, std::string>) out += xs[i];
    else out += std::to_string(xs[i]);
  }
  return out;
}

struct Key {
  std::string name;
  std::function<void(ExperimentConfig&, std::string_view)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

#define SCRAMBLE_DOUBLE_KEY(name, field)                                                         \
  Key {                                                                                           \
    name, [](ExperimentConfig& c, std::string_view v) { c.field = as_double(name, v); },          \
        [](const ExperimentConfig& c) { return shortest(c.field); }                               \
  }
#define SCRAMBLE_INT_KEY(name, field)                                                            \
  Key {                                                                                           \
    name, [](ExperimentConfig& c, std::string_view v) { c.field = as_int(name, v); },             \
        [](const ExperimentConfig& c) { return std::to_string(c.field); }                         \
  }
#define SCRAMBLE_WORD_KEY(name, field)                                                           \
  Key {                                                                                           \
    name, [](ExperimentConfig& c, std::string_view v) { c.field = std::string(v); },              \
        [](const ExperimentConfig& c) { return c.field; }                                         \
  }

const std::vector<Key>& key_table() {
  static const std::vector<Key> keys = {
      SCRAMBLE_WORD_KEY("method", method),
      SCRAMBLE_INT_KEY("physics.N", physics.N),
      SCRAMBLE_DOUBLE_KEY("physics.J", physics.J),
      SCRAMBLE_DOUBLE_KEY("physics.h0", physics.h0),
      SCRAMBLE_DOUBLE_KEY("physics.hf", physics.hf),
      SCRAMBLE_DOUBLE_KEY("physics.K", physics.K),
      SCRAMBLE_DOUBLE_KEY("physics.tau", physics.tau),
      SCRAMBLE_DOUBLE_KEY("physics.alpha", physics.alpha),
      SCRAMBLE_DOUBLE_KEY("numerics.dt", numerics.dt),
      SCRAMBLE_DOUBLE_KEY("numerics.t_max", numerics.t_max),
      SCRAMBLE_DOUBLE_KEY("numerics.sample_dt", numerics.sample_dt),
      Key{"numerics.n_samples",
          [](ExperimentConfig& c, std::string_view v) {
            c.numerics.n_samples = as_integer("numerics.n_samples", v);
          },
          [](const ExperimentConfig& c) { return std::to_string(c.numerics.n_samples); }},
      Key{"numerics.seed",
          [](ExperimentConfig& c, std::string_view v) {
            const long long s = as_integer("numerics.seed", v);
            if (s < 0) throw ConfigError("numerics.seed: must be non-negative");
            c.numerics.seed = static_cast<std::uint64_t>(s);
          },
          [](const ExperimentConfig& c) { return std::to_string(c.numerics.seed); }},
      SCRAMBLE_INT_KEY("numerics.thread_count", numerics.thread_count),
      SCRAMBLE_WORD_KEY("output.directory", output.directory),
      Key{"output.formats",
          [](ExperimentConfig& c, std::string_view v) { c.output.formats = split_list(v); },
          [](const ExperimentConfig& c) { return join(c.output.formats); }},
      Key{"analysis.blocks",
          [](ExperimentConfig& c, std::string_view v) {
            c.analysis.blocks.clear();
            for (const auto& item : split_list(v)) c.analysis.blocks.push_back(as_int("analysis.blocks", item));
          },
          [](const ExperimentConfig& c) { return join(c.analysis.blocks); }},
      SCRAMBLE_WORD_KEY("analysis.closure", analysis.closure),
      SCRAMBLE_WORD_KEY("analysis.estimator", analysis.estimator),
      SCRAMBLE_WORD_KEY("analysis.boundary", analysis.boundary),
      SCRAMBLE_WORD_KEY("analysis.tmi_scan", analysis.tmi_scan),
      SCRAMBLE_INT_KEY("analysis.n_orbits", analysis.n_orbits),
  };
  return keys;
}

#undef SCRAMBLE_DOUBLE_KEY
#undef SCRAMBLE_INT_KEY
#undef SCRAMBLE_WORD_KEY

const Key& find_key(std::string_view name) {
  for (const auto& k : key_table())
    if (k.name == name) return k;
  throw ConfigError("unknown configuration key '" + std::string(name) + "'");
}

void require_word(std::string_view key, const std::string& v, std::initializer_list<const char*> allowed) {
  for (const char* a : allowed)
    if (v == a) return;
  std::string list;
  for (const char* a : allowed) list += std::string(list.empty() ? "" : ", ") + a;
  throw ConfigError(std::string(key) + ": '" + v + "' is not one of " + list);
}

}  // namespace

const std::vector<std::string>& method_names() {
  static const std::vector<std::string> names = {"ed-quench", "ed-kick",  "twa",      "dtwa",
                                                 "cumulant",  "hp",       "classical", "poincare",
                                                 "lyapunov",  "spectrum", "full-ed"};
  return names;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& k : key_table()) out.push_back(k.name);
    return out;
  }();
  return names;
}

void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
  find_key(trim(key)).set(cfg, trim(value));
}

void apply_override(ExperimentConfig& cfg, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos)
    throw ConfigError("override '" + std::string(assignment) + "' is not of the form key=value");
  apply_setting(cfg, assignment.substr(0, eq), assignment.substr(eq + 1));
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg;
  std::set<std::string, std::less<>> seen;
  std::size_t pos = 0, lineno = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const auto key = trim(line.substr(0, eq));
    if (!seen.insert(std::string(key)).second)
      throw ConfigError("line " + std::to_string(lineno) + ": key '" + std::string(key) + "' given twice");
    try {
      apply_setting(cfg, key, line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return parse_config(text);
}

std::string config_value(const ExperimentConfig& cfg, std::string_view key) {
  return find_key(key).get(cfg);
}

std::string canonical_text(const ExperimentConfig& cfg) {
  std::string out;
  for (const auto& k : key_table()) out += k.name + " = " + k.get(cfg) + "\n";
  return out;
}

std::string config_hash(const ExperimentConfig& cfg) { return sha256_hex(canonical_text(cfg)); }

void validate(const ExperimentConfig& cfg) {
  const auto& p = cfg.physics;
  const auto& n = cfg.numerics;
  const auto& a = cfg.analysis;
  if (cfg.is_figure()) {
    if (cfg.figure_name().empty()) throw ConfigError("method: figure name missing after 'figure:'");
  } else if (std::find(method_names().begin(), method_names().end(), cfg.method) == method_names().end()) {
    std::string list;
    for (const auto& m : method_names()) list += (list.empty() ? "" : ", ") + m;
    throw ConfigError("method: '" + cfg.method + "' is not one of " + list + " or figure:<name>");
  }
  if (p.N < 1) throw ConfigError("physics.N: must be at least 1");
  if (!(p.tau > 0.0)) throw ConfigError("physics.tau: must be positive");
  if (p.alpha < 0.0) throw ConfigError("physics.alpha: must be non-negative");
  if (!(n.dt > 0.0)) throw ConfigError("numerics.dt: must be positive");
  if (n.t_max < 0.0) throw ConfigError("numerics.t_max: must be non-negative");
  if (!(n.sample_dt > 0.0)) throw ConfigError("numerics.sample_dt: must be positive");
  if (n.sample_dt < n.dt) throw ConfigError("numerics.sample_dt: must not be smaller than numerics.dt");
  if (n.n_samples < 1) throw ConfigError("numerics.n_samples: must be at least 1");
  if (n.thread_count < 0) throw ConfigError("numerics.thread_count: must be non-negative");
  if (cfg.output.directory.empty()) throw ConfigError("output.directory: must not be empty");
  if (cfg.output.formats.empty()) throw ConfigError("output.formats: at least one format needed");
  for (const auto& f : cfg.output.formats) require_word("output.formats", f, {"csv", "json"});
  if (!a.blocks.empty()) {
    if (a.blocks.size() != 3) throw ConfigError("analysis.blocks: expected three sizes n_A,n_B,n_C");
    for (int b : a.blocks)
      if (b < 1) throw ConfigError("analysis.blocks: sizes must be positive");
    if (a.blocks[0] + a.blocks[1] + a.blocks[2] >= p.N)
      throw ConfigError("analysis.blocks: blocks must leave a non-empty remainder");
  }
  require_word("analysis.closure", a.closure, {"derived", "as-printed"});
  require_word("analysis.estimator", a.estimator, {"weyl", "product"});
  require_word("analysis.boundary", a.boundary, {"open", "periodic"});
  require_word("analysis.tmi_scan", a.tmi_scan, {"contiguous", "all"});
  if (a.n_orbits < 1) throw ConfigError("analysis.n_orbits: must be at least 1");
}

std::map<std::string, std::string> config_echo(const ExperimentConfig& cfg) {
  std::map<std::string, std::string> out;
  for (const auto& k : key_table()) {
    if (k.name == "numerics.thread_count" || k.name.rfind("output.", 0) == 0) continue;
    out[k.name] = k.get(cfg);
  }
  return out;
}

std::vector<int> tmi_blocks(const ExperimentConfig& cfg) {
  if (!cfg.analysis.blocks.empty()) return cfg.analysis.blocks;
  const int n = cfg.physics.N;
  return {1, std::max(1, n / 10), std::max(1, n / 5)};
}

}  // namespace scramble
