#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace scramble {

/// Methods accepted by run(); "figure:<name>" selects a recipe instead.
const std::vector<std::string>& method_names();

/// One experiment. Text form is flat "key = value" lines with dotted keys
/// (method, physics.*, numerics.*, output.*, analysis.*); '#' starts a comment.
struct ExperimentConfig {
  std::string method = "ed-quench";

  struct Physics {
    int N = 100;
    double J = 1.0;
    double h0 = 0.0;
    double hf = 2.0;
    double K = 0.0;
    double tau = 1.0;
    double alpha = 0.0;
  } physics;

  struct Numerics {
    double dt = 1e-3;         ///< integrator step
    double t_max = 10.0;
    double sample_dt = 0.1;   ///< output grid (stroboscopic runs use tau)
    long long n_samples = 5000;
    std::uint64_t seed = 1;
    int thread_count = 0;     ///< 0: SCRAMBLE_THREADS or hardware
  } numerics;

  struct Output {
    std::string directory = "out";
    std::vector<std::string> formats{"csv"};  ///< subset of {csv, json}
  } output;

  struct Analysis {
    std::vector<int> blocks;              ///< n_A, n_B, n_C; empty: 1, N/10, N/5
    std::string closure = "derived";      ///< derived | as-printed
    std::string estimator = "weyl";       ///< weyl | product
    std::string boundary = "open";        ///< open | periodic
    std::string tmi_scan = "contiguous";  ///< contiguous | all
    int n_orbits = 24;                    ///< Poincare seeds
  } analysis;

  bool is_figure() const { return method.rfind("figure:", 0) == 0; }
  std::string figure_name() const { return is_figure() ? method.substr(7) : std::string(); }
};

/// Every accepted key, in canonical order.
const std::vector<std::string>& config_keys();

/// Parses config text on top of the defaults. Unknown or repeated keys and
/// malformed values throw ConfigError.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Sets one key from its text value (ConfigError on failure).
void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value);
/// "key=value" form used by --set.
void apply_override(ExperimentConfig& cfg, std::string_view assignment);

/// Canonical value text of one key.
std::string config_value(const ExperimentConfig& cfg, std::string_view key);

/// All keys in canonical order, one "key = value" line each. Numbers use the
/// shortest text that reads back to the same value.
std::string canonical_text(const ExperimentConfig& cfg);
std::string config_hash(const ExperimentConfig& cfg);

/// Range and vocabulary checks that do not depend on the method's physics.
/// Throws ConfigError.
void validate(const ExperimentConfig& cfg);

/// Keys echoed into every output file: method, physics.*, and the numerics
/// that determine the data (thread_count is excluded).
std::map<std::string, std::string> config_echo(const ExperimentConfig& cfg);

/// Blocks actually used for the TMI of a symmetric-sector run.
std::vector<int> tmi_blocks(const ExperimentConfig& cfg);

}  // namespace scramble
