#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "scramble/config.hpp"
#include "scramble/io.hpp"

namespace scramble {

/// Library version string recorded in manifests.
const char* code_version();

/// One named table produced by a run; written as <name>.csv.
struct RunOutput {
  std::string name;
  DataTable table;
};

/// Dispatches a (non-figure) config to its method without touching the file
/// system. Every table carries config_echo() in its metadata. Module
/// DomainErrors propagate unchanged.
std::vector<RunOutput> compute(const ExperimentConfig& cfg);

struct OutputEntry {
  std::string file;  ///< relative to the manifest's directory
  std::string sha256;
  std::size_t rows = 0;
};

struct RunManifest {
  std::string method;
  std::string config_hash;
  std::string code_version;
  std::string started;   ///< ISO 8601 UTC
  std::string finished;
  std::uint64_t seed = 0;
  std::string canonical_config;
  std::string directory;
  std::vector<OutputEntry> outputs;
  std::map<std::string, std::string> summary;

  std::string to_json() const;
  static RunManifest from_json(const std::string& text);
};

/// Validates, computes and writes every output plus manifest.json into
/// cfg.output.directory. Figure methods are forwarded to run_figure.
RunManifest run(const ExperimentConfig& cfg);

/// Reads either config text or a manifest.json written by run().
ExperimentConfig load_config_or_manifest(const std::filesystem::path& path);

/// Named preset: a set of jobs plus an optional step that derives summary
/// tables from the job outputs.
struct FigureRecipe {
  std::string name;
  std::string description;
  /// What each emitted file holds, one line per file pattern.
  std::vector<std::string> columns;
  std::vector<std::pair<std::string, ExperimentConfig>> jobs;
  std::function<std::vector<RunOutput>(const std::vector<std::vector<RunOutput>>& job_outputs,
                                       const std::vector<std::pair<std::string, ExperimentConfig>>& jobs)>
      summarize;
};

std::vector<std::string> figure_names();
/// Throws ConfigError for an unknown name.
FigureRecipe figure_recipe(const std::string& name);

/// Applies `overrides` ("key=value") to every job, runs the jobs on a pool
/// of `threads` workers (0: SCRAMBLE_THREADS or hardware) and writes each
/// job into <directory>/<job>/ plus summaries and README.txt at the top.
RunManifest run_figure(const std::string& name, const std::vector<std::string>& overrides,
                       const std::filesystem::path& directory, int threads = 0);

}  // namespace scramble
