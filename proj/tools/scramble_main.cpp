#include <CLI11.hpp>
#include <cstdio>
#include <iostream>

#include "scramble/config.hpp"
#include "scramble/errors.hpp"
#include "scramble/runner.hpp"
#include "verify/criteria.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

void print_manifest(const scramble::RunManifest& m) {
  std::cout << m.method << " -> " << m.directory << "\n";
  for (const auto& o : m.outputs) std::cout << "  " << o.file << "  " << o.rows << " rows  " << o.sha256 << "\n";
  for (const auto& [k, v] : m.summary) std::cout << "  " << k << " = " << v << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scrambling and entanglement dynamics of collective spin models"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> run_sets;
  auto* run = app.add_subcommand("run", "run one experiment from a config file and/or --set overrides");
  run->add_option("config", config_path, "config file (key = value lines) or a manifest.json to re-run");
  run->add_option("--set", run_sets, "key=value overrides, applied after the file");
  bool print_config = false;
  run->add_flag("--print-config", print_config, "print the canonical config and exit");

  std::string figure_name, figure_dir;
  std::vector<std::string> figure_sets;
  int figure_threads = 0;
  bool list_figures = false;
  auto* figure = app.add_subcommand("figure", "run a named figure recipe");
  figure->add_option("name", figure_name, "recipe name");
  figure->add_option("--out", figure_dir, "output directory (default: figures/<name>)");
  figure->add_option("--set", figure_sets, "key=value overrides applied to every job");
  figure->add_option("--threads", figure_threads, "worker pool size (0: SCRAMBLE_THREADS or hardware)");
  figure->add_flag("--list", list_figures, "list the available recipes");

  std::vector<int> criteria;
  auto* verify = app.add_subcommand("verify", "run the acceptance criteria");
  verify->add_option("--criterion", criteria, "criterion numbers to run (default: all)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*run) {
      scramble::ExperimentConfig cfg;
      if (!config_path.empty()) cfg = scramble::load_config_or_manifest(config_path);
      for (const auto& s : run_sets) scramble::apply_override(cfg, s);
      scramble::validate(cfg);
      if (print_config) {
        std::cout << scramble::canonical_text(cfg);
        return kExitOk;
      }
      print_manifest(scramble::run(cfg));
      return kExitOk;
    }
    if (*figure) {
      if (list_figures) {
        for (const auto& n : scramble::figure_names())
          std::cout << n << ": " << scramble::figure_recipe(n).description << "\n";
        return kExitOk;
      }
      if (figure_name.empty()) throw scramble::ConfigError("figure: recipe name missing (see --list)");
      if (figure_dir.empty()) figure_dir = "figures/" + figure_name;
      print_manifest(scramble::run_figure(figure_name, figure_sets, figure_dir, figure_threads));
      return kExitOk;
    }
    if (*verify) {
      const auto results = scramble::verify::run_criteria(criteria, std::cout);
      for (const auto& r : results)
        if (!r.passed) return kExitFailed;
      return kExitOk;
    }
  } catch (const scramble::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const scramble::DomainError& e) {
    std::cerr << "parameter error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const scramble::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailed;
  }
  return kExitOk;
}
