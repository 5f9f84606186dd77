#include "fqg/cache.hpp"
#include "fqg/workbench.hpp"

#include <CLI11.hpp>

#include <iomanip>
#include <iostream>

namespace fs = std::filesystem;
using namespace fqg;

namespace {

// Exit codes: 0 all checks pass, 1 some check failed, 2 bad config or budget, 3 other error.
int run_experiment(const std::string& name, const std::string& config_path, const std::optional<std::uint64_t>& seed,
                   const std::string& out, const std::string& cache, const std::optional<int>& max_level,
                   const std::optional<double>& tol, const std::optional<int>& jobs) {
  workbench::ExperimentConfig cfg;
  if (!config_path.empty()) {
    cfg = workbench::load_config(config_path);
    if (cfg.experiment != name)
      throw workbench::ConfigError("/experiment", "config names '" + cfg.experiment + "' but the command is '" + name + "'");
  } else {
    cfg.experiment = name;
  }
  if (seed) cfg.seed = *seed;
  if (!out.empty()) cfg.output_dir = out;
  if (!cache.empty()) cfg.cache_dir = fs::path(cache);
  if (!cfg.cache_dir) cfg.cache_dir = workbench::default_cache_dir();
  if (max_level) cfg.max_level = *max_level;
  if (tol) cfg.tolerance = *tol;
  if (jobs) cfg.jobs = *jobs;
  const report::Report rep = workbench::run(cfg);
  rep.write(cfg.output_dir);
  std::cout << workbench::human_summary(rep);
  std::cout << "report: " << (cfg.output_dir / "report.json").string() << "\n";
  return rep.pass() ? 0 : 1;
}

int cache_command(const std::string& action, const std::string& dir, const std::string& fhash) {
  fs::path root = dir.empty() ? workbench::default_cache_dir().value_or(fs::path{}) : fs::path(dir);
  if (root.empty()) throw Error("no cache directory: pass --cache or set FQG_CACHE");
  if (!fs::is_directory(root)) throw Error("cache directory does not exist: " + root.string());
  if (action == "list") {
    std::cout << std::left << std::setw(14) << "fhash" << std::setw(4) << "N" << std::setw(13) << "kind" << std::setw(12)
              << "levels" << std::setw(14) << "shape" << "bytes\n";
    for (const auto& e : cache_admin::list(root)) {
      const std::string levels = std::to_string(e.levels[0]) + "," + std::to_string(e.levels[1]) + "," + std::to_string(e.levels[2]);
      std::cout << std::setw(14) << e.fhash.substr(0, 12) << std::setw(4) << e.N << std::setw(13)
                << (e.header_ok ? to_string(e.kind) : "corrupt") << std::setw(12) << levels << std::setw(14)
                << (std::to_string(e.rows) + "x" + std::to_string(e.cols)) << e.bytes << "\n";
    }
    return 0;
  }
  if (action == "verify") {
    int bad = 0;
    for (const auto& v : cache_admin::verify(root)) {
      if (!v.ok) ++bad;
      std::cout << (v.ok ? "OK       " : "CORRUPT  ") << v.path.string();
      if (!v.ok) std::cout << "  (" << v.problem << ")";
      std::cout << "\n";
    }
    return bad == 0 ? 0 : 1;
  }
  if (fhash.empty()) throw Error("purge needs --fhash");
  std::cout << "removed " << cache_admin::purge(root, fhash) << " files\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fqg: free quantum group workbench"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(FQG_CLI_VERSION));

  std::string config, out, cache;
  std::optional<std::uint64_t> seed;
  std::optional<int> max_level, jobs;
  std::optional<double> tol;
  std::string chosen;
  for (const auto& name : workbench::experiments()) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
    sub->add_option("--config", config, "JSON experiment config")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "random seed");
    sub->add_option("--out", out, "output directory");
    sub->add_option("--cache", cache, "matrix cache directory (default $FQG_CACHE)");
    sub->add_option("--max-level", max_level, "maximum level");
    sub->add_option("--tol", tol, "tolerance");
    sub->add_option("--jobs", jobs, "worker budget for full-suite");
    sub->callback([&chosen, name] { chosen = name; });
  }
  std::string action, cache_dir, fhash;
  CLI::App* cache_cmd = app.add_subcommand("cache", "inspect or clean the matrix cache");
  cache_cmd->add_option("action", action, "list | verify | purge")->required()->check(CLI::IsMember({"list", "verify", "purge"}));
  cache_cmd->add_option("--cache", cache_dir, "cache directory (default $FQG_CACHE)");
  cache_cmd->add_option("--fhash", fhash, "F-hash of the family to purge");

  CLI11_PARSE(app, argc, argv);
  try {
    if (cache_cmd->parsed()) return cache_command(action, cache_dir, fhash);
    return run_experiment(chosen, config, seed, out, cache, max_level, tol, jobs);
  } catch (const workbench::ConfigError& e) {
    std::cerr << "config error at " << e.what() << "\n";
    return 2;
  } catch (const workbench::BudgetError& e) {
    std::cerr << "budget error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
