#pragma once

#include "fqg/params.hpp"
#include "fqg/report.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fqg::workbench {

using report::json;

// Invalid configuration; the message starts with the JSON pointer of the offending field.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& pointer, const std::string& what) : Error(pointer + ": " + what), pointer(pointer) {}
  std::string pointer;
};

// Requested sizes exceed what the modules can hold; raised before any heavy compute.
class BudgetError : public Error {
 public:
  using Error::Error;
};

struct FSpec {
  enum class Kind { Identity, Named, File, Matrix } kind = Kind::Identity;
  std::string name;  // Named
  std::string file;  // File
  cmat matrix;       // Matrix
};

struct ExperimentConfig {
  std::string experiment;
  int N = 3;
  FSpec F;
  int max_level = 4;
  int max_length = 2;
  int max_dim = 4;  // schatten: dims of H, l2(d), K range over 1..max_dim
  std::vector<double> q_grid{2.0};
  std::vector<double> p_grid{2.0};
  std::vector<double> r_grid;
  std::vector<std::pair<double, double>> pairs{{3.0, 5.0}};
  int trials = 8;
  std::optional<std::uint64_t> seed;
  double tolerance = 1e-9;
  std::optional<std::filesystem::path> cache_dir;
  std::filesystem::path output_dir = "fqg-out";
  int K = 4;
  int k_max = 12;
  int jobs = 1;
  std::vector<int> criteria;  // full-suite subset; empty = all

  QGParams params() const;
  json to_json() const;
};

const std::vector<std::string>& experiments();
bool is_randomized(const std::string& experiment);

// Strict parse: unknown fields, wrong types and out-of-range values raise ConfigError.
ExperimentConfig parse_config(const json& j);
ExperimentConfig load_config(const std::filesystem::path& file);
// Consistency checks after CLI overrides: experiment known, seed present when needed, budgets.
void validate(const ExperimentConfig& cfg);

// Cache directory from FQG_CACHE when the config leaves it unset.
std::optional<std::filesystem::path> default_cache_dir();

// Dispatches to the named experiment. Does not write files.
report::Report run(const ExperimentConfig& cfg);

// Six significant digits, for terminal summaries.
std::string human_summary(const report::Report& rep);

}  // namespace fqg::workbench
