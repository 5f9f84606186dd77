#pragma once

#include "fqg/report.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace fqg::acceptance {

struct Options {
  std::uint64_t seed = 20240601;
  std::optional<std::filesystem::path> cache_dir;
};

struct CriterionInfo {
  int id;
  std::string title;
  double runtime_budget_seconds;  // 0 = no runtime requirement
};

const std::vector<CriterionInfo>& criteria();

// Runs one acceptance criterion (1..10). All tolerances are fixed in the implementation;
// the returned report passes iff every check passes, including the runtime budget.
report::Report run_criterion(int id, const Options& opts);

}  // namespace fqg::acceptance
