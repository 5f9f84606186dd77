// Runs one acceptance criterion and prints a pass/fail line per check.

#include "fqg/acceptance.hpp"
#include "fqg/workbench.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"fqg acceptance criteria"};
  int id = 0;
  std::uint64_t seed = fqg::acceptance::Options{}.seed;
  std::string out;
  app.add_option("--criterion", id, "criterion number")->required()->check(CLI::Range(1, 10));
  app.add_option("--seed", seed, "base seed");
  app.add_option("--out", out, "write report.json and tables here");
  CLI11_PARSE(app, argc, argv);

  fqg::acceptance::Options opts;
  opts.seed = seed;
  opts.cache_dir = fqg::workbench::default_cache_dir();
  try {
    const auto rep = fqg::acceptance::run_criterion(id, opts);
    std::cout << fqg::workbench::human_summary(rep);
    if (!out.empty()) rep.write(out);
    std::cout << "criterion " << id << ": " << (rep.pass() ? "PASS" : "FAIL") << std::endl;
    return rep.pass() ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "criterion " << id << ": error: " << e.what() << std::endl;
    return 2;
  }
}
