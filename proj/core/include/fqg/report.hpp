#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace fqg::report {

using json = nlohmann::ordered_json;

// How a reported number relates to the quantity it estimates.
enum class Bound { Exact, Lower, Upper, Estimate };
std::string to_string(Bound b);

struct Check {
  std::string name;
  double value = 0;
  double limit = 0;
  std::string relation;  // "<=", ">=", "==" or "holds"
  Bound bound = Bound::Exact;
  bool pass = false;
  std::string note;
};

Check check_le(std::string name, double value, double limit, Bound bound = Bound::Exact, std::string note = {});
Check check_ge(std::string name, double value, double limit, Bound bound = Bound::Exact, std::string note = {});
Check check_true(std::string name, bool ok, std::string note = {});

struct Table {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows = {};

  void add(std::vector<std::string> row);
  void write_csv(const std::filesystem::path& dir) const;
};

// Fixed formatting for numbers in CSV cells: shortest round-trip representation.
std::string num(double v);
std::string num(long long v);

class Report {
 public:
  Report(std::string experiment, json config_echo);

  void add_check(Check c);
  void set_constant(const std::string& key, json value);
  void set_verdict(const std::string& key, json value);
  void add_table(Table t);
  // Runtime section: excluded from determinism comparisons.
  void set_runtime(const std::string& key, json value);
  // Wall-clock requirements. Counted in pass() but reported in the runtime section.
  void add_runtime_check(Check c);
  // Appends another report's checks, constants, verdicts and tables under a name prefix.
  void merge(const std::string& prefix, const Report& other);

  // Every invariant check and runtime check passes.
  bool pass() const;
  bool checks_pass() const;
  const std::string& experiment() const { return experiment_; }
  const std::vector<Check>& runtime_checks() const { return runtime_checks_; }
  const json& constants() const { return constants_; }
  const std::vector<Check>& checks() const { return checks_; }
  const std::vector<Table>& tables() const { return tables_; }

  json to_json() const;
  // Same document without the runtime section.
  json deterministic_json() const;
  void write(const std::filesystem::path& out_dir) const;

 private:
  std::string experiment_;
  json config_;
  json constants_ = json::object();
  json verdicts_ = json::object();
  json runtime_ = json::object();
  std::vector<Check> checks_;
  std::vector<Check> runtime_checks_;
  std::vector<Table> tables_;
};

json check_to_json(const Check& c);

}  // namespace fqg::report
