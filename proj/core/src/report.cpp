#include "fqg/report.hpp"

#include "fqg/types.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

namespace fqg::report {

std::string to_string(Bound b) {
  switch (b) {
    case Bound::Exact: return "exact";
    case Bound::Lower: return "lower";
    case Bound::Upper: return "upper";
    case Bound::Estimate: return "estimate";
  }
  return "?";
}

Check check_le(std::string name, double value, double limit, Bound bound, std::string note) {
  return {std::move(name), value, limit, "<=", bound, value <= limit, std::move(note)};
}

Check check_ge(std::string name, double value, double limit, Bound bound, std::string note) {
  return {std::move(name), value, limit, ">=", bound, value >= limit, std::move(note)};
}

Check check_true(std::string name, bool ok, std::string note) {
  return {std::move(name), ok ? 1.0 : 0.0, 1.0, "holds", Bound::Exact, ok, std::move(note)};
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string num(long long v) { return std::to_string(v); }

void Table::add(std::vector<std::string> row) {
  if (row.size() != header.size()) throw Error("table " + name + ": row width does not match header");
  rows.push_back(std::move(row));
}

void Table::write_csv(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / (name + ".csv"));
  if (!out) throw Error("cannot write " + (dir / (name + ".csv")).string());
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << "\n";
  };
  line(header);
  for (const auto& r : rows) line(r);
}

Report::Report(std::string experiment, json config_echo) : experiment_(std::move(experiment)), config_(std::move(config_echo)) {}

void Report::add_check(Check c) { checks_.push_back(std::move(c)); }
void Report::set_constant(const std::string& key, json value) { constants_[key] = std::move(value); }
void Report::set_verdict(const std::string& key, json value) { verdicts_[key] = std::move(value); }
void Report::add_table(Table t) { tables_.push_back(std::move(t)); }
void Report::set_runtime(const std::string& key, json value) { runtime_[key] = std::move(value); }

void Report::add_runtime_check(Check c) { runtime_checks_.push_back(std::move(c)); }

void Report::merge(const std::string& prefix, const Report& other) {
  for (auto c : other.checks_) {
    c.name = prefix + "/" + c.name;
    checks_.push_back(std::move(c));
  }
  for (auto c : other.runtime_checks_) {
    c.name = prefix + "/" + c.name;
    runtime_checks_.push_back(std::move(c));
  }
  if (!other.constants_.empty()) constants_[prefix] = other.constants_;
  if (!other.verdicts_.empty()) verdicts_[prefix] = other.verdicts_;
  if (!other.runtime_.empty()) runtime_[prefix] = other.runtime_;
  for (auto t : other.tables_) {
    t.name = prefix + "_" + t.name;
    tables_.push_back(std::move(t));
  }
}

bool Report::checks_pass() const {
  for (const auto& c : checks_)
    if (!c.pass) return false;
  return true;
}

bool Report::pass() const {
  for (const auto& c : runtime_checks_)
    if (!c.pass) return false;
  return checks_pass();
}

json check_to_json(const Check& c) {
  json j;
  j["name"] = c.name;
  // JSON has no infinities; they are emitted as strings.
  if (std::isfinite(c.value)) j["value"] = c.value;
  else j["value"] = num(c.value);
  j["relation"] = c.relation;
  if (std::isfinite(c.limit)) j["limit"] = c.limit;
  else j["limit"] = num(c.limit);
  j["bound"] = to_string(c.bound);
  j["pass"] = c.pass;
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

json Report::deterministic_json() const {
  json j;
  j["experiment"] = experiment_;
  j["workbench_version"] = FQG_VERSION_STRING;
  j["config"] = config_;
  j["checks_pass"] = checks_pass();
  j["checks"] = json::array();
  for (const auto& c : checks_) j["checks"].push_back(check_to_json(c));
  j["constants"] = constants_;
  j["verdicts"] = verdicts_;
  j["tables"] = json::array();
  for (const auto& t : tables_) j["tables"].push_back(t.name + ".csv");
  return j;
}

json Report::to_json() const {
  json j = deterministic_json();
  json rt = runtime_;
  rt["checks"] = json::array();
  for (const auto& c : runtime_checks_) rt["checks"].push_back(check_to_json(c));
  rt["pass"] = pass();
  j["runtime"] = rt;
  return j;
}

void Report::write(const std::filesystem::path& out_dir) const {
  std::filesystem::create_directories(out_dir);
  std::ofstream out(out_dir / "report.json");
  if (!out) throw Error("cannot write " + (out_dir / "report.json").string());
  out << to_json().dump(2) << "\n";
  for (const auto& t : tables_) t.write_csv(out_dir);
}

}  // namespace fqg::report
