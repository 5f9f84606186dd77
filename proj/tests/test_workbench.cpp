#include "fqg/workbench.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace fqg;
using namespace fqg::workbench;
using report::json;

namespace {

std::string config_error_pointer(const json& j) {
  try {
    validate(parse_config(j));
  } catch (const ConfigError& e) {
    return e.pointer;
  }
  return "";
}

}  // namespace

TEST_CASE("strict config parsing") {
  CHECK(config_error_pointer(json::parse(R"({"experiment":"dims","bogus":1})")) == "/bogus");
  CHECK(config_error_pointer(json::parse(R"({"experiment":"dims","params":{"N":3,"G":1}})")) == "/params/G");
  CHECK(config_error_pointer(json::parse(R"({"experiment":"dims","max_level":"4"})")) == "/max_level");
  CHECK(config_error_pointer(json::parse(R"({"experiment":"nope"})")) == "/experiment");
  CHECK(config_error_pointer(json::parse(R"({"experiment":"rd-local","q":[2]})")) == "/seed");
  CHECK(config_error_pointer(json::parse(R"({"experiment":"rd-local","q":[2.5],"seed":1})")) == "/q/0");
  CHECK(config_error_pointer(json::parse(R"({"experiment":"dims","params":{"F":"orthogonal"}})")) == "/params/F");
  CHECK(config_error_pointer(json::parse(R"({"experiment":"dims","max_level":4})")) == "");
}

TEST_CASE("matrix F") {
  const auto c = parse_config(json::parse(
      R"({"experiment":"fusion","params":{"N":4,"F":{"matrix":[[0,1,0,0],[-1,0,0,0],[0,0,0,1],[0,0,-1,0]]}},"max_level":2})"));
  CHECK(c.F.kind == FSpec::Kind::Matrix);
  const QGParams P = c.params();
  CHECK(P.epsilon == -1);
  CHECK(config_error_pointer(json::parse(R"({"experiment":"dims","params":{"F":{"matrix":[[1,0],[0]]}}})")) ==
        "/params/F/matrix/1");
}

TEST_CASE("budget preflight") {
  auto c = parse_config(json::parse(R"({"experiment":"fusion","params":{"N":5},"max_level":6})"));
  CHECK_THROWS_AS(validate(c), BudgetError);
}

TEST_CASE("dims experiment writes its table") {
  auto c = parse_config(json::parse(R"({"experiment":"dims","max_level":6})"));
  validate(c);
  const auto rep = run(c);
  CHECK(rep.pass());
  const auto dir = std::filesystem::temp_directory_path() / "fqg-test-dims";
  std::filesystem::remove_all(dir);
  rep.write(dir);
  std::ifstream in(dir / "dims.csv");
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == "n,S_n\n0,1\n1,3\n2,8\n3,21\n4,55\n5,144\n6,377\n");
  CHECK(std::filesystem::exists(dir / "report.json"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("seeded experiments are deterministic") {
  auto c = parse_config(json::parse(R"({"experiment":"rd-local","max_level":2,"q":[1.5],"trials":2,"seed":42})"));
  validate(c);
  const auto a = run(c).deterministic_json().dump();
  const auto b = run(c).deterministic_json().dump();
  CHECK(a == b);
  c.seed = 43;
  CHECK(run(c).deterministic_json().dump() != a);
}

TEST_CASE("human summary") {
  auto c = parse_config(json::parse(R"({"experiment":"dims","max_level":3})"));
  const std::string s = human_summary(run(c));
  CHECK(s.rfind("dims\n", 0) == 0);
  CHECK(s.find("PASS  closed form") != std::string::npos);
  CHECK(s.substr(s.size() - 5) == "PASS\n");
}
