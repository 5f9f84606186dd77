#include "fqg/workbench.hpp"

#include "fqg/acceptance.hpp"
#include "fqg/algebra.hpp"
#include "fqg/harmonic.hpp"
#include "fqg/intertwiners.hpp"
#include "fqg/linalg.hpp"
#include "fqg/spectral.hpp"
#include "fqg/trace_rigidity.hpp"
#include "fqg/unitary.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <future>
#include <iomanip>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>

namespace fqg::workbench {

using algebra::BlockElement;
using report::Bound;
using report::check_le;
using report::check_true;
using report::num;
using report::Report;
using report::Table;

const std::vector<std::string>& experiments() {
  static const std::vector<std::string> list = {
      "dims",       "fusion",        "jw-validate", "conv-check", "schatten",      "rd-local",     "rd-global",
      "thresholds", "exotic-window", "pd-gram",     "trace-iterate", "unitary-scan", "full-suite",
  };
  return list;
}

bool is_randomized(const std::string& e) {
  static const std::set<std::string> r = {"conv-check", "schatten",      "rd-local",     "rd-global",
                                          "pd-gram",    "trace-iterate", "unitary-scan", "full-suite"};
  return r.count(e) > 0;
}

QGParams ExperimentConfig::params() const {
  switch (F.kind) {
    case FSpec::Kind::Identity: return QGParams::identity(N);
    case FSpec::Kind::Named: return QGParams::named(F.name, N);
    case FSpec::Kind::File: {
      QGParams p = QGParams::from_file(F.file);
      if (p.N != N) throw ConfigError("/params/F/file", "matrix size " + std::to_string(p.N) + " does not match N");
      return p;
    }
    case FSpec::Kind::Matrix: return QGParams::from_matrix(F.matrix);
  }
  throw Error("unreachable");
}

json ExperimentConfig::to_json() const {
  json j;
  j["experiment"] = experiment;
  json p;
  p["N"] = N;
  switch (F.kind) {
    case FSpec::Kind::Identity: p["F"] = "identity"; break;
    case FSpec::Kind::Named: p["F"] = F.name; break;
    case FSpec::Kind::File: p["F"] = {{"file", F.file}}; break;
    case FSpec::Kind::Matrix: {
      json rows = json::array();
      for (Index i = 0; i < F.matrix.rows(); ++i) {
        json row = json::array();
        for (Index k = 0; k < F.matrix.cols(); ++k) row.push_back({F.matrix(i, k).real(), F.matrix(i, k).imag()});
        rows.push_back(row);
      }
      p["F"] = {{"matrix", rows}};
      break;
    }
  }
  j["params"] = p;
  j["max_level"] = max_level;
  j["max_length"] = max_length;
  j["max_dim"] = max_dim;
  j["q"] = q_grid;
  j["p"] = p_grid;
  j["r"] = r_grid;
  json pr = json::array();
  for (auto [a, b] : pairs) pr.push_back({a, b});
  j["pairs"] = pr;
  j["trials"] = trials;
  if (seed) j["seed"] = *seed;
  j["tolerance"] = tolerance;
  // Paths are environment, not experiment identity; they stay out of the echo.
  j["K"] = K;
  j["k_max"] = k_max;
  j["criteria"] = criteria;
  return j;
}

namespace {

std::string type_name(const json& v) { return v.type_name(); }

int get_int(const json& v, const std::string& ptr, int lo, int hi) {
  if (!v.is_number_integer()) throw ConfigError(ptr, "expected integer, got " + type_name(v));
  const auto x = v.get<long long>();
  if (x < lo || x > hi)
    throw ConfigError(ptr, "value " + std::to_string(x) + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return static_cast<int>(x);
}

double get_double(const json& v, const std::string& ptr) {
  if (!v.is_number()) throw ConfigError(ptr, "expected number, got " + type_name(v));
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(ptr, "expected a finite number");
  return x;
}

std::string get_string(const json& v, const std::string& ptr) {
  if (!v.is_string()) throw ConfigError(ptr, "expected string, got " + type_name(v));
  return v.get<std::string>();
}

std::vector<double> get_grid(const json& v, const std::string& ptr) {
  if (!v.is_array()) throw ConfigError(ptr, "expected array of numbers, got " + type_name(v));
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(get_double(v[i], ptr + "/" + std::to_string(i)));
  return out;
}

template <class Handlers>
void dispatch_object(const json& obj, const std::string& ptr, const Handlers& handlers) {
  if (!obj.is_object()) throw ConfigError(ptr.empty() ? "/" : ptr, "expected object, got " + type_name(obj));
  for (const auto& [key, value] : obj.items()) {
    auto it = handlers.find(key);
    if (it == handlers.end()) throw ConfigError(ptr + "/" + key, "unknown field");
    it->second(value, ptr + "/" + key);
  }
}

FSpec parse_F(const json& v, const std::string& ptr) {
  FSpec f;
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "identity") return f;
    static const std::set<std::string> names = {"symplectic", "phase", "twisted"};
    if (!names.count(s)) throw ConfigError(ptr, "unknown named case '" + s + "' (identity, symplectic, phase, twisted)");
    f.kind = FSpec::Kind::Named;
    f.name = s;
    return f;
  }
  if (!v.is_object() || v.size() != 1) throw ConfigError(ptr, "expected a name, {\"file\": path} or {\"matrix\": rows}");
  if (v.contains("file")) {
    f.kind = FSpec::Kind::File;
    f.file = get_string(v["file"], ptr + "/file");
    return f;
  }
  if (v.contains("matrix")) {
    const json& rows = v["matrix"];
    const std::string mp = ptr + "/matrix";
    if (!rows.is_array() || rows.empty()) throw ConfigError(mp, "expected a nonempty array of rows");
    const Index n = static_cast<Index>(rows.size());
    f.kind = FSpec::Kind::Matrix;
    f.matrix = cmat::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
      const json& row = rows[static_cast<std::size_t>(i)];
      const std::string rp = mp + "/" + std::to_string(i);
      if (!row.is_array() || static_cast<Index>(row.size()) != n) throw ConfigError(rp, "expected " + std::to_string(n) + " entries");
      for (Index k = 0; k < n; ++k) {
        const json& e = row[static_cast<std::size_t>(k)];
        const std::string ep = rp + "/" + std::to_string(k);
        if (e.is_number()) f.matrix(i, k) = get_double(e, ep);
        else if (e.is_array() && e.size() == 2)
          f.matrix(i, k) = cplx(get_double(e[0], ep + "/0"), get_double(e[1], ep + "/1"));
        else throw ConfigError(ep, "expected a number or [re, im]");
      }
    }
    return f;
  }
  throw ConfigError(ptr + "/" + v.begin().key(), "unknown field");
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
  using Handler = std::function<void(const json&, const std::string&)>;
  ExperimentConfig c;
  bool have_experiment = false;
  const std::map<std::string, Handler> params_fields = {
      {"N", [&](const json& v, const std::string& p) { c.N = get_int(v, p, 2, 64); }},
      {"F", [&](const json& v, const std::string& p) { c.F = parse_F(v, p); }},
  };
  const std::map<std::string, Handler> fields = {
      {"experiment",
       [&](const json& v, const std::string& p) {
         c.experiment = get_string(v, p);
         const auto& ex = experiments();
         if (std::find(ex.begin(), ex.end(), c.experiment) == ex.end())
           throw ConfigError(p, "unknown experiment '" + c.experiment + "'");
         have_experiment = true;
       }},
      {"params", [&](const json& v, const std::string& p) { dispatch_object(v, p, params_fields); }},
      {"max_level", [&](const json& v, const std::string& p) { c.max_level = get_int(v, p, 0, 64); }},
      {"max_length", [&](const json& v, const std::string& p) { c.max_length = get_int(v, p, 0, 32); }},
      {"max_dim", [&](const json& v, const std::string& p) { c.max_dim = get_int(v, p, 1, 64); }},
      {"q", [&](const json& v, const std::string& p) { c.q_grid = get_grid(v, p); }},
      {"p", [&](const json& v, const std::string& p) { c.p_grid = get_grid(v, p); }},
      {"r", [&](const json& v, const std::string& p) { c.r_grid = get_grid(v, p); }},
      {"pairs",
       [&](const json& v, const std::string& p) {
         if (!v.is_array()) throw ConfigError(p, "expected array of [p, p'] pairs");
         c.pairs.clear();
         for (std::size_t i = 0; i < v.size(); ++i) {
           const std::string ip = p + "/" + std::to_string(i);
           if (!v[i].is_array() || v[i].size() != 2) throw ConfigError(ip, "expected [p, p']");
           c.pairs.emplace_back(get_double(v[i][0], ip + "/0"), get_double(v[i][1], ip + "/1"));
         }
       }},
      {"trials", [&](const json& v, const std::string& p) { c.trials = get_int(v, p, 1, 1000000); }},
      {"seed",
       [&](const json& v, const std::string& p) {
         if (!v.is_number_unsigned()) throw ConfigError(p, "expected a nonnegative integer, got " + type_name(v));
         c.seed = v.get<std::uint64_t>();
       }},
      {"tolerance",
       [&](const json& v, const std::string& p) {
         c.tolerance = get_double(v, p);
         if (!(c.tolerance > 0)) throw ConfigError(p, "must be positive");
       }},
      {"cache_dir", [&](const json& v, const std::string& p) { c.cache_dir = get_string(v, p); }},
      {"output_dir", [&](const json& v, const std::string& p) { c.output_dir = get_string(v, p); }},
      {"K", [&](const json& v, const std::string& p) { c.K = get_int(v, p, 0, 64); }},
      {"k_max", [&](const json& v, const std::string& p) { c.k_max = get_int(v, p, 0, 1000); }},
      {"jobs", [&](const json& v, const std::string& p) { c.jobs = get_int(v, p, 1, 256); }},
      {"criteria",
       [&](const json& v, const std::string& p) {
         if (!v.is_array()) throw ConfigError(p, "expected array of criterion numbers");
         c.criteria.clear();
         for (std::size_t i = 0; i < v.size(); ++i) c.criteria.push_back(get_int(v[i], p + "/" + std::to_string(i), 1, 10));
       }},
  };
  dispatch_object(j, "", fields);
  if (!have_experiment) throw ConfigError("/experiment", "required field missing");
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error("cannot open config " + file.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("/", std::string("malformed JSON: ") + e.what());
  }
  return parse_config(j);
}

std::optional<std::filesystem::path> default_cache_dir() {
  if (const char* env = std::getenv("FQG_CACHE"); env && *env) return std::filesystem::path(env);
  return std::nullopt;
}

namespace {

// Largest matrix side the intertwiner layer is allowed to build.
constexpr double kMaxBlockDim = 4000;

void require_level_budget(int N, int level, const std::string& ptr) {
  const double d = spectral::chebyshev_real(level, N);
  if (d > kMaxBlockDim)
    throw BudgetError(ptr + ": level " + std::to_string(level) + " has dimension " + num(d) + " for N = " +
                      std::to_string(N) + ", above the budget " + num(kMaxBlockDim));
}

void require_positive_grid(const std::vector<double>& g, const std::string& ptr, double lo, double hi) {
  for (std::size_t i = 0; i < g.size(); ++i)
    if (!(g[i] >= lo && g[i] <= hi))
      throw ConfigError(ptr + "/" + std::to_string(i), "value " + num(g[i]) + " outside [" + num(lo) + ", " + num(hi) + "]");
}

}  // namespace

void validate(const ExperimentConfig& c) {
  const auto& ex = experiments();
  if (std::find(ex.begin(), ex.end(), c.experiment) == ex.end())
    throw ConfigError("/experiment", "unknown experiment '" + c.experiment + "'");
  if (is_randomized(c.experiment) && !c.seed)
    throw ConfigError("/seed", "required for the randomized experiment '" + c.experiment + "'");
  if (c.N < 3 && c.experiment != "schatten" && c.experiment != "full-suite")
    throw ConfigError("/params/N", "the free orthogonal layer needs N >= 3");
  if (c.F.kind == FSpec::Kind::Matrix && c.F.matrix.rows() != c.N)
    throw ConfigError("/params/F/matrix", "matrix size does not match N");
  const std::string& e = c.experiment;
  if (e == "rd-local" || e == "rd-global" || e == "schatten") require_positive_grid(c.q_grid, "/q", 1, 2);
  if (e == "thresholds" || e == "trace-iterate") require_positive_grid(c.p_grid, "/p", 1, 1e6);
  if (e == "thresholds" || e == "pd-gram") require_positive_grid(c.r_grid, "/r", 1e-12, 1 - 1e-12);
  if (e == "exotic-window")
    for (std::size_t i = 0; i < c.pairs.size(); ++i)
      if (!(c.pairs[i].first >= 2 && c.pairs[i].second > c.pairs[i].first))
        throw ConfigError("/pairs/" + std::to_string(i), "needs 2 <= p < p'");
  if (e == "unitary-scan" && std::pow(double(c.N), 2.0 * c.max_length) > 5000)
    throw BudgetError("/max_length: ambient dimension N^(2 max_length) exceeds 5000");
  if (e == "dims") {
    if (c.max_level > 60) throw BudgetError("/max_level: dims beyond level 60 overflow");
  } else if (e == "fusion" || e == "jw-validate" || e == "conv-check" || e == "rd-local" || e == "pd-gram") {
    const int top = e == "jw-validate" ? c.max_level : 2 * c.max_level;
    require_level_budget(c.N, top, "/max_level");
    if (e == "jw-validate" && std::pow(double(c.N), c.max_level) > 3000)
      throw BudgetError("/max_level: ambient dimension N^max_level exceeds 3000");
  } else if (e == "rd-global") {
    require_level_budget(c.N, c.max_level, "/max_level");
  } else if (e == "trace-iterate") {
    require_level_budget(c.N, std::max(c.K, c.max_level), "/K");
    if (c.p_grid.empty() || c.p_grid.front() < 2) throw ConfigError("/p/0", "trace-iterate needs p >= 2");
  }
  if (e == "full-suite" && c.jobs < 1) throw ConfigError("/jobs", "must be >= 1");
}

namespace {

tl::CategoryOptions cat_options(const ExperimentConfig& c, int max_level) {
  tl::CategoryOptions o;
  o.max_level = max_level;
  o.cache_dir = c.cache_dir;
  return o;
}

std::vector<int> random_levels(std::mt19937_64& rng, int top) {
  std::vector<int> out;
  std::bernoulli_distribution coin(0.5);
  for (int n = 0; n <= top; ++n)
    if (coin(rng)) out.push_back(n);
  if (out.empty()) out.push_back(std::uniform_int_distribution<int>(0, top)(rng));
  return out;
}

double max_abs(const BlockElement& x) {
  double m = 0;
  for (const auto& [n, b] : x.blocks) m = std::max(m, b.cwiseAbs().maxCoeff());
  return m;
}

void record_cache(Report& rep, const tl::Category& cat) {
  if (const auto* mc = cat.cache()) {
    rep.set_runtime("cache_hits", mc->hits());
    rep.set_runtime("cache_misses", mc->misses());
  }
}

Report run_dims(const ExperimentConfig& c) {
  Report rep("dims", c.to_json());
  Table t{"dims", {"n", "S_n"}};
  bool closed = true;
  for (int n = 0; n <= c.max_level; ++n) {
    const std::int64_t d = spectral::chebyshev_dim(n, c.N);
    t.add({num((long long)n), num((long long)d)});
    if (c.N > 2) closed = closed && std::abs(spectral::chebyshev_closed_form(n, c.N) - double(d)) <= 1e-9 * double(d);
  }
  rep.add_check(check_true("closed form matches the recursion", closed));
  rep.add_table(std::move(t));
  return rep;
}

Report run_fusion(const ExperimentConfig& c) {
  Report rep("fusion", c.to_json());
  tl::Category cat(c.params(), cat_options(c, 2 * c.max_level));
  Table t{"fusion", {"n", "k", "completeness", "isometry", "conjugation_consistency"}};
  double comp = 0, iso = 0, cons = 0;
  for (int n = 0; n <= c.max_level; ++n)
    for (int k = 0; k <= c.max_level; ++k) {
      const auto r = tl::fusion_completeness(cat, n, k);
      double cc = 0;
      for (int l : spectral::fusion_range(n, k)) cc = std::max(cc, std::abs(1.0 - tl::conjugation_consistency(cat, l, n, k)));
      comp = std::max(comp, r.completeness);
      iso = std::max(iso, r.isometry);
      cons = std::max(cons, cc);
      t.add({num((long long)n), num((long long)k), num(r.completeness), num(r.isometry), num(cc)});
    }
  rep.add_check(check_le("completeness sum_l V V* = I", comp, c.tolerance));
  rep.add_check(check_le("isometry V* V = I", iso, c.tolerance));
  rep.add_check(check_le("conjugation consistency", cons, c.tolerance));
  rep.add_table(std::move(t));
  record_cache(rep, cat);
  return rep;
}

Report run_jw(const ExperimentConfig& c) {
  Report rep("jw-validate", c.to_json());
  tl::Category cat(c.params(), cat_options(c, c.max_level));
  Table t{"jones_wenzl", {"n", "hermitian", "idempotency", "rank", "expected_rank", "cup_annihilation", "pass"}};
  for (int n = 1; n <= c.max_level; ++n) {
    const auto r = tl::validate_jw(cat, n, c.tolerance);
    t.add({num((long long)n), num(r.hermitian), num(r.idempotency), num((long long)r.rank),
           num((long long)r.expected_rank), num(r.cup_annihilation), r.pass ? "true" : "false"});
    const std::string tag = "n=" + std::to_string(n);
    rep.add_check(check_le("hermitian " + tag, r.hermitian, c.tolerance));
    rep.add_check(check_le("idempotent " + tag, r.idempotency, c.tolerance));
    rep.add_check(check_true("rank = S_n(N) " + tag, r.rank == spectral::chebyshev_dim(n, c.N)));
    rep.add_check(check_le("cup annihilation " + tag, r.cup_annihilation, c.tolerance));
  }
  rep.add_table(std::move(t));
  record_cache(rep, cat);
  return rep;
}

Report run_conv(const ExperimentConfig& c) {
  Report rep("conv-check", c.to_json());
  const int half = std::max(1, c.max_level / 2);
  tl::Category cat(c.params(), cat_options(c, 2 * half + 1));
  std::mt19937_64 rng(*c.seed);
  const BlockElement p0 = algebra::unit_at(cat, 0);
  double oracle = 0, assoc = 0, unit = 0, anti = 0;
  for (int t = 0; t < c.trials; ++t) {
    const BlockElement x = algebra::random_element(cat, random_levels(rng, half), rng);
    const BlockElement y = algebra::random_element(cat, random_levels(rng, half), rng);
    const BlockElement z = algebra::random_element(cat, {0, 1}, rng);
    const BlockElement a = algebra::random_element(cat, random_levels(rng, 2 * half), rng);
    const BlockElement xy = algebra::convolve(cat, x, y);
    const double scale = algebra::lq_norm(cat, xy, 2) * algebra::lq_norm(cat, a, 2);
    oracle = std::max(oracle, std::abs(algebra::haar(cat, algebra::product(a, xy)) -
                                       algebra::convolve_oracle_pairing(cat, x, y, a)) / scale);
    const BlockElement l = algebra::convolve(cat, xy, z);
    assoc = std::max(assoc, algebra::max_abs_diff(l, algebra::convolve(cat, x, algebra::convolve(cat, y, z))) / max_abs(l));
    unit = std::max(unit, algebra::max_abs_diff(algebra::convolve(cat, p0, x), x) / max_abs(x));
    const BlockElement s = algebra::sharp(cat, xy);
    anti = std::max(anti, algebra::max_abs_diff(s, algebra::convolve(cat, algebra::sharp(cat, y), algebra::sharp(cat, x))) /
                              max_abs(s));
  }
  rep.add_check(check_le("convolution vs pairing oracle (relative)", oracle, c.tolerance));
  rep.add_check(check_le("associativity (relative)", assoc, c.tolerance));
  rep.add_check(check_le("unit law (relative)", unit, c.tolerance));
  rep.add_check(check_le("sharp anti-homomorphism (relative)", anti, c.tolerance));
  record_cache(rep, cat);
  return rep;
}

Report run_schatten(const ExperimentConfig& c) {
  Report rep("schatten", c.to_json());
  Table t{"schatten", {"dH", "d", "dK", "q", "max_ratio"}};
  double worst = 0;
  std::uint64_t cell = 0;
  for (Index a = 1; a <= c.max_dim; ++a)
    for (Index d = 1; d <= c.max_dim; ++d)
      for (Index b = 1; b <= c.max_dim; ++b)
        for (double q : c.q_grid) {
          const double r = harmonic::schatten_contraction_trial(a, d, b, q, c.trials, linalg::derive_seed(*c.seed, cell++));
          worst = std::max(worst, r);
          t.add({num((long long)a), num((long long)d), num((long long)b), num(q), num(r)});
        }
  rep.add_check(check_le("max contraction ratio", worst, 1 + c.tolerance, Bound::Lower, "sampled maximum"));
  rep.add_table(std::move(t));
  return rep;
}

Report run_rd_local(const ExperimentConfig& c) {
  Report rep("rd-local", c.to_json());
  tl::Category cat(c.params(), cat_options(c, 2 * c.max_level));
  Table t{"rd_local", {"q", "n", "k", "l", "ratio", "ratio_doubled"}};
  for (double q : c.q_grid) {
    const auto r = harmonic::local_rd_scan(cat, q, c.max_level, c.trials, *c.seed);
    for (const auto& x : r.cells)
      t.add({num(q), num((long long)x.n), num((long long)x.k), num((long long)x.l), num(x.ratio), num(x.ratio_doubled)});
    const std::string tag = "q=" + num(q);
    rep.set_constant("D_N " + tag, {{"value", r.empirical_local_constant_doubled}, {"bound", "lower"}});
    rep.set_constant("dim-ratio constant", spectral::empirical_dim_constant(c.max_level, c.N));
    rep.add_check(check_true("finite local constant " + tag, std::isfinite(r.empirical_local_constant_doubled)));
    rep.add_check(check_le("local constant change under doubling " + tag,
                           (r.empirical_local_constant_doubled - r.empirical_local_constant) / r.empirical_local_constant,
                           0.05, Bound::Estimate));
  }
  rep.add_table(std::move(t));
  record_cache(rep, cat);
  return rep;
}

Report run_rd_global(const ExperimentConfig& c) {
  Report rep("rd-global", c.to_json());
  tl::Category cat(c.params(), cat_options(c, c.max_level));
  Table t{"rd_global", {"q", "n", "K", "out_max", "ratio", "exact"}};
  for (double q : c.q_grid)
    for (int n = 0; n <= c.max_level; ++n) {
      const int K = std::min(c.K, c.max_level - n);
      const auto g = harmonic::global_rd_estimate(cat, n, q, K, c.trials, linalg::derive_seed(*c.seed, n), c.max_level);
      t.add({num(q), num((long long)n), num((long long)K), num((long long)g.out_max), num(g.worst_ratio),
             g.exact_operator_norm ? "true" : "false"});
      rep.add_check(check_true("finite R(" + std::to_string(n) + ") q=" + num(q), std::isfinite(g.worst_ratio)));
    }
  rep.add_table(std::move(t));
  record_cache(rep, cat);
  return rep;
}

Report run_thresholds(const ExperimentConfig& c) {
  Report rep("thresholds", c.to_json());
  Table t{"thresholds", {"p", "r", "threshold", "analytic", "empirical", "tail_ratio"}};
  std::vector<double> rs = c.r_grid;
  for (double p : c.p_grid) {
    std::vector<double> grid = rs;
    if (grid.empty()) grid = {0.95 * spectral::threshold(p, c.N), 1.05 * spectral::threshold(p, c.N)};
    for (double r : grid) {
      const auto s = spectral::series_classify(r, p, c.N, 200);
      t.add({num(p), num(r), num(s.threshold), spectral::to_string(s.analytic), spectral::to_string(s.empirical),
             num(s.tail_ratio)});
      if (s.analytic != spectral::SeriesVerdict::Boundary)
        rep.add_check(check_true("verdicts agree p=" + num(p) + " r=" + num(r), s.analytic == s.empirical));
    }
    rep.set_constant("threshold p=" + num(p), spectral::threshold(p, c.N));
  }
  rep.add_table(std::move(t));
  return rep;
}

json verdict_json(const harmonic::WeakLpVerdict& v) {
  json j;
  j["p"] = v.p;
  j["family"] = harmonic::to_string(v.family);
  j["r"] = v.r;
  j["decay_rate"] = v.decay_rate;
  j["item2_finite"] = v.item2_finite;
  j["item3_finite"] = v.item3_finite;
  j["item4_all_r"] = v.item4_all_r;
  j["weakly_lp"] = v.weakly_lp;
  j["coherent"] = v.coherent;
  return j;
}

Report run_exotic(const ExperimentConfig& c) {
  Report rep("exotic-window", c.to_json());
  Table t{"exotic_window", {"layer", "p", "p_prime", "r0", "phi_parameter", "weakly_Lp_prime", "weakly_Lp"}};
  for (auto [p, pp] : c.pairs) {
    const auto w = harmonic::exotic_window_demo(p, pp, c.N);
    const std::string tag = "(" + num(p) + "," + num(pp) + ")";
    rep.set_constant("r0 " + tag, w.r0);
    rep.set_constant("window " + tag, {w.lower, w.upper});
    rep.set_verdict("orthogonal " + tag, {{"at_p_prime", verdict_json(w.at_p_prime)}, {"at_p", verdict_json(w.at_p)},
                                          {"split", w.split}});
    rep.add_check(check_true("orthogonal split " + tag, w.split));
    rep.add_check(check_true("orthogonal coherent " + tag, w.at_p.coherent && w.at_p_prime.coherent));
    t.add({"orthogonal", num(p), num(pp), num(w.r0), num(w.phi_parameter), w.at_p_prime.weakly_lp ? "true" : "false",
           w.at_p.weakly_lp ? "true" : "false"});
    const auto u = unitary::unitary_exotic_window(p, pp, c.N);
    rep.set_verdict("unitary even-word " + tag, {{"at_p_prime", verdict_json(u.at_p_prime)},
                                                 {"at_p", verdict_json(u.at_p)}, {"split", u.split}});
    rep.add_check(check_true("unitary even-word split " + tag, u.split));
    t.add({"unitary-even", num(p), num(pp), num(u.r0), num(u.phi_parameter), u.at_p_prime.weakly_lp ? "true" : "false",
           u.at_p.weakly_lp ? "true" : "false"});
  }
  rep.add_table(std::move(t));
  return rep;
}

Report run_pd_gram(const ExperimentConfig& c) {
  Report rep("pd-gram", c.to_json());
  tl::Category cat(c.params(), cat_options(c, 2 * c.max_level));
  std::mt19937_64 rng(*c.seed);
  Table t{"pd_gram", {"r", "trial", "min_eigenvalue", "spectral_norm", "pass"}};
  for (double r : c.r_grid) {
    const auto fam = algebra::central_family(algebra::CentralKind::PoissonLike, r, c.N, 2 * c.max_level);
    const BlockElement phi = algebra::to_block(cat, fam, 2 * c.max_level);
    bool all = true;
    for (int k = 0; k < c.trials; ++k) {
      std::vector<BlockElement> xs;
      for (int i = 0; i < 6; ++i) xs.push_back(algebra::random_element(cat, random_levels(rng, c.max_level), rng));
      const auto g = harmonic::pd_gram_test(cat, phi, xs, c.tolerance);
      all = all && g.pass;
      t.add({num(r), num((long long)k), num(g.min_eigenvalue), num(g.spectral_norm), g.pass ? "true" : "false"});
    }
    rep.add_check(check_true("Gram matrices PSD, r=" + num(r), all));
  }
  rep.add_table(std::move(t));
  record_cache(rep, cat);
  return rep;
}

Report run_trace(const ExperimentConfig& c) {
  Report rep("trace-iterate", c.to_json());
  const int top = std::max(c.K, c.max_level);
  tl::Category cat(c.params(), cat_options(c, top));
  const auto gs = trace::generator_sum(cat);
  rep.add_check(check_le("generator sum, left", gs.left, c.tolerance));
  rep.add_check(check_le("generator sum, right", gs.right, c.tolerance));
  const auto l1 = trace::phi_l1_check(cat, c.trials, *c.seed, std::min(3, top));
  rep.add_check(check_le("L1 ratio", l1.max_ratio, 1 + c.tolerance, Bound::Lower));
  const auto l20 = trace::phi_l20_norm(cat, c.K, *c.seed, false);
  rep.set_constant("L20 norm", {{"K", c.K}, {"value", l20.norm}, {"bound", "lower"}, {"residual", l20.residual}});
  rep.add_check(check_le("truncated L20 norm < 1", l20.norm, 1 - 1e-12, Bound::Lower));
  const double p = c.p_grid.front();
  const auto scan = harmonic::local_rd_scan(cat, 2.0, std::min(3, top / 2), 4, *c.seed);
  const double D_N = 1.25 * scan.empirical_local_constant_doubled;
  rep.set_constant("D_N", D_N);
  const auto tr = trace::iterate_to_haar(cat, algebra::matrix_unit(cat, 1, 0, 0), p, c.k_max, D_N, top);
  Table t{"iteration", {"k", "norm", "upper_bound", "support_top", "exact"}};
  for (std::size_t k = 0; k < tr.norms.size(); ++k)
    t.add({num((long long)k), num(tr.norms[k]), num(tr.upper_bounds[k]), num((long long)tr.support_top[k]),
           tr.exact[k] ? "true" : "false"});
  rep.set_constant("fitted_rate", tr.fitted_rate);
  rep.add_check(check_true("norms strictly decreasing for k >= 3", tr.strictly_decreasing_after_3));
  rep.add_table(std::move(t));
  record_cache(rep, cat);
  return rep;
}

Report run_unitary(const ExperimentConfig& c) {
  using namespace unitary;
  Report rep("unitary-scan", c.to_json());
  WordCategory cat(c.N, 2 * c.max_length);
  std::int64_t bad = 0;
  bool proj = true;
  double comp = 0;
  for (int a = 0; a <= c.max_length; ++a)
    for (const auto& g : words_of_length(a)) {
      proj = proj && validate_projection(cat, g, c.tolerance).pass;
      for (int b = 0; b <= c.max_length; ++b)
        for (const auto& h : words_of_length(b)) {
          std::int64_t s = 0;
          for (const auto& t : fusion_decompose(g, h)) s += dim_word(t.gamma, c.N);
          bad = std::max<std::int64_t>(bad, std::abs(s - dim_word(g, c.N) * dim_word(h, c.N)));
          comp = std::max(comp, word_completeness(cat, g, h).completeness);
        }
    }
  rep.add_check(check_le("dimension coherence", double(bad), 0));
  rep.add_check(check_true("projections rank-certified", proj));
  rep.add_check(check_le("word fusion completeness", comp, c.tolerance));
  Table t{"word_rd", {"q", "gamma", "g", "h", "ratio", "ratio_doubled"}};
  for (double q : c.q_grid) {
    const auto r = word_rd_scan(cat, q, c.max_length, c.trials, *c.seed);
    for (const auto& x : r.cells)
      t.add({num(q), x.gamma.empty() ? "e" : x.gamma, x.g.empty() ? "e" : x.g, x.h.empty() ? "e" : x.h, num(x.ratio),
             num(x.ratio_doubled)});
    rep.set_constant("word local constant q=" + num(q), r.empirical_local_constant_doubled);
    rep.add_check(check_true("finite word local constant q=" + num(q), std::isfinite(r.empirical_local_constant_doubled)));
  }
  rep.add_table(std::move(t));
  return rep;
}

Report run_full_suite(const ExperimentConfig& c) {
  Report rep("full-suite", c.to_json());
  std::vector<int> ids = c.criteria;
  if (ids.empty())
    for (const auto& info : acceptance::criteria()) ids.push_back(info.id);
  acceptance::Options opts;
  opts.seed = *c.seed;
  opts.cache_dir = c.cache_dir;
  std::vector<std::optional<Report>> results(ids.size());
  // Criteria run in waves of at most `jobs` workers; merge order stays fixed.
  for (std::size_t start = 0; start < ids.size(); start += static_cast<std::size_t>(c.jobs)) {
    std::vector<std::future<Report>> wave;
    const std::size_t end = std::min(ids.size(), start + static_cast<std::size_t>(c.jobs));
    for (std::size_t i = start; i < end; ++i)
      wave.push_back(std::async(c.jobs > 1 ? std::launch::async : std::launch::deferred,
                                [&, i] { return acceptance::run_criterion(ids[i], opts); }));
    for (std::size_t i = start; i < end; ++i) results[i] = wave[i - start].get();
  }
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const std::string key = "criterion-" + std::to_string(ids[i]);
    rep.merge(key, *results[i]);
    rep.set_verdict(key, results[i]->pass());
  }
  return rep;
}

}  // namespace

Report run(const ExperimentConfig& c) {
  validate(c);
  const auto t0 = std::chrono::steady_clock::now();
  Report rep = [&]() {
    const std::string& e = c.experiment;
    if (e == "dims") return run_dims(c);
    if (e == "fusion") return run_fusion(c);
    if (e == "jw-validate") return run_jw(c);
    if (e == "conv-check") return run_conv(c);
    if (e == "schatten") return run_schatten(c);
    if (e == "rd-local") return run_rd_local(c);
    if (e == "rd-global") return run_rd_global(c);
    if (e == "thresholds") return run_thresholds(c);
    if (e == "exotic-window") return run_exotic(c);
    if (e == "pd-gram") return run_pd_gram(c);
    if (e == "trace-iterate") return run_trace(c);
    if (e == "unitary-scan") return run_unitary(c);
    return run_full_suite(c);
  }();
  rep.set_runtime("seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  return rep;
}

std::string human_summary(const Report& rep) {
  std::ostringstream out;
  out << std::setprecision(6);
  auto line = [&](const report::Check& ch) {
    out << (ch.pass ? "  PASS  " : "  FAIL  ") << ch.name << ": " << ch.value << " " << ch.relation << " " << ch.limit;
    if (ch.bound != Bound::Exact) out << " [" << report::to_string(ch.bound) << "]";
    if (!ch.note.empty()) out << " (" << ch.note << ")";
    out << "\n";
  };
  out << rep.experiment() << "\n";
  for (const auto& ch : rep.checks()) line(ch);
  for (const auto& ch : rep.runtime_checks()) line(ch);
  out << (rep.pass() ? "PASS" : "FAIL") << "\n";
  return out.str();
}

}  // namespace fqg::workbench
