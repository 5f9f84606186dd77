#include "fqg/cache.hpp"
#include "fqg/intertwiners.hpp"
#include "fqg/params.hpp"
#include "fqg/spectral.hpp"

#include <doctest.h>

#include <filesystem>
#include <cstring>
#include <fstream>

#include <unistd.h>

using namespace fqg;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("fqg-test-" + name + "-" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("parameter families") {
  CHECK(QGParams::identity(3).epsilon == 1);
  CHECK(QGParams::symplectic(4).epsilon == -1);
  CHECK(QGParams::twisted(3).epsilon == 1);
  CHECK_FALSE(QGParams::twisted(3).is_real());
  CHECK_THROWS(QGParams::symplectic(3));
  cmat bad = cmat::Identity(3, 3);
  bad(0, 1) = 0.5;
  CHECK_THROWS(QGParams::from_matrix(bad));
  CHECK(QGParams::identity(3).hash_hex() != QGParams::twisted(3).hash_hex());
  CHECK(QGParams::identity(3).hash_hex() == QGParams::identity(3).hash_hex());
}

TEST_CASE("F from a file") {
  const fs::path dir = scratch_dir("fparams");
  {
    std::ofstream f(dir / "F.txt");
    f << "4\n0 0 1 0 0 0 0 0\n-1 0 0 0 0 0 0 0\n0 0 0 0 0 0 1 0\n0 0 0 0 -1 0 0 0\n";
  }
  const QGParams p = QGParams::from_file((dir / "F.txt").string());
  CHECK(p.N == 4);
  CHECK(p.epsilon == -1);
  {
    std::ofstream f(dir / "short.txt");
    f << "3\n1 0 0 0 0 0\n";
  }
  CHECK_THROWS(QGParams::from_file((dir / "short.txt").string()));
  fs::remove_all(dir);
}

TEST_CASE("invariant vector and zig-zag") {
  tl::Category cat(QGParams::identity(3), {.max_level = 4});
  const cvec& t = cat.invariant_vector();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(std::abs(t(i * 3 + j) - (i == j ? 1 / std::sqrt(3.0) : 0.0)) < 1e-15);
  CHECK(std::abs(cat.zigzag_value() - cplx(1.0 / 3.0)) < 1e-15);
  tl::Category sp(QGParams::symplectic(4), {.max_level = 3});
  CHECK(std::abs(sp.zigzag_value() - cplx(-0.25)) < 1e-15);
}

TEST_CASE("Jones-Wenzl projections") {
  for (const auto& P : {QGParams::identity(3), QGParams::twisted(3), QGParams::symplectic(4)}) {
    tl::Category cat(P, {.max_level = 4});
    for (int n = 1; n <= 4; ++n) {
      const auto r = tl::validate_jw(cat, n);
      CHECK(r.pass);
      CHECK(r.rank == spectral::chebyshev_dim(n, P.N));
    }
  }
  tl::Category cat(QGParams::identity(3), {.max_level = 2});
  const cvec& t = cat.invariant_vector();
  const cmat expect = cmat::Identity(9, 9) - t * t.adjoint();
  CHECK((cat.jw_projection(2) - expect).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("fusion isometries") {
  for (const auto& P : {QGParams::identity(3), QGParams::twisted(3), QGParams::symplectic(4)}) {
    tl::Category cat(P, {.max_level = 6});
    for (int n = 0; n <= 3; ++n)
      for (int k = 0; k <= 3; ++k) {
        const auto c = tl::fusion_completeness(cat, n, k);
        CHECK(c.completeness < 1e-10);
        CHECK(c.isometry < 1e-10);
      }
    for (auto [l, n, k] : {std::tuple{3, 2, 1}, std::tuple{1, 2, 1}, std::tuple{2, 2, 2}, std::tuple{0, 2, 2}})
      CHECK(tl::conjugation_consistency(cat, l, n, k) == doctest::Approx(1.0).epsilon(1e-6));
  }
  tl::Category cat(QGParams::identity(3), {.max_level = 3});
  const cmat& V = cat.fusion(0, 1, 1);
  const cvec& t = cat.invariant_vector();
  CHECK(std::abs(std::abs(V.col(0).dot(t)) - 1.0) < 1e-12);
  CHECK_THROWS_AS(cat.fusion(5, 2, 3), LevelOverflow);
  CHECK_THROWS(cat.fusion(2, 2, 1));
}

TEST_CASE("conjugation maps") {
  tl::Category cat(QGParams::identity(3), {.max_level = 4});
  CHECK((cat.conjugation(1) - cmat::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-14);
  const cmat& J2 = cat.conjugation(2);
  CHECK(J2.imag().cwiseAbs().maxCoeff() < 1e-12);
  CHECK((J2 * J2 - cmat::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-10);
  for (int n = 1; n <= 3; ++n) {
    const auto r = tl::validate_conjugation(cat, n, true);
    CHECK(r.unitarity < 1e-10);
    CHECK(r.sign < 1e-10);
    CHECK(r.ambient_overlap == doctest::Approx(1.0).epsilon(1e-8));
  }
  tl::Category sp(QGParams::symplectic(4), {.max_level = 3});
  const cmat& J1 = sp.conjugation(1);
  CHECK((J1 * J1.conjugate() + cmat::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("matrix cache round trip, version check and purge") {
  const fs::path root = scratch_dir("cache");
  const QGParams P = QGParams::identity(3);
  cmat first;
  {
    tl::Category cat(P, {.max_level = 4, .cache_dir = root});
    first = cat.jw_projection(4);
    cat.fusion(2, 3, 1);
    CHECK(cat.cache()->misses() > 0);
  }
  {
    tl::Category cat(P, {.max_level = 4, .cache_dir = root});
    const cmat again = cat.jw_projection(4);
    CHECK(cat.cache()->hits() > 0);
    CHECK(again.size() == first.size());
    CHECK(std::memcmp(again.data(), first.data(), sizeof(cplx) * first.size()) == 0);
  }
  for (const auto& v : cache_admin::verify(root)) CHECK(v.ok);
  const auto entries = cache_admin::list(root);
  REQUIRE_FALSE(entries.empty());

  // Stale version header reads as a miss.
  CacheHeader h;
  h.version = kCacheFormatVersion + 1;
  h.N = 3;
  h.rows = h.cols = 1;
  CHECK_FALSE(decode_matrix(encode_matrix(h, cmat::Identity(1, 1))).has_value());

  // Corruption is flagged.
  {
    std::fstream f(entries.front().path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(-3, std::ios::end);
    f.put('\x7f');
  }
  bool flagged = false;
  for (const auto& v : cache_admin::verify(root)) flagged = flagged || !v.ok;
  CHECK(flagged);

  // Purge is scoped to one family.
  { tl::Category other(QGParams::twisted(3), {.max_level = 2, .cache_dir = root}); other.fusion(0, 1, 1); }
  const auto removed = cache_admin::purge(root, P.hash_hex());
  CHECK(removed > 0);
  for (const auto& e : cache_admin::list(root)) CHECK(e.fhash == QGParams::twisted(3).hash_hex());
  CHECK_FALSE(cache_admin::list(root).empty());
  fs::remove_all(root);
}
