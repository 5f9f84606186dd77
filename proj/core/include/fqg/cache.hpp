#pragma once

#include "fqg/params.hpp"
#include "fqg/types.hpp"

#include <array>
#include <atomic>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace fqg {

enum class ObjectKind : std::uint8_t {
  JonesWenzl = 1,
  BasisStep = 2,
  Fusion = 3,
  Conjugation = 4,
  Element = 5,
};

std::string to_string(ObjectKind k);

struct CacheKey {
  ObjectKind kind;
  std::array<std::uint32_t, 3> levels{0, 0, 0};
};

inline constexpr std::uint32_t kCacheFormatVersion = 1;

struct CacheHeader {
  std::uint32_t version = kCacheFormatVersion;
  std::uint32_t N = 0;
  std::array<unsigned char, 32> fhash{};
  ObjectKind kind = ObjectKind::Fusion;
  std::array<std::uint32_t, 3> levels{0, 0, 0};
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
};

// Raw encode/decode of the on-disk format (header + column-major LE (re, im) f64 pairs).
std::vector<unsigned char> encode_matrix(const CacheHeader& h, const cmat& m);
// Returns nullopt on bad magic, short data or version mismatch.
std::optional<std::pair<CacheHeader, cmat>> decode_matrix(const std::vector<unsigned char>& bytes);

// Content-addressed store for one (N, F) family under <root>/<fhash_hex>/.
// Reads are lock-free; writes go through a temp file and an atomic rename.
class MatrixCache {
 public:
  MatrixCache(std::filesystem::path root, const QGParams& params);

  std::optional<cmat> get(const CacheKey& key) const;
  void put(const CacheKey& key, const cmat& m) const;
  std::filesystem::path path_for(const CacheKey& key) const;
  const std::filesystem::path& family_dir() const { return dir_; }

  std::uint64_t hits() const { return hits_; }
  std::uint64_t misses() const { return misses_; }

 private:
  std::filesystem::path root_;
  std::filesystem::path dir_;
  int N_;
  std::array<unsigned char, 32> fhash_;
  mutable std::atomic<std::uint64_t> hits_{0};
  mutable std::atomic<std::uint64_t> misses_{0};
};

struct CacheEntry {
  std::filesystem::path path;
  std::string fhash;
  std::uint32_t N = 0;
  ObjectKind kind = ObjectKind::Fusion;
  std::array<std::uint32_t, 3> levels{};
  std::uint32_t rows = 0, cols = 0;
  std::uintmax_t bytes = 0;
  bool header_ok = false;
};

struct VerifyResult {
  std::filesystem::path path;
  bool ok = false;
  std::string problem;
};

namespace cache_admin {
std::vector<CacheEntry> list(const std::filesystem::path& root);
std::vector<VerifyResult> verify(const std::filesystem::path& root);
// Removes one F-hash family; returns the number of files removed.
std::uintmax_t purge(const std::filesystem::path& root, const std::string& fhash_hex);
std::string sha256_hex(const std::vector<unsigned char>& bytes);
}  // namespace cache_admin

}  // namespace fqg
