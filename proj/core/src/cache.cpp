#include "fqg/cache.hpp"

#include <openssl/sha.h>
#include <unistd.h>

#include <algorithm>
#include <cstring>
#include <fstream>
#include <sstream>

namespace fqg {

namespace fs = std::filesystem;

namespace {

constexpr char kMagic[4] = {'F', 'Q', 'G', 'C'};
constexpr std::size_t kHeaderBytes = 4 + 4 + 4 + 32 + 1 + 12 + 4 + 4;

void put_u32(std::vector<unsigned char>& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

void put_f64(std::vector<unsigned char>& b, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  for (int i = 0; i < 8; ++i) b.push_back(static_cast<unsigned char>(bits >> (8 * i)));
}

std::uint32_t get_u32(const unsigned char* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t(p[i]) << (8 * i);
  return v;
}

double get_f64(const unsigned char* p) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= std::uint64_t(p[i]) << (8 * i);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

std::optional<std::vector<unsigned char>> read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return buf;
}

void write_atomic(const fs::path& p, const std::vector<unsigned char>& bytes) {
  fs::create_directories(p.parent_path());
  const fs::path tmp = p.string() + ".tmp." + std::to_string(::getpid()) + "." +
                       std::to_string(reinterpret_cast<std::uintptr_t>(&bytes));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cache: cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("cache: short write to " + tmp.string());
  }
  fs::rename(tmp, p);
}

std::string hex(const unsigned char* p, std::size_t n) {
  static const char* h = "0123456789abcdef";
  std::string s;
  for (std::size_t i = 0; i < n; ++i) {
    s += h[p[i] >> 4];
    s += h[p[i] & 15];
  }
  return s;
}

}  // namespace

std::string to_string(ObjectKind k) {
  switch (k) {
    case ObjectKind::JonesWenzl: return "jw";
    case ObjectKind::BasisStep: return "basis";
    case ObjectKind::Fusion: return "fusion";
    case ObjectKind::Conjugation: return "conj";
    case ObjectKind::Element: return "element";
  }
  return "unknown";
}

std::vector<unsigned char> encode_matrix(const CacheHeader& h, const cmat& m) {
  std::vector<unsigned char> b;
  b.reserve(kHeaderBytes + 16 * std::size_t(m.size()));
  b.insert(b.end(), kMagic, kMagic + 4);
  put_u32(b, h.version);
  put_u32(b, h.N);
  b.insert(b.end(), h.fhash.begin(), h.fhash.end());
  b.push_back(static_cast<unsigned char>(h.kind));
  for (auto l : h.levels) put_u32(b, l);
  put_u32(b, static_cast<std::uint32_t>(m.rows()));
  put_u32(b, static_cast<std::uint32_t>(m.cols()));
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i) {
      put_f64(b, m(i, j).real());
      put_f64(b, m(i, j).imag());
    }
  return b;
}

namespace {

std::optional<CacheHeader> decode_header(const std::vector<unsigned char>& bytes) {
  if (bytes.size() < kHeaderBytes || std::memcmp(bytes.data(), kMagic, 4) != 0) return std::nullopt;
  const unsigned char* p = bytes.data() + 4;
  CacheHeader h;
  h.version = get_u32(p);
  p += 4;
  h.N = get_u32(p);
  p += 4;
  std::memcpy(h.fhash.data(), p, 32);
  p += 32;
  h.kind = static_cast<ObjectKind>(*p++);
  for (auto& l : h.levels) {
    l = get_u32(p);
    p += 4;
  }
  h.rows = get_u32(p);
  p += 4;
  h.cols = get_u32(p);
  return h;
}

}  // namespace

std::optional<std::pair<CacheHeader, cmat>> decode_matrix(const std::vector<unsigned char>& bytes) {
  auto h = decode_header(bytes);
  if (!h || h->version != kCacheFormatVersion) return std::nullopt;
  const std::size_t n = std::size_t(h->rows) * h->cols;
  if (bytes.size() != kHeaderBytes + 16 * n) return std::nullopt;
  cmat m(h->rows, h->cols);
  const unsigned char* p = bytes.data() + kHeaderBytes;
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i, p += 16) m(i, j) = cplx(get_f64(p), get_f64(p + 8));
  return std::make_pair(*h, std::move(m));
}

MatrixCache::MatrixCache(fs::path root, const QGParams& params)
    : root_(std::move(root)), N_(params.N), fhash_(params.hash()) {
  dir_ = root_ / params.hash_hex();
}

fs::path MatrixCache::path_for(const CacheKey& key) const {
  std::ostringstream name;
  name << "N" << N_ << "_" << to_string(key.kind) << "_" << key.levels[0] << "_" << key.levels[1] << "_"
       << key.levels[2] << ".fqgc";
  return dir_ / name.str();
}

std::optional<cmat> MatrixCache::get(const CacheKey& key) const {
  const auto bytes = read_file(path_for(key));
  if (!bytes) {
    ++misses_;
    return std::nullopt;
  }
  auto decoded = decode_matrix(*bytes);
  if (!decoded || decoded->first.N != std::uint32_t(N_) || decoded->first.fhash != fhash_ ||
      decoded->first.kind != key.kind || decoded->first.levels != key.levels) {
    ++misses_;
    return std::nullopt;
  }
  ++hits_;
  return std::move(decoded->second);
}

void MatrixCache::put(const CacheKey& key, const cmat& m) const {
  CacheHeader h;
  h.N = static_cast<std::uint32_t>(N_);
  h.fhash = fhash_;
  h.kind = key.kind;
  h.levels = key.levels;
  const auto bytes = encode_matrix(h, m);
  const fs::path p = path_for(key);
  write_atomic(p, bytes);
  const std::string digest = cache_admin::sha256_hex(bytes) + "\n";
  write_atomic(p.string() + ".sha256", std::vector<unsigned char>(digest.begin(), digest.end()));
}

namespace cache_admin {

std::string sha256_hex(const std::vector<unsigned char>& bytes) {
  unsigned char d[32];
  SHA256(bytes.data(), bytes.size(), d);
  return hex(d, 32);
}

std::vector<CacheEntry> list(const fs::path& root) {
  std::vector<CacheEntry> out;
  if (!fs::exists(root)) return out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file() || e.path().extension() != ".fqgc") continue;
    CacheEntry c;
    c.path = e.path();
    c.fhash = e.path().parent_path().filename().string();
    c.bytes = e.file_size();
    std::ifstream in(e.path(), std::ios::binary);
    std::vector<unsigned char> head(kHeaderBytes);
    in.read(reinterpret_cast<char*>(head.data()), static_cast<std::streamsize>(head.size()));
    if (in.gcount() == static_cast<std::streamsize>(kHeaderBytes)) {
      if (auto h = decode_header(head)) {
        c.header_ok = h->version == kCacheFormatVersion;
        c.N = h->N;
        c.kind = h->kind;
        c.levels = h->levels;
        c.rows = h->rows;
        c.cols = h->cols;
      }
    }
    out.push_back(c);
  }
  std::sort(out.begin(), out.end(), [](const CacheEntry& a, const CacheEntry& b) { return a.path < b.path; });
  return out;
}

std::vector<VerifyResult> verify(const fs::path& root) {
  std::vector<VerifyResult> out;
  for (const auto& c : list(root)) {
    VerifyResult v{c.path, false, ""};
    const auto bytes = read_file(c.path);
    const auto side = read_file(c.path.string() + ".sha256");
    if (!bytes) v.problem = "unreadable";
    else if (!decode_matrix(*bytes)) v.problem = "bad header or truncated payload";
    else if (!side) v.problem = "missing checksum sidecar";
    else {
      std::string want(side->begin(), side->end());
      while (!want.empty() && (want.back() == '\n' || want.back() == ' ')) want.pop_back();
      if (want != sha256_hex(*bytes)) v.problem = "checksum mismatch";
      else v.ok = true;
    }
    out.push_back(v);
  }
  return out;
}

std::uintmax_t purge(const fs::path& root, const std::string& fhash_hex) {
  if (fhash_hex.empty() || fhash_hex.find('/') != std::string::npos || fhash_hex.find("..") != std::string::npos)
    throw Error("purge: invalid F-hash '" + fhash_hex + "'");
  const fs::path dir = root / fhash_hex;
  if (!fs::exists(dir)) return 0;
  std::uintmax_t files = 0;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) ++files;
  fs::remove_all(dir);
  return files;
}

}  // namespace cache_admin

}  // namespace fqg
