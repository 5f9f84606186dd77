#include "fqg/algebra.hpp"

#include "fqg/cache.hpp"
#include "fqg/linalg.hpp"
#include "fqg/spectral.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>

namespace fqg::algebra {

using linalg::kron_left_apply;
using linalg::kron_right_apply;
using linalg::second_slab;

const cmat* BlockElement::block(int n) const {
  auto it = blocks.find(n);
  return it == blocks.end() ? nullptr : &it->second;
}

void BlockElement::accumulate(int n, const cmat& m) {
  auto it = blocks.find(n);
  if (it == blocks.end()) blocks.emplace(n, m);
  else it->second += m;
}

void BlockElement::canonicalize() {
  for (auto it = blocks.begin(); it != blocks.end();) {
    if (it->second.size() == 0 || (it->second.array() == cplx(0)).all()) it = blocks.erase(it);
    else ++it;
  }
}

BlockElement operator+(const BlockElement& a, const BlockElement& b) {
  BlockElement out = a;
  for (const auto& [n, m] : b.blocks) out.accumulate(n, m);
  return out;
}

BlockElement operator-(const BlockElement& a, const BlockElement& b) { return a + cplx(-1.0) * b; }

BlockElement operator*(cplx s, const BlockElement& a) {
  BlockElement out;
  for (const auto& [n, m] : a.blocks) out.blocks.emplace(n, s * m);
  return out;
}

double max_abs_diff(const BlockElement& a, const BlockElement& b) {
  double d = 0;
  const BlockElement c = a - b;
  for (const auto& [n, m] : c.blocks) d = std::max(d, m.cwiseAbs().maxCoeff());
  return d;
}

BlockElement unit_at(tl::Category& cat, int n) {
  BlockElement x;
  x.blocks.emplace(n, cmat::Identity(cat.dim(n), cat.dim(n)));
  return x;
}

BlockElement matrix_unit(tl::Category& cat, int n, Index i, Index j) {
  BlockElement x;
  cmat m = cmat::Zero(cat.dim(n), cat.dim(n));
  m(i, j) = 1.0;
  x.blocks.emplace(n, m);
  return x;
}

BlockElement random_element(tl::Category& cat, const std::vector<int>& levels, std::mt19937_64& rng, bool hermitian) {
  BlockElement x;
  for (int n : levels) {
    cmat m = linalg::random_gaussian(cat.dim(n), cat.dim(n), rng);
    if (hermitian) m = 0.5 * (m + m.adjoint()).eval();
    x.blocks[n] = m;
  }
  return x;
}

cplx haar(tl::Category& cat, const BlockElement& x) {
  cplx s = 0;
  for (const auto& [n, m] : x.blocks) s += double(cat.dim(n)) * m.trace();
  return s;
}

double lq_norm(tl::Category& cat, const BlockElement& x, double q) {
  if (std::isinf(q)) {
    double m = 0;
    for (const auto& [n, b] : x.blocks) m = std::max(m, linalg::schatten_norm(b, q));
    return m;
  }
  // Scale-stable accumulation: sum_n d_n ||x_n||_{S_q}^q.
  std::vector<std::pair<double, double>> terms;
  double top = 0;
  for (const auto& [n, b] : x.blocks) {
    const double s = linalg::schatten_norm(b, q);
    terms.emplace_back(double(cat.dim(n)), s);
    top = std::max(top, s);
  }
  if (top == 0) return 0;
  double acc = 0;
  for (auto [d, s] : terms) acc += d * std::pow(s / top, q);
  return top * std::pow(acc, 1.0 / q);
}

cplx inner(tl::Category& cat, const BlockElement& x, const BlockElement& y) {
  cplx s = 0;
  for (const auto& [n, a] : x.blocks)
    if (const cmat* b = y.block(n)) s += double(cat.dim(n)) * (a.adjoint() * *b).trace();
  return s;
}

BlockElement adjoint(const BlockElement& x) {
  BlockElement out;
  for (const auto& [n, m] : x.blocks) out.blocks.emplace(n, m.adjoint());
  return out;
}

BlockElement product(const BlockElement& x, const BlockElement& y) {
  BlockElement out;
  for (const auto& [n, a] : x.blocks)
    if (const cmat* b = y.block(n)) out.blocks.emplace(n, a * *b);
  out.canonicalize();
  return out;
}

cmat convolve_block(tl::Category& cat, const cmat& x, int n, const cmat& y, int k, int l) {
  const cmat& V = cat.fusion(l, n, k);
  const Index dn = cat.dim(n), dk = cat.dim(k), dl = cat.dim(l);
  const cmat T = kron_left_apply(x, dk, kron_right_apply(dn, y, V));
  return (double(dn) * double(dk) / double(dl)) * (V.adjoint() * T);
}

BlockElement convolve(tl::Category& cat, const BlockElement& x, const BlockElement& y) {
  BlockElement out;
  for (const auto& [n, xn] : x.blocks)
    for (const auto& [k, yk] : y.blocks) {
      if (n + k > cat.max_level()) throw LevelOverflow(n + k, cat.max_level());
      for (int l : spectral::fusion_range(n, k)) out.accumulate(l, convolve_block(cat, xn, n, yk, k, l));
    }
  out.canonicalize();
  return out;
}

BlockElement convolve_left_adjoint(tl::Category& cat, const BlockElement& x, const BlockElement& z, int max_out) {
  // (M* z)_k = d_n sum_l Tr_1[(x* (x) 1) V z_l V*].
  BlockElement out;
  for (const auto& [n, xn] : x.blocks)
    for (const auto& [l, zl] : z.blocks)
      for (int k = std::abs(l - n); k <= std::min(l + n, max_out); k += 2) {
        const cmat& V = cat.fusion(l, n, k);
        const Index dk = cat.dim(k);
        const cmat C = kron_left_apply(xn.adjoint(), dk, V * zl);
        cmat acc = cmat::Zero(dk, dk);
        for (Index a = 0; a < cat.dim(n); ++a)
          acc.noalias() += C.middleRows(a * dk, dk) * V.middleRows(a * dk, dk).adjoint();
        out.accumulate(k, double(cat.dim(n)) * acc);
      }
  out.canonicalize();
  return out;
}

namespace {

Index ipow(Index b, int e) {
  Index r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

}  // namespace

cplx convolve_oracle_pairing(tl::Category& cat, const BlockElement& x, const BlockElement& y, const BlockElement& a) {
  const int N = cat.N();
  cplx total = 0;
  for (const auto& [n, xn] : x.blocks)
    for (const auto& [k, yk] : y.blocks)
      for (int l : spectral::fusion_range(n, k)) {
        const cmat* al = a.block(l);
        if (!al) continue;
        const int r = (n + k - l) / 2;
        const cmat& Bl = cat.ambient_basis(l);
        const cvec T = cat.nested_cups(r);
        const Index left = ipow(N, n - r), right = ipow(N, k - r), mid = T.size();
        cmat W = cmat::Zero(left * mid * right, Bl.cols());
        for (Index I = 0; I < left; ++I)
          for (Index m = 0; m < mid; ++m)
            for (Index K = 0; K < right; ++K) W.row((I * mid + m) * right + K) = T(m) * Bl.row(I * right + K);
        const Index An = ipow(N, n), Ak = ipow(N, k);
        W = kron_left_apply(cat.jw_projection(n), Ak, kron_right_apply(An, cat.jw_projection(k), W));
        W /= std::sqrt((W.adjoint() * W).trace().real() / double(Bl.cols()));
        const cmat& Bn = cat.ambient_basis(n);
        const cmat& Bk = cat.ambient_basis(k);
        const cmat xt = Bn * xn * Bn.adjoint();
        const cmat yt = Bk * yk * Bk.adjoint();
        const cmat XW = kron_left_apply(xt, Ak, kron_right_apply(An, yt, W));
        total += double(cat.dim(n)) * double(cat.dim(k)) * ((*al) * (W.adjoint() * XW)).trace();
      }
  return total;
}

BlockElement antipode(tl::Category& cat, const BlockElement& x) {
  BlockElement out;
  for (const auto& [n, m] : x.blocks) {
    const cmat& J = cat.conjugation(n);
    out.blocks.emplace(n, J * m.transpose() * J.adjoint());
  }
  return out;
}

BlockElement sharp(tl::Category& cat, const BlockElement& x) { return antipode(cat, adjoint(x)); }

std::string to_string(CentralKind k) {
  switch (k) {
    case CentralKind::PoissonLike: return "phi_r";
    case CentralKind::Semigroup: return "r^l";
    case CentralKind::LengthWeight: return "(1+l)^(-1-2/p)";
  }
  return "?";
}

CentralElement central_family(CentralKind kind, double parameter, int N, int n_max, double t0) {
  if (n_max < 1) throw Error("central_family needs n_max >= 1");
  CentralElement c;
  c.kind = kind;
  c.parameter = parameter;
  c.profile.resize(n_max + 1);
  if (kind != CentralKind::LengthWeight && !(parameter > 0 && parameter < 1))
    throw Error("central_family needs 0 < r < 1");
  for (int n = 0; n <= n_max; ++n) {
    switch (kind) {
      case CentralKind::PoissonLike: c.profile[n] = spectral::chebyshev_ratio(n, parameter, N); break;
      case CentralKind::Semigroup: c.profile[n] = std::pow(parameter, n); break;
      case CentralKind::LengthWeight: c.profile[n] = std::pow(1.0 + n, -1.0 - 2.0 / parameter); break;
    }
  }
  if (kind == CentralKind::PoissonLike && parameter * N >= t0) {
    c.band_checked = true;
    c.band_c1 = std::numeric_limits<double>::infinity();
    c.band_c2 = 0;
    for (int n = 0; n <= n_max; ++n) {
      const double q = c.profile[n] / std::pow(parameter, n);
      c.band_c1 = std::min(c.band_c1, q);
      c.band_c2 = std::max(c.band_c2, q);
    }
  }
  return c;
}

BlockElement to_block(tl::Category& cat, const CentralElement& c, int n_max) {
  BlockElement x;
  for (int n = 0; n <= n_max && n < static_cast<int>(c.profile.size()); ++n)
    if (c.profile[n] != 0) x.blocks.emplace(n, c.profile[n] * cmat::Identity(cat.dim(n), cat.dim(n)));
  return x;
}

BlockElement regular_coefficient(tl::Category& cat, const BlockElement& x, const BlockElement& y) {
  BlockElement out;
  for (const auto& [l, yl] : y.blocks)
    for (const auto& [k, xk] : x.blocks)
      for (int n : spectral::fusion_range(l, k)) {
        const cmat& V = cat.fusion(l, n, k);
        const Index dk = cat.dim(k);
        const cmat VY = V * yl.adjoint();
        const cmat Vt = kron_right_apply(cat.dim(n), xk.adjoint(), V);
        cmat acc = cmat::Zero(cat.dim(n), cat.dim(n));
        for (Index j = 0; j < dk; ++j) acc.noalias() += second_slab(VY, dk, j) * second_slab(Vt, dk, j).adjoint();
        out.accumulate(n, double(dk) * acc);
      }
  out.canonicalize();
  return out;
}

TruncatedRep truncated_regular_rep(tl::Category& cat, const BlockElement& x, int K) {
  TruncatedRep rep;
  rep.K = K;
  rep.n0 = std::max(0, x.top_level());
  if (K + rep.n0 > cat.max_level()) throw LevelOverflow(K + rep.n0, cat.max_level());
  rep.offsets.assign(K + 2, 0);
  for (int k = 0; k <= K; ++k) rep.offsets[k + 1] = rep.offsets[k] + cat.dim(k) * cat.dim(k);
  rep.matrix = cmat::Zero(rep.offsets[K + 1], rep.offsets[K + 1]);
  for (const auto& [n, xn] : x.blocks)
    for (int k = 0; k <= K; ++k)
      for (int l : spectral::fusion_range(n, k)) {
        if (l > K) continue;
        const cmat& V = cat.fusion(l, n, k);
        const Index dn = cat.dim(n), dk = cat.dim(k), dl = cat.dim(l);
        const cmat XV = kron_left_apply(xn, dk, V);
        const double c = double(dn) * double(dk) / double(dl) * std::sqrt(double(dl) / double(dk));
        for (Index j = 0; j < dk; ++j) {
          const auto XVj = second_slab(XV, dk, j);
          for (Index i = 0; i < dk; ++i) {
            const cmat blk = c * (second_slab(V, dk, i).adjoint() * XVj);
            const Index col = rep.offsets[k] + i + j * dk;
            rep.matrix.col(col).segment(rep.offsets[l], dl * dl) += Eigen::Map<const cvec>(blk.data(), dl * dl);
          }
        }
      }
  return rep;
}

void save_element(const std::filesystem::path& dir, const std::string& name, const tl::Category& cat,
                  const BlockElement& x) {
  std::filesystem::create_directories(dir);
  nlohmann::json manifest;
  manifest["N"] = cat.N();
  manifest["F_hash"] = cat.params().hash_hex();
  manifest["levels"] = nlohmann::json::array();
  for (const auto& [n, m] : x.blocks) {
    const std::string file = name + "_level" + std::to_string(n) + ".fqgc";
    CacheHeader h;
    h.N = static_cast<std::uint32_t>(cat.N());
    h.fhash = cat.params().hash();
    h.kind = ObjectKind::Element;
    h.levels = {std::uint32_t(n), 0, 0};
    const auto bytes = encode_matrix(h, m);
    std::ofstream out(dir / file, std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    manifest["levels"].push_back({{"n", n}, {"rows", m.rows()}, {"data_file", file}});
  }
  std::ofstream(dir / (name + ".json")) << manifest.dump(2) << "\n";
}

BlockElement load_element(const std::filesystem::path& dir, const std::string& name, const tl::Category& cat) {
  std::ifstream in(dir / (name + ".json"));
  if (!in) throw Error("load_element: missing manifest " + (dir / (name + ".json")).string());
  const auto manifest = nlohmann::json::parse(in);
  if (manifest.at("N").get<int>() != cat.N() || manifest.at("F_hash").get<std::string>() != cat.params().hash_hex())
    throw Error("load_element: manifest belongs to a different (N, F)");
  BlockElement x;
  for (const auto& lv : manifest.at("levels")) {
    const auto file = dir / lv.at("data_file").get<std::string>();
    std::ifstream f(file, std::ios::binary);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    auto decoded = decode_matrix(bytes);
    if (!decoded) throw Error("load_element: corrupt block file " + file.string());
    x.blocks.emplace(lv.at("n").get<int>(), std::move(decoded->second));
  }
  return x;
}

}  // namespace fqg::algebra
