#pragma once

#include "fqg/intertwiners.hpp"
#include "fqg/types.hpp"

#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace fqg::algebra {

// Finitely supported element of C_c(FO_F): level -> d_n x d_n block in B_n coordinates.
struct BlockElement {
  std::map<int, cmat> blocks;

  bool empty() const { return blocks.empty(); }
  // n(x): highest supported level, -1 for the zero element.
  int top_level() const { return blocks.empty() ? -1 : blocks.rbegin()->first; }
  const cmat* block(int n) const;
  void accumulate(int n, const cmat& m);
  // Drops blocks whose entries are all exactly zero.
  void canonicalize();
};

BlockElement operator+(const BlockElement& a, const BlockElement& b);
BlockElement operator-(const BlockElement& a, const BlockElement& b);
BlockElement operator*(cplx s, const BlockElement& a);
double max_abs_diff(const BlockElement& a, const BlockElement& b);

BlockElement unit_at(tl::Category& cat, int n);
BlockElement matrix_unit(tl::Category& cat, int n, Index i, Index j);
BlockElement random_element(tl::Category& cat, const std::vector<int>& levels, std::mt19937_64& rng,
                            bool hermitian = false);

cplx haar(tl::Category& cat, const BlockElement& x);
double lq_norm(tl::Category& cat, const BlockElement& x, double q);
// L_2 inner product h(x* y).
cplx inner(tl::Category& cat, const BlockElement& x, const BlockElement& y);
BlockElement adjoint(const BlockElement& x);
BlockElement product(const BlockElement& x, const BlockElement& y);

// p_l(x_n * y_k) = (d_n d_k / d_l) V* (x (x) y) V.
cmat convolve_block(tl::Category& cat, const cmat& x, int n, const cmat& y, int k, int l);
BlockElement convolve(tl::Category& cat, const BlockElement& x, const BlockElement& y);
// Adjoint of y -> x * y for the L_2 inner product, restricted to output levels <= max_out.
BlockElement convolve_left_adjoint(tl::Category& cat, const BlockElement& x, const BlockElement& z, int max_out);
// <omega_x * omega_y, a> through the ambient coproduct formula (independent of the fusion recursion).
cplx convolve_oracle_pairing(tl::Category& cat, const BlockElement& x, const BlockElement& y, const BlockElement& a);

BlockElement antipode(tl::Category& cat, const BlockElement& x);
BlockElement sharp(tl::Category& cat, const BlockElement& x);

enum class CentralKind { PoissonLike, Semigroup, LengthWeight };
std::string to_string(CentralKind k);

struct CentralElement {
  CentralKind kind = CentralKind::Semigroup;
  double parameter = 0;         // r, or p for LengthWeight
  std::vector<double> profile;  // c_n, n = 0..n_max
  // PoissonLike only: empirical band C1 r^n <= c_n <= C2 r^n over the profile.
  bool band_checked = false;
  double band_c1 = 0, band_c2 = 0;
};

CentralElement central_family(CentralKind kind, double parameter, int N, int n_max, double t0 = 2.5);
BlockElement to_block(tl::Category& cat, const CentralElement& c, int n_max);

// (iota (x) h)(Delta(y*)(1 (x) x)), computed blockwise.
BlockElement regular_coefficient(tl::Category& cat, const BlockElement& x, const BlockElement& y);

// Matrix of y -> x * y on the levels <= K, in L_2-orthonormal coordinates
// (block k, entry (a, b) at offset(k) + a + b d_k carries weight sqrt(d_k)).
struct TruncatedRep {
  cmat matrix;
  std::vector<Index> offsets;  // offsets[k] for k = 0..K, offsets[K+1] = total
  int K = 0;
  int n0 = 0;
};
TruncatedRep truncated_regular_rep(tl::Category& cat, const BlockElement& x, int K);

void save_element(const std::filesystem::path& dir, const std::string& name, const tl::Category& cat,
                  const BlockElement& x);
BlockElement load_element(const std::filesystem::path& dir, const std::string& name, const tl::Category& cat);

}  // namespace fqg::algebra
