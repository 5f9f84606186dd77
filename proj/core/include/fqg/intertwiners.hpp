#pragma once

#include "fqg/cache.hpp"
#include "fqg/params.hpp"
#include "fqg/types.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <tuple>
#include <vector>

namespace fqg::tl {

struct CategoryOptions {
  int max_level = 7;
  std::optional<std::filesystem::path> cache_dir;
  // Fusion isometries with d_l above this are normalized by a scalar instead
  // of a full polar decomposition.
  Index polar_max_dim = 1000;
  // Eigen-projection cleanup of ambient JW projections up to this size.
  Index jw_cleanup_max_dim = 729;
};

// Representation-category data of O_F^+ in concrete coordinates.
//
// Coordinates on H_n come from the recursive splitting H_{n-1} (x) H_1 = H_n (+) H_{n-2}:
// U_n is an isometry H_n -> H_{n-1} (x) H_1 and B_n = (B_{n-1} (x) I) U_n embeds H_n
// into H_1^{(x)n}. Fusion isometries are built from the U's alone; the ambient
// Jones-Wenzl projections are an independent route used for validation.
class Category {
 public:
  explicit Category(QGParams params, CategoryOptions opts = {});

  const QGParams& params() const { return params_; }
  int N() const { return params_.N; }
  int epsilon() const { return params_.epsilon; }
  int max_level() const { return opts_.max_level; }
  Index dim(int n) const;
  void require_level(int n) const;

  // t_F = N^{-1/2} sum_i e_i (x) F e_i.
  const cvec& invariant_vector() const { return t_; }
  // c with (t* (x) id)(id (x) t) = c id.
  cplx zigzag_value() const;

  const cmat& basis_step(int n);
  const cmat& fusion(int l, int n, int k);
  const cmat& conjugation(int n);

  const cmat& jw_projection(int n);
  const cmat& ambient_basis(int n);
  // B_n* R F^{(x)n} conj(B_n), R the strand reversal.
  cmat ambient_conjugation(int n);
  // id^{(x)pos} (x) t (x) id^{(x)(n-2-pos)} : (C^N)^{(x)(n-2)} -> (C^N)^{(x)n}.
  cmat cup_insertion(int n, int pos) const;
  // r nested copies of t, a vector in (C^N)^{(x)2r}.
  cvec nested_cups(int r) const;

  const MatrixCache* cache() const { return cache_.get(); }

 private:
  cmat compute_basis_step(int n);
  cmat compute_fusion(int l, int n, int k);
  cmat compute_jw(int n);
  cmat normalize_isometry(cmat Z, int l) const;
  template <class F>
  const cmat& memo(std::map<std::tuple<int, int, int>, cmat>& store, ObjectKind kind, int a, int b, int c, F&& make);

  QGParams params_;
  CategoryOptions opts_;
  cvec t_;
  std::vector<Index> dims_;
  std::unique_ptr<MatrixCache> cache_;
  std::recursive_mutex mu_;
  std::map<std::tuple<int, int, int>, cmat> basis_, fusion_, conj_, jw_, ambient_;
};

struct JWReport {
  int n = 0;
  Index ambient_dim = 0;
  double hermitian = 0;
  double idempotency = 0;
  Index rank = 0;
  Index expected_rank = 0;
  bool rank_by_eigencount = false;
  double cup_annihilation = 0;
  double basis_orthonormality = 0;
  double basis_projection = 0;
  bool pass = false;
};
JWReport validate_jw(Category& cat, int n, double tol = 1e-9);

struct CompletenessReport {
  int n = 0, k = 0;
  double completeness = 0;  // max-abs of sum_l V V* - I
  double isometry = 0;      // max over l of max-abs of V*V - I
};
CompletenessReport fusion_completeness(Category& cat, int n, int k);

struct ConjugationReport {
  int n = 0;
  double unitarity = 0;
  double sign = 0;            // max-abs of J conj(J) - eps^n I
  double ambient_overlap = 0;  // |<J, J_amb>| / d_n, 1 up to phase
};
ConjugationReport validate_conjugation(Category& cat, int n, bool with_ambient);

// |<(J_n (x) J_k) conj(V) J_l*, V_l^{n,k}>| / d_l, which is 1 up to phase.
double conjugation_consistency(Category& cat, int l, int n, int k);

}  // namespace fqg::tl
