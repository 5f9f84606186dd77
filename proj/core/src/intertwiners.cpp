#include "fqg/intertwiners.hpp"

#include "fqg/linalg.hpp"
#include "fqg/spectral.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <type_traits>
#include <vector>

namespace fqg::tl {

using linalg::kron_left_apply;
using linalg::kron_right_apply;

Category::Category(QGParams params, CategoryOptions opts) : params_(std::move(params)), opts_(std::move(opts)) {
  params_.validate();
  if (opts_.max_level < 1) throw Error("max level must be >= 1");
  const int N = params_.N;
  t_ = cvec::Zero(N * N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) t_(i * N + j) = params_.F(j, i) / std::sqrt(double(N));
  for (int n = 0; n <= opts_.max_level + 2; ++n) dims_.push_back(spectral::chebyshev_dim(n, N));
  if (opts_.cache_dir) cache_ = std::make_unique<MatrixCache>(*opts_.cache_dir, params_);
}

Index Category::dim(int n) const {
  if (n < 0) throw Error("negative level");
  if (n < static_cast<int>(dims_.size())) return dims_[n];
  return spectral::chebyshev_dim(n, params_.N);
}

void Category::require_level(int n) const {
  if (n > opts_.max_level) throw LevelOverflow(n, opts_.max_level);
}

cplx Category::zigzag_value() const {
  const int N = params_.N;
  // Entry (c, b) of the zig-zag is sum_a conj(t[b,a]) t[a,c]; read off at b = c = 0.
  cplx v = 0;
  for (int a = 0; a < N; ++a) v += std::conj(t_(0 * N + a)) * t_(a * N + 0);
  return v;
}

template <class F>
const cmat& Category::memo(std::map<std::tuple<int, int, int>, cmat>& store, ObjectKind kind, int a, int b, int c,
                           F&& make) {
  std::lock_guard<std::recursive_mutex> lock(mu_);
  const auto key = std::make_tuple(a, b, c);
  if (auto it = store.find(key); it != store.end()) return it->second;
  const CacheKey ck{kind, {std::uint32_t(a), std::uint32_t(b), std::uint32_t(c)}};
  if (cache_) {
    if (auto hit = cache_->get(ck)) return store.emplace(key, std::move(*hit)).first->second;
  }
  cmat value = make();
  if (cache_) cache_->put(ck, value);
  return store.emplace(key, std::move(value)).first->second;
}

const cmat& Category::basis_step(int n) {
  require_level(n);
  if (n < 1) throw Error("basis_step needs n >= 1");
  return memo(basis_, ObjectKind::BasisStep, n, 0, 0, [&] { return compute_basis_step(n); });
}

cmat Category::compute_basis_step(int n) {
  const int N = params_.N;
  if (n == 1) return cmat::Identity(N, N);
  const cmat& prev = basis_step(n - 1);
  const Index d2 = dim(n - 2);
  // Image of H_{n-2} in H_{n-1} (x) H_1: (U_{n-1}* (x) I)(I_{d_{n-2}} (x) t).
  const cmat cups = linalg::kron(cmat::Identity(d2, d2), cmat(t_));
  const cmat M = kron_left_apply(prev.adjoint(), N, cups);
  Eigen::HouseholderQR<cmat> qr(M);
  const Index rows = M.rows();
  cmat Q = qr.householderQ() * cmat::Identity(rows, rows);
  cmat U = Q.rightCols(rows - d2);
  if (U.cols() != dim(n)) throw InvariantViolation("basis_step: dimension mismatch at level " + std::to_string(n));
  linalg::fix_column_phases(U);
  return U;
}

cmat Category::normalize_isometry(cmat Z, int l) const {
  if (dim(l) <= opts_.polar_max_dim) {
    Z = linalg::polar_isometry(Z);
  } else {
    const double c = Z.norm() / std::sqrt(double(dim(l)));
    if (!(c > 0)) throw InvariantViolation("fusion candidate vanishes");
    Z /= c;
  }
  linalg::fix_global_phase(Z);
  return Z;
}

const cmat& Category::fusion(int l, int n, int k) {
  require_level(std::max({l, n, k}));
  if (!spectral::fuses(l, n, k))
    throw Error("fusion: " + std::to_string(l) + " is not contained in " + std::to_string(n) + " (x) " +
                std::to_string(k));
  return memo(fusion_, ObjectKind::Fusion, l, n, k, [&] { return compute_fusion(l, n, k); });
}

cmat Category::compute_fusion(int l, int n, int k) {
  const int N = params_.N;
  if (k == 0) return cmat::Identity(dim(n), dim(n));
  if (n == 0) return cmat::Identity(dim(k), dim(k));
  if (k == 1) {
    if (l == n + 1) return basis_step(n + 1);
    const Index dl = dim(l);
    const cmat cups = linalg::kron(cmat::Identity(dl, dl), cmat(t_));
    return normalize_isometry(kron_left_apply(basis_step(n).adjoint(), N, cups), l);
  }
  const int lp = spectral::fuses(l - 1, n, k - 1) ? l - 1 : l + 1;
  const cmat& A = fusion(lp, n, k - 1);
  const cmat& B = fusion(l, lp, 1);
  cmat Y = kron_left_apply(A, N, B);
  cmat Z = kron_right_apply(dim(n), basis_step(k).adjoint(), Y);
  return normalize_isometry(std::move(Z), l);
}

const cmat& Category::conjugation(int n) {
  require_level(n);
  return memo(conj_, ObjectKind::Conjugation, n, 0, 0, [&]() -> cmat {
    if (n == 0) return cmat::Identity(1, 1);
    if (n == 1) return params_.F;
    const Index d = dim(n);
    const cmat& v = fusion(0, n, n);
    return std::sqrt(double(d)) * Eigen::Map<const cmat>(v.data(), d, d);
  });
}

cmat Category::cup_insertion(int n, int pos) const {
  const int N = params_.N;
  if (n < 2 || pos < 0 || pos > n - 2) throw Error("cup_insertion: bad position");
  Index left = 1, right = 1;
  for (int i = 0; i < pos; ++i) left *= N;
  for (int i = 0; i < n - 2 - pos; ++i) right *= N;
  cmat C = cmat::Zero(left * N * N * right, left * right);
  for (Index a = 0; a < left; ++a)
    for (Index c = 0; c < right; ++c)
      for (Index m = 0; m < N * N; ++m) C((a * N * N + m) * right + c, a * right + c) = t_(m);
  return C;
}

cvec Category::nested_cups(int r) const {
  cvec T = cvec::Ones(1);
  const int N = params_.N;
  for (int s = 0; s < r; ++s) {
    const Index inner = T.size();
    cvec next = cvec::Zero(inner * N * N);
    for (int a = 0; a < N; ++a)
      for (Index m = 0; m < inner; ++m)
        for (int b = 0; b < N; ++b) next((a * inner + m) * N + b) = t_(a * N + b) * T(m);
    T = std::move(next);
  }
  return T;
}

const cmat& Category::jw_projection(int n) {
  require_level(n);
  return memo(jw_, ObjectKind::JonesWenzl, n, 0, 0, [&] { return compute_jw(n); });
}

cmat Category::compute_jw(int n) {
  const int N = params_.N;
  if (n == 0) return cmat::Identity(1, 1);
  if (n == 1) return cmat::Identity(N, N);
  const cmat& P = jw_projection(n - 1);
  const int m = n - 1;  // Pi_{m+1} from Pi_m
  const Index D = P.rows();
  const Index Dm1 = D / N;  // N^{m-1}
  // W = (Pi_m (x) 1)(1^{m-1} (x) t): W[(J,b), I] = sum_a t[a,b] Pi_m[J, (I,a)].
  cmat W = cmat::Zero(D * N, Dm1);
  for (Index I = 0; I < Dm1; ++I)
    for (int a = 0; a < N; ++a) {
      const auto col = P.col(I * N + a);
      for (int b = 0; b < N; ++b) {
        const cplx tab = t_(a * N + b);
        if (tab == cplx(0)) continue;
        for (Index J = 0; J < D; ++J) W(J * N + b, I) += tab * col(J);
      }
    }
  const double coef = N * spectral::chebyshev_real(m - 1, N) / spectral::chebyshev_real(m, N);
  cmat Q = linalg::kron(P, cmat::Identity(N, N));
  Q.noalias() -= coef * (W * W.adjoint());
  Q = 0.5 * (Q + Q.adjoint()).eval();
  if (Q.rows() <= opts_.jw_cleanup_max_dim) {
    Eigen::SelfAdjointEigenSolver<cmat> es(Q);
    const rvec& ev = es.eigenvalues();
    Index k = 0;
    while (k < ev.size() && ev(k) < 0.5) ++k;
    const cmat top = es.eigenvectors().rightCols(ev.size() - k);
    Q = top * top.adjoint();
  }
  return Q;
}

const cmat& Category::ambient_basis(int n) {
  require_level(n);
  std::lock_guard<std::recursive_mutex> lock(mu_);
  const auto key = std::make_tuple(n, 0, 0);
  if (auto it = ambient_.find(key); it != ambient_.end()) return it->second;
  cmat B;
  if (n == 0) B = cmat::Identity(1, 1);
  else if (n == 1) B = cmat::Identity(N(), N());
  else B = kron_left_apply(ambient_basis(n - 1), N(), basis_step(n));
  return ambient_.emplace(key, std::move(B)).first->second;
}

cmat Category::ambient_conjugation(int n) {
  const int N = params_.N;
  if (n == 0) return cmat::Identity(1, 1);
  const cmat& B = ambient_basis(n);
  // F^{(x)n} conj(B), then strand reversal, then B*.
  cmat X = B.conjugate();
  Index right = 1;
  for (int i = 0; i < n; ++i) right *= N;
  Index left = 1;
  for (int s = 0; s < n; ++s) {
    right /= N;
    // apply F on strand s: (I_left (x) F (x) I_right)
    cmat Y(X.rows(), X.cols());
    for (Index a = 0; a < left; ++a) {
      const cmat blk = X.middleRows(a * N * right, N * right);
      Y.middleRows(a * N * right, N * right) = kron_left_apply(params_.F, right, blk);
    }
    X = std::move(Y);
    left *= N;
  }
  const Index D = X.rows();
  cmat R(D, X.cols());
  for (Index idx = 0; idx < D; ++idx) {
    Index rest = idx, rev = 0;
    for (int s = 0; s < n; ++s) {
      rev = rev * N + rest % N;
      rest /= N;
    }
    R.row(rev) = X.row(idx);
  }
  return B.adjoint() * R;
}

JWReport validate_jw(Category& cat, int n, double tol) {
  JWReport r;
  r.n = n;
  const cmat& P = cat.jw_projection(n);
  const Index D = P.rows();
  r.ambient_dim = D;
  r.expected_rank = cat.dim(n);
  r.hermitian = (P - P.adjoint()).cwiseAbs().maxCoeff();
  const cmat P2 = P * P;
  r.idempotency = (P2 - P).cwiseAbs().maxCoeff();
  if (D <= 2200) {
    Eigen::SelfAdjointEigenSolver<cmat> es(0.5 * (P + P.adjoint()), Eigen::EigenvaluesOnly);
    r.rank = (es.eigenvalues().array() >= 0.5).count();
    r.rank_by_eigencount = true;
  } else {
    r.rank = static_cast<Index>(std::llround(P.trace().real()));
  }
  for (int pos = 0; pos + 2 <= n; ++pos) {
    const cmat C = cat.cup_insertion(n, pos);
    r.cup_annihilation = std::max(r.cup_annihilation, (P * C).norm());
  }
  const cmat& B = cat.ambient_basis(n);
  r.basis_orthonormality = (B.adjoint() * B - cmat::Identity(B.cols(), B.cols())).cwiseAbs().maxCoeff();
  r.basis_projection = (B * B.adjoint() - P).cwiseAbs().maxCoeff();
  r.pass = r.hermitian <= tol && r.idempotency <= tol && r.rank == r.expected_rank && r.cup_annihilation <= tol &&
           r.basis_orthonormality <= tol && r.basis_projection <= tol;
  return r;
}

namespace {

// Accumulates A A* into the lower triangle of S.
template <class M>
void lower_rank_update(M& S, const M& A) {
  S.template selfadjointView<Eigen::Lower>().rankUpdate(A);
}

// max-abs of S - I read from the lower triangle.
template <class M>
double lower_identity_defect(const M& S) {
  double m = 0;
  for (Index j = 0; j < S.cols(); ++j)
    for (Index i = j; i < S.rows(); ++i) m = std::max(m, std::abs(S(i, j) - (i == j ? 1.0 : 0.0)));
  return m;
}

template <class M>
void completeness_impl(const std::vector<const cmat*>& Vs, Index D, CompletenessReport& r) {
  M S = M::Zero(D, D);
  for (const cmat* V : Vs) {
    M A;
    if constexpr (std::is_same_v<M, rmat>) A = V->real();
    else A = *V;
    lower_rank_update(S, A);
    M G = M::Zero(A.cols(), A.cols());
    const M At = A.adjoint();
    lower_rank_update(G, At);
    r.isometry = std::max(r.isometry, lower_identity_defect(G));
  }
  r.completeness = lower_identity_defect(S);
}

}  // namespace

CompletenessReport fusion_completeness(Category& cat, int n, int k) {
  CompletenessReport r;
  r.n = n;
  r.k = k;
  const Index D = cat.dim(n) * cat.dim(k);
  std::vector<const cmat*> Vs;
  bool real = true;
  for (int l : spectral::fusion_range(n, k)) {
    Vs.push_back(&cat.fusion(l, n, k));
    real = real && Vs.back()->imag().cwiseAbs().maxCoeff() == 0.0;
  }
  if (real) completeness_impl<rmat>(Vs, D, r);
  else completeness_impl<cmat>(Vs, D, r);
  return r;
}

ConjugationReport validate_conjugation(Category& cat, int n, bool with_ambient) {
  ConjugationReport r;
  r.n = n;
  const cmat& J = cat.conjugation(n);
  const Index d = J.rows();
  const double eps_n = (n % 2 == 1 && cat.epsilon() < 0) ? -1.0 : 1.0;
  r.unitarity = (J.adjoint() * J - cmat::Identity(d, d)).cwiseAbs().maxCoeff();
  r.sign = (J * J.conjugate() - eps_n * cmat::Identity(d, d)).cwiseAbs().maxCoeff();
  if (with_ambient) {
    const cmat Ja = cat.ambient_conjugation(n);
    r.ambient_overlap = std::abs((J.adjoint() * Ja).trace()) / double(d);
  }
  return r;
}

double conjugation_consistency(Category& cat, int l, int n, int k) {
  const cmat& V = cat.fusion(l, n, k);
  const cmat& Jn = cat.conjugation(n);
  const cmat& Jk = cat.conjugation(k);
  const cmat& Jl = cat.conjugation(l);
  const Index dn = cat.dim(n), dk = cat.dim(k);
  cmat X = kron_left_apply(Jn, dk, kron_right_apply(dn, Jk, V.conjugate())) * Jl.adjoint();
  // The conjugate of n (x) k is k (x) n: swap the tensor factors before comparing.
  cmat Xs(X.rows(), X.cols());
  for (Index a = 0; a < dn; ++a)
    for (Index b = 0; b < dk; ++b) Xs.row(b * dn + a) = X.row(a * dk + b);
  const cmat& W = cat.fusion(l, k, n);
  return std::abs((W.adjoint() * Xs).trace()) / double(cat.dim(l));
}

}  // namespace fqg::tl
