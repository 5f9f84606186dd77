#include "fqg/linalg.hpp"

#include <Eigen/SVD>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace fqg::linalg {

cmat kron(const cmat& a, const cmat& b) {
  cmat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < a.rows(); ++i)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

cmat kron_left_apply(const cmat& A, Index db, const cmat& X) {
  const Index a_in = A.cols(), a_out = A.rows(), nc = X.cols();
  if (X.rows() != a_in * db) throw Error("kron_left_apply: dimension mismatch");
  // Gather every column of X as an a_in x db slab, side by side, so the
  // whole product is a single GEMM.
  cmat Y(a_in, db * nc);
  for (Index c = 0; c < nc; ++c)
    Y.middleCols(c * db, db) = Eigen::Map<const cmat>(X.col(c).data(), db, a_in).transpose();
  const cmat R = A * Y;
  cmat out(a_out * db, nc);
  for (Index c = 0; c < nc; ++c)
    Eigen::Map<cmat>(out.col(c).data(), db, a_out) = R.middleCols(c * db, db).transpose();
  return out;
}

cmat kron_right_apply(Index da, const cmat& B, const cmat& X) {
  const Index b_in = B.cols(), b_out = B.rows();
  if (X.rows() != da * b_in) throw Error("kron_right_apply: dimension mismatch");
  cmat out(da * b_out, X.cols());
  for (Index i = 0; i < da; ++i) out.middleRows(i * b_out, b_out).noalias() = B * X.middleRows(i * b_in, b_in);
  return out;
}

StridedMap second_slab(const cmat& V, Index db, Index b) {
  const Index da = V.rows() / db;
  return StridedMap(V.data() + b, da, V.cols(), Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>(V.rows(), db));
}

rvec singular_values(const cmat& x) {
  if (x.size() == 0) return rvec();
  Eigen::BDCSVD<cmat> svd(x);
  return svd.singularValues();
}

double schatten_norm_from_sv(const rvec& sv, double q) {
  if (sv.size() == 0) return 0.0;
  if (std::isinf(q)) return sv.maxCoeff();
  if (q == 2.0) return std::sqrt(sv.squaredNorm());
  if (q == 1.0) return sv.sum();
  const double m = sv.maxCoeff();
  if (m == 0.0) return 0.0;
  double s = 0;
  for (Index i = 0; i < sv.size(); ++i) s += std::pow(sv(i) / m, q);
  return m * std::pow(s, 1.0 / q);
}

double schatten_norm(const cmat& x, double q) {
  if (q == 2.0) return x.norm();
  return schatten_norm_from_sv(singular_values(x), q);
}

cmat polar_isometry(const cmat& Z, double rank_tol) {
  const cmat g = Z.adjoint() * Z;
  Eigen::SelfAdjointEigenSolver<cmat> es(g);
  const rvec& ev = es.eigenvalues();
  if (ev.size() == 0) return Z;
  const double top = ev.maxCoeff();
  if (!(top > 0) || ev.minCoeff() < rank_tol * top)
    throw InvariantViolation("polar_isometry: candidate map is numerically rank deficient");
  rvec inv_sqrt = ev.array().rsqrt();
  const cmat& Q = es.eigenvectors();
  return Z * (Q * inv_sqrt.asDiagonal() * Q.adjoint());
}

namespace {

Index first_max_index(const cmat& V, Index col) {
  const auto mags = V.col(col).cwiseAbs();
  const double m = mags.maxCoeff();
  for (Index i = 0; i < mags.size(); ++i)
    if (mags(i) >= m * (1.0 - 1e-10)) return i;
  return 0;
}

}  // namespace

void fix_global_phase(cmat& V) {
  if (V.cols() == 0) return;
  const cplx c = V(first_max_index(V, 0), 0);
  if (std::abs(c) == 0) return;
  V *= std::conj(c) / std::abs(c);
}

void fix_column_phases(cmat& V) {
  for (Index j = 0; j < V.cols(); ++j) {
    const cplx c = V(first_max_index(V, j), j);
    if (std::abs(c) > 0) V.col(j) *= std::conj(c) / std::abs(c);
  }
}

cmat psd_nullspace(const cmat& H, double tol) {
  Eigen::SelfAdjointEigenSolver<cmat> es(H);
  const rvec& ev = es.eigenvalues();
  Index k = 0;
  while (k < ev.size() && ev(k) < tol) ++k;
  cmat B = es.eigenvectors().leftCols(k);
  fix_column_phases(B);
  return B;
}

cmat random_gaussian(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  cmat m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) {
      const double re = g(rng);
      const double im = g(rng);
      m(i, j) = cplx(re, im);
    }
  return m;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double max_abs(const LanczosResult& r) { return std::max(std::abs(r.lambda_max), std::abs(r.lambda_min)); }

template <class Vec>
LanczosResult lanczos(const std::function<Vec(const Vec&)>& op, Vec v, int max_iter, double tol) {
  using Scalar = typename Vec::Scalar;
  LanczosResult res;
  const double n0 = v.norm();
  if (n0 == 0) return res;
  v /= n0;
  std::vector<Vec> basis;
  std::vector<double> alpha, beta;
  basis.push_back(v);
  double prev_theta = 0;
  for (int it = 0; it < max_iter; ++it) {
    Vec w = op(basis.back());
    const double a = std::real(basis.back().dot(w));
    alpha.push_back(a);
    // Full reorthogonalization, twice.
    for (int pass = 0; pass < 2; ++pass)
      for (const Vec& b : basis) {
        const Scalar c = b.dot(w);
        w -= c * b;
      }
    const double bnorm = w.norm();
    const Index m = static_cast<Index>(alpha.size());
    rmat T = rmat::Zero(m, m);
    for (Index i = 0; i < m; ++i) {
      T(i, i) = alpha[i];
      if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<rmat> es(T);
    const rvec& th = es.eigenvalues();
    res.lambda_min = th(0);
    res.lambda_max = th(m - 1);
    const Index top = std::abs(th(0)) > std::abs(th(m - 1)) ? 0 : m - 1;
    res.residual = bnorm * std::abs(es.eigenvectors()(m - 1, top));
    res.iterations = it + 1;
    const double theta = std::abs(th(top));
    if (bnorm < 1e-13 * std::max(1.0, theta) ||
        (it > 2 && res.residual < tol * std::max(theta, 1e-300) && std::abs(theta - prev_theta) < tol * theta)) {
      res.converged = true;
      break;
    }
    prev_theta = theta;
    beta.push_back(bnorm);
    basis.push_back(w / bnorm);
  }
  return res;
}

template LanczosResult lanczos<rvec>(const std::function<rvec(const rvec&)>&, rvec, int, double);
template LanczosResult lanczos<cvec>(const std::function<cvec(const cvec&)>&, cvec, int, double);

}  // namespace fqg::linalg
