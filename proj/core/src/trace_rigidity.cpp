#include "fqg/trace_rigidity.hpp"

#include "fqg/linalg.hpp"
#include "fqg/spectral.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <random>

namespace fqg::trace {

using algebra::convolve;
using algebra::sharp;
using linalg::first_slab;
using linalg::second_slab;

namespace {

std::vector<BlockElement> generators(tl::Category& cat) {
  const int N = cat.N();
  std::vector<BlockElement> out;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) out.push_back(cplx(1.0 / N) * algebra::matrix_unit(cat, 1, j, i));
  return out;
}

}  // namespace

GeneratorSumReport generator_sum(tl::Category& cat) {
  BlockElement left, right;
  for (const auto& w : generators(cat)) {
    const BlockElement ws = sharp(cat, w);
    left = left + convolve(cat, w, ws);
    right = right + convolve(cat, ws, w);
  }
  const BlockElement target = cplx(double(cat.N())) * algebra::unit_at(cat, 0);
  return {algebra::max_abs_diff(left, target), algebra::max_abs_diff(right, target)};
}

BlockElement phi(tl::Category& cat, const BlockElement& x) {
  const int N = cat.N();
  BlockElement out;
  for (const auto& w : generators(cat)) {
    const BlockElement ws = sharp(cat, w);
    out = out + convolve(cat, convolve(cat, w, x), ws);
    out = out + convolve(cat, convolve(cat, ws, x), w);
  }
  out = cplx(1.0 / (2 * N)) * out;
  out.canonicalize();
  return out;
}

KrausPhi::KrausPhi(tl::Category& cat, int n_min, int n_max, int target_max)
    : N_(cat.N()), n_min_(n_min), n_max_(n_max), target_max_(target_max) {
  if (n_min < 0 || n_max < n_min || target_max < n_max) throw Error("KrausPhi: bad level window");
  cat.require_level(target_max);
  for (int n = 0; n <= target_max; ++n) dims_.push_back(cat.dim(n));
  real_ = cat.params().is_real();
  for (int n = n_min; n <= n_max; ++n)
    for (int m : {n - 2, n, n + 2})
      if (m >= n_min && m <= target_max) add_channel(cat, n, m);
  if (real_) {
    for (const auto& t : terms_)
      if (t.G.imag().cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, t.G.real().cwiseAbs().maxCoeff())) real_ = false;
  }
  for (auto& t : terms_)
    if (real_) {
      t.Gr = t.G.real();
      t.G.resize(0, 0);
    }
  offsets_.push_back(0);
  for (int n = n_min; n <= n_max; ++n) offsets_.push_back(offsets_.back() + dims_[n] * dims_[n]);
  dropped_offsets_.push_back(0);
  for (int m = n_max + 1; m <= target_max; ++m)
    dropped_offsets_.push_back(dropped_offsets_.back() + dims_[m] * dims_[m]);
}

void KrausPhi::add_channel(tl::Category& cat, int n, int m) {
  const cmat& F = cat.params().F;
  const Index dn = cat.dim(n), dm = cat.dim(m);
  const double coef = double(dn) / (double(N_) * double(dm));
  // G = sum_{i,k} conj(F_ki) (V1 slab i)(V2 slab k) for W = (V_p^{1,n} (x) I) V_m^{p,1}.
  auto left_attached = [&](int p) {
    const cmat& V1 = cat.fusion(p, 1, n);
    const cmat& V2 = cat.fusion(m, p, 1);
    cmat G = cmat::Zero(dn, dm);
    for (int i = 0; i < N_; ++i) {
      cmat R = cmat::Zero(cat.dim(p), dm);
      for (int k = 0; k < N_; ++k)
        if (F(k, i) != cplx(0)) R += std::conj(F(k, i)) * second_slab(V2, N_, k);
      G.noalias() += first_slab(V1, dn, i) * R;
    }
    return G;
  };
  if (m != n || n == 0) {
    terms_.push_back({n, m, coef, left_attached(m == n ? 1 : (n + m) / 2), rmat()});
    return;
  }
  // m == n >= 1: W_a attaches on the left first, W_c on the right first.
  const int p = n - 1;
  const cmat Ga = left_attached(p);
  const cmat& V3 = cat.fusion(p, n, 1);
  const cmat& V4 = cat.fusion(n, 1, p);
  cmat Gc = cmat::Zero(dn, dm);
  for (int k = 0; k < N_; ++k) {
    cmat R = cmat::Zero(cat.dim(p), dm);
    for (int i = 0; i < N_; ++i)
      if (F(k, i) != cplx(0)) R += std::conj(F(k, i)) * first_slab(V4, cat.dim(p), i);
    Gc.noalias() += second_slab(V3, N_, k) * R;
  }
  // <W_a, W_c> / d_n from a few columns (W_a* W_c is scalar by Schur's lemma).
  const cmat& V1 = cat.fusion(p, 1, n);
  const cmat& V2 = cat.fusion(n, p, 1);
  const Index probe = std::min<Index>(dm, 4);
  cplx c = 0;
  for (Index col = 0; col < probe; ++col) {
    const cmat wa = linalg::kron_left_apply(V1, N_, V2.col(col));
    const cmat wc = linalg::kron_right_apply(N_, V3, V4.col(col));
    c += (wa.adjoint() * wc)(0, 0);
  }
  c /= double(probe);
  const double s = std::sqrt(std::max(0.0, 1.0 - std::norm(c)));
  if (s < 1e-8) throw InvariantViolation("KrausPhi: attachment orders are parallel at level " + std::to_string(n));
  terms_.push_back({n, m, coef, Ga, rmat()});
  terms_.push_back({n, m, coef, (Gc - c * Ga) / s, rmat()});
}

BlockElement KrausPhi::apply(const BlockElement& x) const {
  BlockElement out;
  for (const auto& t : terms_) {
    const cmat* xn = x.block(t.n);
    if (!xn) continue;
    if (real_) {
      const rmat Gr = t.Gr;
      out.accumulate(t.m, t.coef * (Gr.transpose().cast<cplx>() * (*xn) * Gr.cast<cplx>()));
    } else {
      out.accumulate(t.m, t.coef * (t.G.adjoint() * (*xn) * t.G));
    }
  }
  for (const auto& [n, m] : x.blocks)
    if (n < n_min_ || n > n_max_) throw Error("KrausPhi::apply: input level outside the domain window");
  out.canonicalize();
  return out;
}

template <class Vec>
Vec KrausPhi::apply_impl(const Vec& v, bool dropped, bool adjoint) const {
  using Scalar = typename Vec::Scalar;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  constexpr bool is_real = std::is_same_v<Scalar, double>;
  if (is_real && !real_) throw Error("KrausPhi: real coordinates requested for complex Kraus operators");
  const auto& in_off = (dropped && adjoint) ? dropped_offsets_ : offsets_;
  const auto& out_off = (dropped && !adjoint) ? dropped_offsets_ : offsets_;
  const int in_base = (dropped && adjoint) ? n_max_ + 1 : n_min_;
  const int out_base = (dropped && !adjoint) ? n_max_ + 1 : n_min_;
  Vec out = Vec::Zero(out_off.back());
  for (const auto& t : terms_) {
    const bool is_dropped = t.m > n_max_;
    if (is_dropped != dropped) continue;
    const int src = adjoint ? t.m : t.n;
    const int dst = adjoint ? t.n : t.m;
    const Index ds = dims_[src], dd = dims_[dst];
    const double c = std::sqrt(double(dims_[t.n]) / double(dims_[t.m])) / N_;
    Eigen::Map<const Mat> X(v.data() + in_off[src - in_base], ds, ds);
    Eigen::Map<Mat> Y(out.data() + out_off[dst - out_base], dd, dd);
    if constexpr (is_real) {
      const rmat& G = t.Gr;
      if (!adjoint) Y.noalias() += c * (G.transpose() * (X * G));
      else Y.noalias() += c * (G * (X * G.transpose()));
    } else {
      const cmat& G = t.G;
      if (!adjoint) Y.noalias() += c * (G.adjoint() * (X * G));
      else Y.noalias() += c * (G * (X * G.adjoint()));
    }
  }
  return out;
}

template <class Vec>
Vec KrausPhi::apply_coordinates(const Vec& v) const {
  return apply_impl(v, false, false);
}
template <class Vec>
Vec KrausPhi::apply_dropped(const Vec& v) const {
  return apply_impl(v, true, false);
}
template <class Vec>
Vec KrausPhi::apply_dropped_adjoint(const Vec& v) const {
  return apply_impl(v, true, true);
}

template rvec KrausPhi::apply_coordinates<rvec>(const rvec&) const;
template cvec KrausPhi::apply_coordinates<cvec>(const cvec&) const;
template rvec KrausPhi::apply_dropped<rvec>(const rvec&) const;
template cvec KrausPhi::apply_dropped<cvec>(const cvec&) const;
template rvec KrausPhi::apply_dropped_adjoint<rvec>(const rvec&) const;
template cvec KrausPhi::apply_dropped_adjoint<cvec>(const cvec&) const;

namespace {

template <class Vec>
Vec seeded_start(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Vec v(n);
  for (Index i = 0; i < n; ++i) {
    if constexpr (std::is_same_v<typename Vec::Scalar, double>) v(i) = g(rng);
    else {
      const double re = g(rng);
      v(i) = cplx(re, g(rng));
    }
  }
  return v;
}

template <class Vec>
void run_l20(const KrausPhi& op, L20NormReport& r, std::uint64_t seed, bool with_dropped) {
  const std::function<Vec(const Vec&)> f = [&](const Vec& v) { return op.apply_coordinates(v); };
  // Full reorthogonalization keeps every Krylov vector; cap the basis at about 1.5 GB.
  const double vec_bytes = double(op.coordinate_dim()) * sizeof(typename Vec::Scalar);
  const int max_iter = std::clamp(static_cast<int>(1.5e9 / vec_bytes), 12, 80);
  const auto res = linalg::lanczos<Vec>(f, seeded_start<Vec>(op.coordinate_dim(), seed), max_iter, 1e-9);
  r.lambda_max = res.lambda_max;
  r.lambda_min = res.lambda_min;
  r.norm = linalg::max_abs(res);
  r.residual = res.residual;
  r.iterations = res.iterations;
  r.converged = res.converged;
  if (with_dropped && op.dropped_dim() > 0) {
    const std::function<Vec(const Vec&)> g = [&](const Vec& v) {
      return op.apply_dropped_adjoint(op.apply_dropped(v));
    };
    const auto d = linalg::lanczos<Vec>(g, seeded_start<Vec>(op.coordinate_dim(), seed + 1), 60, 1e-9);
    r.dropped_coupling = std::sqrt(std::max(0.0, d.lambda_max));
  }
}

}  // namespace

L20NormReport phi_l20_norm(tl::Category& cat, int K, std::uint64_t seed, bool with_dropped) {
  const auto t0 = std::chrono::steady_clock::now();
  L20NormReport r;
  r.K = K;
  const bool dropped = with_dropped && K + 2 <= cat.max_level();
  const KrausPhi op(cat, 1, K, dropped ? K + 2 : K);
  r.real_arithmetic = op.real_arithmetic();
  if (r.real_arithmetic) run_l20<rvec>(op, r, seed, dropped);
  else run_l20<cvec>(op, r, seed, dropped);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

L1Report phi_l1_check(tl::Category& cat, int trials, std::uint64_t seed, int max_level) {
  L1Report r;
  r.trials = trials;
  const BlockElement p0 = algebra::unit_at(cat, 0);
  r.unit_ratio = algebra::lq_norm(cat, phi(cat, p0), 1) / algebra::lq_norm(cat, p0, 1);
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng(linalg::derive_seed(seed, t));
    std::vector<int> levels;
    for (int n = 0; n <= max_level; ++n)
      if (std::uniform_int_distribution<int>(0, 1)(rng) || n == max_level) levels.push_back(n);
    const BlockElement x = algebra::random_element(cat, levels, rng, t % 2 == 0);
    const BlockElement px = phi(cat, x);
    r.max_ratio = std::max(r.max_ratio, algebra::lq_norm(cat, px, 1) / algebra::lq_norm(cat, x, 1));
    r.hermiticity = std::max(r.hermiticity, algebra::max_abs_diff(phi(cat, algebra::adjoint(x)), algebra::adjoint(px)));
  }
  return r;
}

double interpolated_bound(double q, double C_N) {
  if (!(C_N > 0) || C_N >= 1) throw Error("interpolated_bound needs 0 < C_N < 1");
  if (!(q > 1) || q > 2) throw Error("interpolated_bound needs q in (1, 2]");
  return std::pow(C_N, 2.0 * (1.0 - 1.0 / q));
}

IterationTrace iterate_to_haar(tl::Category& cat, const BlockElement& x, double p, int k_max, double D_N, int K) {
  if (p < 2) throw Error("iterate_to_haar needs p >= 2");
  const double q = p / (p - 1.0);
  const int nx = std::max(0, x.top_level());
  if (nx > K) throw LevelOverflow(nx, K);
  IterationTrace tr;
  tr.K = K;
  const KrausPhi op(cat, 0, K, K);
  BlockElement z = x;
  if (const cmat* x0 = x.block(0)) z = z - algebra::BlockElement{{{0, *x0}}};
  z.canonicalize();
  for (int k = 0; k <= k_max; ++k) {
    if (k > 0) z = op.apply(z);
    const double nz = algebra::lq_norm(cat, z, q);
    tr.norms.push_back(nz);
    tr.upper_bounds.push_back(D_N * std::pow(nx + 2.0 * k + 1.0, 1.0 + 1.0 / p) * nz);
    tr.support_top.push_back(z.top_level());
    tr.exact.push_back(nx + 2 * k <= K);
    if (nx + 2 * k > K) tr.truncated = true;
  }
  // Least squares on log ||z_k|| for k >= 3.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  tr.strictly_decreasing_after_3 = true;
  for (int k = 3; k <= k_max; ++k) {
    if (tr.norms[k] <= 0) continue;
    const double y = std::log(tr.norms[k]);
    sx += k;
    sy += y;
    sxx += double(k) * k;
    sxy += k * y;
    ++cnt;
    if (k > 3 && !(tr.norms[k] < tr.norms[k - 1])) tr.strictly_decreasing_after_3 = false;
  }
  if (cnt >= 2) tr.fitted_rate = std::exp((cnt * sxy - sx * sy) / (cnt * sxx - sx * sx));
  return tr;
}

}  // namespace fqg::trace
