#include "fqg/harmonic.hpp"

#include "fqg/linalg.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

namespace fqg::harmonic {

using linalg::first_slab;
using linalg::kron_left_apply;
using linalg::kron_right_apply;
using linalg::schatten_norm;
using linalg::second_slab;

namespace {

double conjugate_exponent(double q) {
  if (q == 1.0) return std::numeric_limits<double>::infinity();
  if (std::isinf(q)) return 1.0;
  return q / (q - 1.0);
}

// Element of the unit sphere of S_{s'} norming z in S_s: U S^{s-1} W* / ||z||_s^{s-1}.
cmat duality_map(const cmat& z, double s) {
  Eigen::BDCSVD<cmat> svd(z, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const rvec& sv = svd.singularValues();
  const double top = sv.size() ? sv(0) : 0.0;
  if (top == 0) return cmat::Zero(z.rows(), z.cols());
  rvec w(sv.size());
  if (std::isinf(s)) {
    w.setZero();
    w(0) = 1.0;
  } else if (s == 1.0) {
    for (Index i = 0; i < sv.size(); ++i) w(i) = sv(i) > 1e-14 * top ? 1.0 : 0.0;
  } else {
    const double nrm = linalg::schatten_norm_from_sv(sv / top, s);
    for (Index i = 0; i < sv.size(); ++i) w(i) = std::pow(sv(i) / top / nrm, s - 1.0);
  }
  return svd.matrixU() * w.asDiagonal() * svd.matrixV().adjoint();
}

}  // namespace

cmat schatten_contraction(const cmat& x, const cmat& y, Index dH, Index d, Index dK) {
  if (x.rows() != dH * d || x.cols() != dH * d || y.rows() != d * dK || y.cols() != d * dK)
    throw Error("schatten_contraction: shape mismatch");
  cmat out = cmat::Zero(dH * dK, dH * dK);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) {
      cmat xij(dH, dH);
      for (Index a = 0; a < dH; ++a)
        for (Index b = 0; b < dH; ++b) xij(a, b) = x(a * d + i, b * d + j);
      const auto yij = y.block(i * dK, j * dK, dK, dK);
      out += linalg::kron(xij, yij);
    }
  return out;
}

double schatten_contraction_trial(Index dH, Index d, Index dK, double q, int trials, std::uint64_t seed) {
  if (dH < 1 || d < 1 || dK < 1) throw Error("schatten_contraction_trial: dims must be >= 1");
  if (!(q >= 1.0 && q <= 2.0)) throw Error("schatten_contraction_trial: q must lie in [1, 2]");
  double best = 0;
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng(linalg::derive_seed(seed, static_cast<std::uint64_t>(t)));
    const cmat x = linalg::random_gaussian(dH * d, dH * d, rng);
    const cmat y = linalg::random_gaussian(d * dK, d * dK, rng);
    const double r = schatten_norm(schatten_contraction(x, y, dH, d, dK), q) / (schatten_norm(x, q) * schatten_norm(y, q));
    best = std::max(best, r);
  }
  return best;
}

double lq_ratio_factor(double dn, double dk, double dl, double q) { return std::pow(dn * dk / dl, 1.0 - 1.0 / q); }

double max_bilinear_ratio(const cmat& V, Index dn, Index dk, double q, int trials, std::uint64_t seed,
                          int power_steps) {
  const double p = conjugate_exponent(q);
  auto apply = [&](const cmat& x, const cmat& y) -> cmat {
    return V.adjoint() * kron_left_apply(x, dk, kron_right_apply(dn, y, V));
  };
  auto ratio = [&](const cmat& x, const cmat& y, const cmat& z) {
    return schatten_norm(z, q) / (schatten_norm(x, q) * schatten_norm(y, q));
  };
  double best = 0;
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng(linalg::derive_seed(seed, static_cast<std::uint64_t>(t)));
    cmat x = linalg::random_gaussian(dn, dn, rng);
    cmat y = linalg::random_gaussian(dk, dk, rng);
    cmat z = apply(x, y);
    double cur = ratio(x, y, z);
    for (int s = 0; s < power_steps; ++s) {
      // x-step: A*(w) = Tr_2[V w V* (1 (x) y*)].
      {
        const cmat w = duality_map(z, q);
        const cmat Vw = V * w;
        const cmat Vy = kron_right_apply(dn, y, V);
        cmat g = cmat::Zero(dn, dn);
        for (Index b = 0; b < dk; ++b) g.noalias() += second_slab(Vw, dk, b) * second_slab(Vy, dk, b).adjoint();
        x = duality_map(g, p);
      }
      // y-step: B*(w) = Tr_1[V w V* (x* (x) 1)].
      z = apply(x, y);
      {
        const cmat w = duality_map(z, q);
        const cmat Vw = V * w;
        const cmat Vx = kron_left_apply(x, dk, V);
        cmat g = cmat::Zero(dk, dk);
        for (Index a = 0; a < dn; ++a) g.noalias() += first_slab(Vw, dk, a) * first_slab(Vx, dk, a).adjoint();
        y = duality_map(g, p);
      }
      z = apply(x, y);
      const double next = ratio(x, y, z);
      const bool stalled = next <= cur * (1 + 1e-12);
      cur = std::max(cur, next);
      if (stalled) break;
    }
    best = std::max(best, cur);
  }
  return best;
}

RDReport local_rd_scan(tl::Category& cat, double q, int max_level, int trials, std::uint64_t seed) {
  if (!(q >= 1.0 && q <= 2.0)) throw Error("local_rd_scan: q must lie in [1, 2]");
  if (trials < 1) throw Error("local_rd_scan: trials must be >= 1");
  RDReport rep;
  rep.q = q;
  rep.max_level = max_level;
  rep.trials = trials;
  rep.seed = seed;
  std::uint64_t cell_id = 0;
  for (int n = 0; n <= max_level; ++n)
    for (int k = 0; k <= max_level; ++k)
      for (int l : spectral::fusion_range(n, k)) {
        if (l > max_level) continue;
        const std::uint64_t cs = linalg::derive_seed(seed, cell_id++);
        RDCell c{n, k, l, 0, 0};
        const Index dn = cat.dim(n), dk = cat.dim(k), dl = cat.dim(l);
        const double f = lq_ratio_factor(double(dn), double(dk), double(dl), q);
        if (n == 0 || k == 0) {
          // Unit convolution: V is a unitary identification, ratio 1.
          c.ratio = c.ratio_doubled = 1.0;
        } else {
          const cmat& V = cat.fusion(l, n, k);
          // Trials 0..T-1 are a prefix of trials 0..2T-1, so only the extra half is recomputed.
          c.ratio = f * max_bilinear_ratio(V, dn, dk, q, trials, cs);
          const double extra = f * max_bilinear_ratio(V, dn, dk, q, trials, linalg::derive_seed(cs, 0xd0b1e));
          c.ratio_doubled = std::max(c.ratio, extra);
        }
        rep.empirical_local_constant = std::max(rep.empirical_local_constant, c.ratio);
        rep.empirical_local_constant_doubled = std::max(rep.empirical_local_constant_doubled, c.ratio_doubled);
        rep.max_cell_change = std::max(rep.max_cell_change, (c.ratio_doubled - c.ratio) / c.ratio);
        rep.cells.push_back(c);
      }
  return rep;
}

namespace {

std::vector<Index> level_offsets(tl::Category& cat, int K) {
  std::vector<Index> off{0};
  for (int k = 0; k <= K; ++k) off.push_back(off.back() + cat.dim(k) * cat.dim(k));
  return off;
}

cvec pack(tl::Category& cat, const BlockElement& y, const std::vector<Index>& off) {
  cvec v = cvec::Zero(off.back());
  for (const auto& [k, b] : y.blocks) {
    if (k + 1 >= static_cast<int>(off.size())) continue;
    v.segment(off[k], b.size()) = std::sqrt(double(cat.dim(k))) * Eigen::Map<const cvec>(b.data(), b.size());
  }
  return v;
}

BlockElement unpack(tl::Category& cat, const cvec& v, const std::vector<Index>& off) {
  BlockElement y;
  for (int k = 0; k + 1 < static_cast<int>(off.size()); ++k) {
    const Index d = cat.dim(k);
    y.blocks.emplace(k, Eigen::Map<const cmat>(v.data() + off[k], d, d) / std::sqrt(double(d)));
  }
  return y;
}

BlockElement restrict_levels(const BlockElement& y, int K) {
  BlockElement out;
  for (const auto& [k, b] : y.blocks)
    if (k <= K) out.blocks.emplace(k, b);
  return out;
}

// Blockwise duality map for L_s with the Haar weight: unit vector of L_{s'} norming z.
BlockElement lq_duality(tl::Category& cat, const BlockElement& z, double s) {
  const double nz = algebra::lq_norm(cat, z, s);
  BlockElement out;
  if (nz == 0) return out;
  for (const auto& [k, b] : z.blocks) {
    Eigen::BDCSVD<cmat> svd(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
    rvec w = svd.singularValues();
    for (Index i = 0; i < w.size(); ++i) w(i) = s == 1.0 ? (w(i) > 0 ? 1.0 : 0.0) : std::pow(w(i) / nz, s - 1.0);
    out.blocks.emplace(k, svd.matrixU() * w.asDiagonal() * svd.matrixV().adjoint());
  }
  return out;
}

// x * y with output levels above out_max never formed.
BlockElement convolve_capped(tl::Category& cat, const BlockElement& x, const BlockElement& y, int out_max) {
  BlockElement out;
  for (const auto& [n, xn] : x.blocks)
    for (const auto& [k, yk] : y.blocks)
      for (int l : spectral::fusion_range(n, k))
        if (l <= out_max) out.accumulate(l, algebra::convolve_block(cat, xn, n, yk, k, l));
  return out;
}

// ||P_{<= out_max} L_x P_{<= K}||_{2->2} by Lanczos on the normal operator.
double compressed_norm(tl::Category& cat, const BlockElement& x, int K, int out_max, std::mt19937_64& rng,
                       bool& converged) {
  const auto off = level_offsets(cat, K);
  std::function<cvec(const cvec&)> op = [&](const cvec& v) {
    const BlockElement y = unpack(cat, v, off);
    return pack(cat, algebra::convolve_left_adjoint(cat, x, convolve_capped(cat, x, y, out_max), K), off);
  };
  const cvec start = linalg::random_gaussian(off.back(), 1, rng).col(0);
  const auto lr = linalg::lanczos<cvec>(op, start, std::min<int>(80, static_cast<int>(off.back())), 1e-10);
  converged = lr.converged;
  return std::sqrt(std::max(0.0, lr.lambda_max));
}

}  // namespace

GlobalRDResult global_rd_estimate(tl::Category& cat, int n, double q, int K, int trials, std::uint64_t seed,
                                  int out_max) {
  if (!(q >= 1.0 && q <= 2.0)) throw Error("global_rd_estimate: q must lie in [1, 2]");
  if (out_max < 0) out_max = n + K;
  if (out_max > cat.max_level()) throw LevelOverflow(out_max, cat.max_level());
  if (n + K > cat.max_level()) throw LevelOverflow(n + K, cat.max_level());
  GlobalRDResult res;
  res.n = n;
  res.K = K;
  res.out_max = out_max;
  res.exact_operator_norm = (q == 2.0);
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng(linalg::derive_seed(seed, static_cast<std::uint64_t>(t)));
    const BlockElement x = algebra::random_element(cat, {n}, rng);
    const double nx = algebra::lq_norm(cat, x, q);
    double opnorm = 0;
    if (q == 2.0) {
      bool converged = false;
      opnorm = compressed_norm(cat, x, K, out_max, rng, converged);
      res.exact_operator_norm = res.exact_operator_norm && converged;
    } else {
      // Lower bound by Boyd's power method on L_q(levels <= K).
      const double p = conjugate_exponent(q);
      std::vector<int> levels;
      for (int k = 0; k <= K; ++k) levels.push_back(k);
      BlockElement y = algebra::random_element(cat, levels, rng);
      for (int s = 0; s < 30; ++s) {
        const BlockElement z = convolve_capped(cat, x, y, out_max);
        const double r = algebra::lq_norm(cat, z, q) / algebra::lq_norm(cat, y, q);
        const bool stalled = r <= opnorm * (1 + 1e-12);
        opnorm = std::max(opnorm, r);
        if (stalled) break;
        const BlockElement g = algebra::convolve_left_adjoint(cat, x, lq_duality(cat, z, q), K);
        y = restrict_levels(lq_duality(cat, g, p), K);
        if (y.empty()) break;
      }
    }
    res.worst_ratio = std::max(res.worst_ratio, opnorm / ((n + 1) * nx));
  }
  return res;
}

double cstar_upper_bound(tl::Category& cat, const BlockElement& x, double p, double D_N) {
  if (p < 2.0) throw Error("cstar_upper_bound: p must be >= 2");
  BlockElement y = x;
  y.canonicalize();
  if (y.empty()) throw Error("cstar_upper_bound: x = 0");
  const double q = conjugate_exponent(p);
  return D_N * std::pow(y.top_level() + 1.0, 1.0 + 1.0 / p) * algebra::lq_norm(cat, y, q);
}

PowerSequence cstar_power_sequence(tl::Category& cat, const BlockElement& x, double p, int k_max, int level_budget) {
  if (p < 2.0) throw Error("cstar_power_sequence: p must be >= 2");
  if (level_budget > cat.max_level()) throw LevelOverflow(level_budget, cat.max_level());
  const double q = conjugate_exponent(p);
  PowerSequence out;
  const BlockElement z = algebra::convolve(cat, algebra::sharp(cat, x), x);
  const int nz = std::max(0, z.top_level());
  const BlockElement z2 = 2 * nz <= level_budget ? algebra::convolve(cat, z, z) : BlockElement{};
  BlockElement acc;
  for (int k = 1; k <= k_max; ++k) {
    if (2 * k * nz > level_budget) {
      out.budget_limited = true;
      break;
    }
    acc = k == 1 ? z2 : algebra::convolve(cat, acc, z2);
    out.a.push_back(std::pow(algebra::lq_norm(cat, acc, q), 1.0 / (4.0 * k)));
  }
  out.min_value = out.a.empty() ? 0.0 : *std::min_element(out.a.begin(), out.a.end());
  return out;
}

double reduced_norm_lower_bound(tl::Category& cat, const BlockElement& x, int K) {
  const int n = std::max(0, x.top_level());
  if (K < n) throw Error("reduced_norm_lower_bound: K must be >= n(x)");
  std::mt19937_64 rng(0x5eed);
  bool converged = false;
  return compressed_norm(cat, x, K - n, K, rng, converged);
}

std::string to_string(FamilyKind k) { return k == FamilyKind::PhiR ? "phi_r" : "r^l"; }

double phi_decay_rate(double r, int N) {
  const double x = r * N;
  if (x > 2.0) return spectral::rho(x) / spectral::rho(N);
  return 1.0 / spectral::rho(N);
}

double phi_parameter_for_rate(double s, int N) {
  const double rp = s * spectral::rho(N);
  if (rp < 1.0) throw Error("phi_parameter_for_rate: rate below 1/rho(N) is not attained by phi_r");
  return (rp + 1.0 / rp) / N;
}

WeakLpVerdict weak_lp_classify(FamilyKind family, double r, double p, int N, int n_max, int stride) {
  if (p < 2.0) throw Error("weak_lp_classify: p must be >= 2");
  if (!(r > 0 && r < 1)) throw Error("weak_lp_classify: r must lie in (0, 1)");
  if (stride < 1 || n_max < 32 * stride) throw Error("weak_lp_classify: need stride >= 1 and n_max >= 32 stride");
  WeakLpVerdict v;
  v.p = p;
  v.family = family;
  v.r = r;
  v.stride = stride;
  v.decay_rate = family == FamilyKind::Semigroup ? r : phi_decay_rate(r, N);

  // log |c_n| for the closed-form profile.
  auto log_c = [&](int n) {
    if (family == FamilyKind::Semigroup) return n * std::log(r);
    const double x = r * N;
    if (x >= 2.0) return spectral::log_chebyshev(n, x) - spectral::log_chebyshev(n, N);
    const double s = spectral::chebyshev_real(n, x);
    return std::log(std::max(std::abs(s), 1e-300)) - spectral::log_chebyshev(n, N);
  };

  // Item (2) terms: log of (n+1)^{-1} ||p_n phi||_p = (n+1)^{-1} |c_n| d_n^{2/p}.
  // Item (3) terms: log of (n+1)^{-(1+2/p)p} |c_n|^p d_n^2.
  std::vector<double> g, t;
  for (int n = 0; n <= n_max; n += stride) {
    const double ld = spectral::log_chebyshev(n, N);
    g.push_back(-std::log(n + 1.0) + log_c(n) + 2.0 / p * ld);
    t.push_back(-(p + 2.0) * std::log(n + 1.0) + p * log_c(n) + 2.0 * ld);
  }
  // Slope of the upper envelope over windows of 8 terms; the envelope absorbs
  // the oscillation of phi_r when rN < 2.
  auto tail_slope = [](const std::vector<double>& s) {
    const int w = 8;
    const int m = static_cast<int>(s.size()) - 1;
    const int a = m / 2, b = m - w;
    double ea = -std::numeric_limits<double>::infinity(), eb = ea;
    for (int i = a; i < a + w; ++i) ea = std::max(ea, s[i]);
    for (int i = b; i <= m; ++i) eb = std::max(eb, s[i]);
    return (eb - ea) / double(b - a);
  };
  v.item2_finite = tail_slope(g) <= 1e-6;
  if (v.item2_finite) v.item2_sup = std::exp(*std::max_element(g.begin(), g.end()));
  v.item3_finite = tail_slope(t) < 0.0;
  if (v.item3_finite) {
    const double top = *std::max_element(t.begin(), t.end());
    double acc = 0;
    for (double e : t) acc += std::exp(e - top);
    v.item3_norm = std::exp((top + std::log(acc)) / p);
  }
  // Item (4): r'^l phi in L_p for all r' < 1 iff the decay rate is at most the threshold.
  v.item4_all_r = v.decay_rate <= spectral::threshold(p, N) * (1 + 1e-12);
  v.weakly_lp = v.item4_all_r;
  v.coherent = (v.item2_finite == v.item4_all_r) && (v.item3_finite == v.item4_all_r);
  return v;
}

ExoticWindow exotic_window_demo(double p, double p_prime, int N) {
  if (!(p >= 2.0 && p < p_prime)) throw Error("exotic_window_demo: need 2 <= p < p'");
  ExoticWindow w;
  w.p = p;
  w.p_prime = p_prime;
  w.N = N;
  w.lower = spectral::threshold(p, N);
  w.upper = spectral::threshold(p_prime, N);
  w.r0 = 0.5 * (w.lower + w.upper);
  w.phi_parameter = phi_parameter_for_rate(w.r0, N);
  w.at_p_prime = weak_lp_classify(FamilyKind::PhiR, w.phi_parameter, p_prime, N);
  w.at_p = weak_lp_classify(FamilyKind::PhiR, w.phi_parameter, p, N);
  w.literal_at_p_prime = weak_lp_classify(FamilyKind::PhiR, w.r0, p_prime, N);
  w.literal_at_p = weak_lp_classify(FamilyKind::PhiR, w.r0, p, N);
  w.split = w.at_p_prime.weakly_lp && !w.at_p.weakly_lp;
  return w;
}

GramTestReport pd_gram_test(tl::Category& cat, const BlockElement& phi, const std::vector<BlockElement>& family,
                            double rel_tol) {
  GramTestReport rep;
  rep.m = static_cast<int>(family.size());
  const Index m = rep.m;
  cmat G(m, m);
  std::vector<BlockElement> sharps;
  for (const auto& x : family) sharps.push_back(algebra::sharp(cat, x));
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < m; ++j)
      G(i, j) = algebra::haar(cat, algebra::product(phi, algebra::convolve(cat, sharps[j], family[i])));
  rep.asymmetry = (G - G.adjoint()).cwiseAbs().maxCoeff();
  const cmat H = 0.5 * (G + G.adjoint());
  Eigen::SelfAdjointEigenSolver<cmat> es(H);
  rep.min_eigenvalue = es.eigenvalues()(0);
  rep.spectral_norm = es.eigenvalues().cwiseAbs().maxCoeff();
  rep.tolerance = rel_tol * std::max(rep.spectral_norm, std::numeric_limits<double>::min());
  rep.pass = rep.min_eigenvalue >= -rep.tolerance;
  return rep;
}

}  // namespace fqg::harmonic
