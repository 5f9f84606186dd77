#include "fqg/unitary.hpp"

#include "fqg/linalg.hpp"
#include "fqg/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace fqg::unitary {

using linalg::first_slab;
using linalg::kron_left_apply;
using linalg::kron_right_apply;

namespace {

Index ipow(Index b, int e) {
  Index r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

}  // namespace

void validate_word(const Word& g) {
  for (char c : g)
    if (c != 'u' && c != 'U') throw Error("invalid word '" + g + "': letters must be 'u' or 'U'");
}

char conj_letter(char c) { return c == 'u' ? 'U' : 'u'; }

Word bar(const Word& g) {
  Word out(g.rbegin(), g.rend());
  for (char& c : out) c = conj_letter(c);
  return out;
}

bool is_alternating(const Word& g) {
  for (std::size_t i = 1; i < g.size(); ++i)
    if (g[i] == g[i - 1]) return false;
  return true;
}

Word alternating(int n) {
  Word g;
  for (int i = 0; i < n; ++i) g.push_back(i % 2 ? 'U' : 'u');
  return g;
}

std::vector<Word> words_of_length(int n) {
  std::vector<Word> out;
  for (Index m = 0; m < ipow(2, n); ++m) {
    Word g(n, 'u');
    for (int i = 0; i < n; ++i)
      if ((m >> (n - 1 - i)) & 1) g[i] = 'U';
    out.push_back(g);
  }
  return out;
}

std::vector<FusionTerm> fusion_decompose(const Word& g, const Word& h) {
  validate_word(g);
  validate_word(h);
  std::vector<FusionTerm> out;
  const std::size_t rmax = std::min(g.size(), h.size());
  for (std::size_t r = 0; r <= rmax; ++r) {
    const Word tau = g.substr(g.size() - r);
    if (h.compare(0, r, bar(tau)) != 0) break;
    const Word gp = g.substr(0, g.size() - r), hp = h.substr(r);
    out.push_back({gp + hp, tau, gp, hp});
  }
  return out;
}

std::int64_t dim_word(const Word& g, int N) {
  validate_word(g);
  static std::mutex mu;
  static std::map<std::pair<Word, int>, std::int64_t> memo;
  if (g.empty()) return 1;
  if (g.size() == 1) return N;
  {
    std::lock_guard lock(mu);
    if (auto it = memo.find({g, N}); it != memo.end()) return it->second;
  }
  // d_{g0} d_x = sum over gamma in g0 (x) x, and gamma = g is the top term.
  const Word g0 = g.substr(0, g.size() - 1), x = g.substr(g.size() - 1);
  __int128 d = __int128(dim_word(g0, N)) * N;
  for (const auto& t : fusion_decompose(g0, x))
    if (t.gamma != g) d -= dim_word(t.gamma, N);
  if (d > std::numeric_limits<std::int64_t>::max()) throw DimensionOverflow("dim of word " + g + " overflows 64 bits");
  std::lock_guard lock(mu);
  memo[{g, N}] = static_cast<std::int64_t>(d);
  return static_cast<std::int64_t>(d);
}

void WordElement::accumulate(const Word& g, const cmat& m) {
  auto it = blocks.find(g);
  if (it == blocks.end()) blocks.emplace(g, m);
  else it->second += m;
}

int WordElement::max_length() const {
  int m = -1;
  for (const auto& [g, b] : blocks) m = std::max(m, static_cast<int>(g.size()));
  return m;
}

WordElement operator+(const WordElement& a, const WordElement& b) {
  WordElement out = a;
  for (const auto& [g, m] : b.blocks) out.accumulate(g, m);
  return out;
}

double max_abs_diff(const WordElement& a, const WordElement& b) {
  WordElement c = a;
  for (const auto& [g, m] : b.blocks) c.accumulate(g, -m);
  double d = 0;
  for (const auto& [g, m] : c.blocks) d = std::max(d, m.cwiseAbs().maxCoeff());
  return d;
}

WordCategory::WordCategory(int N, int max_length) : N_(N), max_length_(max_length) {
  if (N < 2) throw Error("WordCategory needs N >= 2");
  if (max_length < 0) throw Error("WordCategory needs max_length >= 0");
}

void WordCategory::require(const Word& g) const {
  validate_word(g);
  if (static_cast<int>(g.size()) > max_length_) throw LevelOverflow(static_cast<int>(g.size()), max_length_);
}

Index WordCategory::dim(const Word& g) { return dim_word(g, N_); }

std::vector<int> WordCategory::junctions(const Word& g) {
  std::vector<int> out;
  for (std::size_t i = 0; i + 1 < g.size(); ++i)
    if (g[i] != g[i + 1]) out.push_back(static_cast<int>(i));
  return out;
}

cmat WordCategory::cup_insertion(int length, int pos) const {
  const Index left = ipow(N_, pos), right = ipow(N_, length - 2 - pos);
  cmat C = cmat::Zero(ipow(N_, length), left * right);
  const double c = 1.0 / std::sqrt(double(N_));
  for (Index I = 0; I < left; ++I)
    for (Index a = 0; a < N_; ++a)
      for (Index K = 0; K < right; ++K) C(((I * N_ + a) * N_ + a) * right + K, I * right + K) = c;
  return C;
}

cvec WordCategory::nested_cups(int r) const {
  cvec T = cvec::Ones(1);
  const double c = 1.0 / std::sqrt(double(N_));
  for (int s = 0; s < r; ++s) {
    const Index m = T.size();
    cvec next = cvec::Zero(m * N_ * N_);
    for (Index a = 0; a < N_; ++a)
      for (Index i = 0; i < m; ++i) next((a * m + i) * N_ + a) = c * T(i);
    T = next;
  }
  return T;
}

const cmat& WordCategory::projection(const Word& g) {
  basis(g);
  std::lock_guard lock(mu_);
  return proj_.at(g);
}

const cmat& WordCategory::basis(const Word& g) {
  require(g);
  std::lock_guard lock(mu_);
  if (auto it = basis_.find(g); it != basis_.end()) return it->second;
  const int l = static_cast<int>(g.size());
  const Index A = ipow(N_, l);
  cmat B;
  const auto js = junctions(g);
  if (js.empty()) {
    B = cmat::Identity(A, A);
  } else {
    cmat H = cmat::Zero(A, A);
    for (int pos : js) {
      const cmat C = cup_insertion(l, pos);
      H.noalias() += C * C.adjoint();
    }
    B = linalg::psd_nullspace(H, 1e-8);
    linalg::fix_column_phases(B);
  }
  if (B.cols() != dim(g))
    throw InvariantViolation("colored projection for " + g + " has rank " + std::to_string(B.cols()) + ", expected " +
                             std::to_string(dim(g)));
  proj_[g] = B * B.adjoint();
  return basis_.emplace(g, std::move(B)).first->second;
}

const cmat& WordCategory::isometry(const Word& gamma, const Word& g, const Word& h) {
  require(g);
  require(h);
  require(gamma);
  std::lock_guard lock(mu_);
  const auto key = std::make_tuple(gamma, g, h);
  if (auto it = iso_.find(key); it != iso_.end()) return it->second;
  const auto terms = fusion_decompose(g, h);
  auto t = std::find_if(terms.begin(), terms.end(), [&](const FusionTerm& f) { return f.gamma == gamma; });
  if (t == terms.end()) throw Error(gamma + " is not contained in " + g + " (x) " + h);
  const int r = static_cast<int>(t->tau.size());
  const Index left = ipow(N_, static_cast<int>(t->g_prime.size()));
  const Index right = ipow(N_, static_cast<int>(t->h_prime.size()));
  const cvec T = nested_cups(r);
  const Index mid = T.size();
  const cmat& Bgam = basis(gamma);
  // (id_{g'} (x) T_r (x) id_{h'}) B_gamma in ambient g (x) h coordinates.
  cmat W = cmat::Zero(left * mid * right, Bgam.cols());
  for (Index I = 0; I < left; ++I)
    for (Index m = 0; m < mid; ++m) {
      if (T(m) == cplx(0)) continue;
      for (Index K = 0; K < right; ++K) W.row((I * mid + m) * right + K) = T(m) * Bgam.row(I * right + K);
    }
  const cmat& Bg = basis(g);
  const cmat& Bh = basis(h);
  const Index Ag = Bg.rows();
  cmat Z = kron_left_apply(Bg.adjoint(), Bh.cols(), kron_right_apply(Ag, Bh.adjoint(), W));
  Z = linalg::polar_isometry(Z);
  linalg::fix_global_phase(Z);
  return iso_.emplace(key, std::move(Z)).first->second;
}

ProjectionReport validate_projection(WordCategory& cat, const Word& g, double tol) {
  ProjectionReport rep;
  rep.g = g;
  rep.expected_rank = dim_word(g, cat.N());
  const cmat& P = cat.projection(g);
  rep.hermitian = (P - P.adjoint()).cwiseAbs().maxCoeff();
  rep.idempotency = (P * P - P).cwiseAbs().maxCoeff();
  Eigen::SelfAdjointEigenSolver<cmat> es(0.5 * (P + P.adjoint()));
  rep.rank = (es.eigenvalues().array() > 0.5).count();
  for (int pos : WordCategory::junctions(g))
    rep.cup_annihilation =
        std::max(rep.cup_annihilation, (P * cat.cup_insertion(static_cast<int>(g.size()), pos)).cwiseAbs().maxCoeff());
  rep.pass = rep.hermitian <= tol && rep.idempotency <= tol && rep.cup_annihilation <= tol &&
             rep.rank == rep.expected_rank;
  return rep;
}

WordCompleteness word_completeness(WordCategory& cat, const Word& g, const Word& h) {
  WordCompleteness rep;
  const Index D = cat.dim(g) * cat.dim(h);
  cmat S = cmat::Zero(D, D);
  for (const auto& t : fusion_decompose(g, h)) {
    const cmat& V = cat.isometry(t.gamma, g, h);
    S.noalias() += V * V.adjoint();
    rep.isometry =
        std::max(rep.isometry, (V.adjoint() * V - cmat::Identity(V.cols(), V.cols())).cwiseAbs().maxCoeff());
  }
  rep.completeness = (S - cmat::Identity(D, D)).cwiseAbs().maxCoeff();
  return rep;
}

WordElement random_word_element(WordCategory& cat, const std::vector<Word>& support, std::mt19937_64& rng) {
  WordElement x;
  for (const auto& g : support) x.blocks[g] = linalg::random_gaussian(cat.dim(g), cat.dim(g), rng);
  return x;
}

WordElement word_unit(WordCategory&) {
  WordElement x;
  x.blocks.emplace(Word{}, cmat::Identity(1, 1));
  return x;
}

WordElement word_convolve(WordCategory& cat, const WordElement& x, const WordElement& y) {
  WordElement out;
  for (const auto& [g, xg] : x.blocks)
    for (const auto& [h, yh] : y.blocks)
      for (const auto& t : fusion_decompose(g, h)) {
        if (static_cast<int>(t.gamma.size()) > cat.max_length())
          throw LevelOverflow(static_cast<int>(t.gamma.size()), cat.max_length());
        const cmat& V = cat.isometry(t.gamma, g, h);
        const Index dg = cat.dim(g), dh = cat.dim(h), dgam = cat.dim(t.gamma);
        const cmat XV = kron_left_apply(xg, dh, kron_right_apply(dg, yh, V));
        out.accumulate(t.gamma, (double(dg) * double(dh) / double(dgam)) * (V.adjoint() * XV));
      }
  return out;
}

WordElement word_convolve_left_adjoint(WordCategory& cat, const WordElement& x, const WordElement& z, int max_len) {
  WordElement out;
  for (const auto& [g, xg] : x.blocks)
    for (int lh = 0; lh <= max_len; ++lh)
      for (const auto& h : words_of_length(lh))
        for (const auto& t : fusion_decompose(g, h)) {
          auto it = z.blocks.find(t.gamma);
          if (it == z.blocks.end()) continue;
          const cmat& V = cat.isometry(t.gamma, g, h);
          const Index dh = cat.dim(h);
          const cmat C = kron_left_apply(xg.adjoint(), dh, V * it->second);
          cmat acc = cmat::Zero(dh, dh);
          for (Index a = 0; a < cat.dim(g); ++a) acc.noalias() += first_slab(C, dh, a) * first_slab(V, dh, a).adjoint();
          out.accumulate(h, double(cat.dim(g)) * acc);
        }
  return out;
}

double word_lq_norm(WordCategory& cat, const WordElement& x, double q) {
  double acc = 0;
  for (const auto& [g, b] : x.blocks) acc += double(cat.dim(g)) * std::pow(linalg::schatten_norm(b, q), q);
  return std::pow(acc, 1.0 / q);
}

cplx word_inner(WordCategory& cat, const WordElement& x, const WordElement& y) {
  cplx s = 0;
  for (const auto& [g, a] : x.blocks)
    if (auto it = y.blocks.find(g); it != y.blocks.end()) s += double(cat.dim(g)) * (a.adjoint() * it->second).trace();
  return s;
}

namespace {

struct WordLayout {
  std::vector<Word> words;
  std::vector<Index> offsets{0};
};

WordLayout layout_up_to(WordCategory& cat, int K) {
  WordLayout L;
  for (int l = 0; l <= K; ++l)
    for (const auto& g : words_of_length(l)) {
      L.words.push_back(g);
      L.offsets.push_back(L.offsets.back() + cat.dim(g) * cat.dim(g));
    }
  return L;
}

cvec pack(WordCategory& cat, const WordElement& y, const WordLayout& L) {
  cvec v = cvec::Zero(L.offsets.back());
  for (std::size_t i = 0; i < L.words.size(); ++i)
    if (auto it = y.blocks.find(L.words[i]); it != y.blocks.end())
      v.segment(L.offsets[i], it->second.size()) =
          std::sqrt(double(cat.dim(L.words[i]))) * Eigen::Map<const cvec>(it->second.data(), it->second.size());
  return v;
}

WordElement unpack(WordCategory& cat, const cvec& v, const WordLayout& L) {
  WordElement y;
  for (std::size_t i = 0; i < L.words.size(); ++i) {
    const Index d = cat.dim(L.words[i]);
    y.blocks.emplace(L.words[i], Eigen::Map<const cmat>(v.data() + L.offsets[i], d, d) / std::sqrt(double(d)));
  }
  return y;
}

}  // namespace

WordRDReport word_rd_scan(WordCategory& cat, double q, int max_length, int trials, std::uint64_t seed) {
  if (!(q >= 1.0 && q <= 2.0)) throw Error("word_rd_scan: q must lie in [1, 2]");
  // Isometries into H_g (x) H_h live on words of length l(g) + l(h).
  if (2 * max_length > cat.max_length()) throw LevelOverflow(2 * max_length, cat.max_length());
  WordRDReport rep;
  rep.q = q;
  rep.max_length = max_length;
  rep.trials = trials;
  rep.seed = seed;
  std::uint64_t cell_id = 0;
  std::vector<Word> all;
  for (int l = 0; l <= max_length; ++l)
    for (const auto& g : words_of_length(l)) all.push_back(g);
  for (const auto& g : all)
    for (const auto& h : all)
      for (const auto& t : fusion_decompose(g, h)) {
        if (static_cast<int>(t.gamma.size()) > max_length) continue;
        const std::uint64_t cs = linalg::derive_seed(seed, cell_id++);
        WordRDCell c{t.gamma, g, h, 1.0, 1.0};
        if (!g.empty() && !h.empty()) {
          const double dg = double(cat.dim(g)), dh = double(cat.dim(h)), dgam = double(cat.dim(t.gamma));
          const double f = harmonic::lq_ratio_factor(dg, dh, dgam, q);
          const cmat& V = cat.isometry(t.gamma, g, h);
          c.ratio = f * harmonic::max_bilinear_ratio(V, cat.dim(g), cat.dim(h), q, trials, cs);
          const double extra =
              f * harmonic::max_bilinear_ratio(V, cat.dim(g), cat.dim(h), q, trials, linalg::derive_seed(cs, 0xd0b1e));
          c.ratio_doubled = std::max(c.ratio, extra);
        }
        rep.empirical_local_constant = std::max(rep.empirical_local_constant, c.ratio);
        rep.empirical_local_constant_doubled = std::max(rep.empirical_local_constant_doubled, c.ratio_doubled);
        rep.max_cell_change = std::max(rep.max_cell_change, (c.ratio_doubled - c.ratio) / c.ratio);
        rep.cells.push_back(c);
      }
  // Length-graded operator norms at q = 2 on the truncation to lengths <= max_length - n.
  for (int n = 0; n <= max_length; ++n) {
    const int K = max_length - n;
    const WordLayout L = layout_up_to(cat, K);
    std::mt19937_64 rng(linalg::derive_seed(seed, 0x910ba1 + static_cast<std::uint64_t>(n)));
    const WordElement x = random_word_element(cat, words_of_length(n), rng);
    std::function<cvec(const cvec&)> op = [&](const cvec& v) {
      return pack(cat, word_convolve_left_adjoint(cat, x, word_convolve(cat, x, unpack(cat, v, L)), K), L);
    };
    const cvec start = linalg::random_gaussian(L.offsets.back(), 1, rng).col(0);
    const auto lr = linalg::lanczos<cvec>(op, start, std::min<int>(60, static_cast<int>(L.offsets.back())), 1e-10);
    rep.global_ratios.emplace_back(n, std::sqrt(std::max(0.0, lr.lambda_max)) / ((n + 1) * word_lq_norm(cat, x, 2.0)));
  }
  return rep;
}

EvenSeriesVerdict even_series_classify(double r, double p, int N, int n_max, int full_max_length) {
  if (!(r > 0 && r < 1)) throw Error("even_series_classify needs 0 < r < 1");
  if (full_max_length > 26) throw Error("even_series_classify: full monoid enumeration capped at length 26");
  EvenSeriesVerdict v;
  v.threshold = spectral::threshold(p, N);
  if (std::abs(r - v.threshold) < 1e-6) v.analytic = spectral::SeriesVerdict::Boundary;
  else v.analytic = r < v.threshold ? spectral::SeriesVerdict::Converges : spectral::SeriesVerdict::Diverges;
  // Even terms r^{2np} S_{2n}(N)^2.
  auto log_term = [&](int n) { return 2.0 * n * p * std::log(r) + 2.0 * spectral::log_chebyshev(2 * n, N); };
  v.tail_ratio = std::exp(log_term(n_max + 1) - log_term(n_max));
  v.empirical = v.tail_ratio < 1.0 ? spectral::SeriesVerdict::Converges : spectral::SeriesVerdict::Diverges;

  // Depth-first walk of the free monoid with dim(gx) = N dim(g) - [last(g) = conj(x)] dim(g minus last).
  std::vector<double> by_length(full_max_length + 1, 0.0);
  struct Frame {
    double d, d_parent;
    char last;
    int len;
  };
  std::vector<Frame> stack{{1.0, 0.0, 0, 0}};
  while (!stack.empty()) {
    const Frame f = stack.back();
    stack.pop_back();
    by_length[f.len] += f.d * f.d;
    if (f.len == full_max_length) continue;
    for (char x : {'u', 'U'}) {
      const double d = N * f.d - (f.last == conj_letter(x) ? f.d_parent : 0.0);
      stack.push_back({d, f.d, x, f.len + 1});
    }
  }
  double acc = 0;
  double prev = -1;
  v.full_blow_up = true;
  for (int l = 0; l <= full_max_length; ++l) {
    const double c = std::pow(r, l * p) * by_length[l];
    acc += c;
    v.full_partial_sums.push_back(acc);
    if (l > 0 && !(c > prev)) v.full_blow_up = false;
    prev = c;
  }
  return v;
}

UnitaryExoticWindow unitary_exotic_window(double p, double p_prime, int N) {
  if (!(p >= 2.0 && p < p_prime)) throw Error("unitary_exotic_window: need 2 <= p < p'");
  UnitaryExoticWindow w;
  w.p = p;
  w.p_prime = p_prime;
  w.N = N;
  w.r0 = 0.5 * (spectral::threshold(p, N) + spectral::threshold(p_prime, N));
  w.phi_parameter = harmonic::phi_parameter_for_rate(w.r0, N);
  // Supported on the words (u U)^n, with dim = S_{2n}(N) and length 2n.
  w.at_p_prime = harmonic::weak_lp_classify(harmonic::FamilyKind::PhiR, w.phi_parameter, p_prime, N, 400, 2);
  w.at_p = harmonic::weak_lp_classify(harmonic::FamilyKind::PhiR, w.phi_parameter, p, N, 400, 2);
  w.split = w.at_p_prime.weakly_lp && !w.at_p.weakly_lp;
  return w;
}

}  // namespace fqg::unitary
