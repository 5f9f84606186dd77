#include "fqg/spectral.hpp"

#include "fqg/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fqg::spectral {

RhoData rho_data(double x) {
  if (x < 2.0) throw Error("rho(x) needs x >= 2, got " + std::to_string(x));
  return {x, 0.5 * (x + std::sqrt(x * x - 4.0))};
}

double rho(double x) { return rho_data(x).rho; }

std::int64_t chebyshev_dim(int n, int N) {
  if (n < 0) throw Error("negative level");
  if (N < 2) throw Error("chebyshev_dim needs N >= 2");
  if (n == 0) return 1;
  __int128 a = 1, b = N;
  for (int m = 1; m < n; ++m) {
    const __int128 c = __int128(N) * b - a;
    if (c > std::numeric_limits<std::int64_t>::max())
      throw DimensionOverflow("S_" + std::to_string(n) + "(" + std::to_string(N) +
                              ") overflows 64 bits; use chebyshev_real");
    a = b;
    b = c;
  }
  return static_cast<std::int64_t>(b);
}

double chebyshev_real(int n, double x) {
  if (n == 0) return 1.0;
  double a = 1.0, b = x;
  for (int m = 1; m < n; ++m) {
    const double c = x * b - a;
    a = b;
    b = c;
  }
  return b;
}

double chebyshev_closed_form(int n, double x) {
  const double r = rho(x);
  return (std::pow(r, n + 1) - std::pow(r, -n - 1)) / (r - 1.0 / r);
}

double log_chebyshev(int n, double x) {
  if (x == 2.0) return std::log(n + 1.0);
  const double r = rho(x);
  // S_n = rho^n (1 - rho^{-2n-2}) / (1 - rho^{-2})
  return n * std::log(r) + std::log1p(-std::pow(r, -2.0 * n - 2.0)) - std::log1p(-1.0 / (r * r));
}

double chebyshev_ratio(int n, double r, int N) {
  const double x = r * N;
  if (x >= 2.0) return std::exp(log_chebyshev(n, x) - log_chebyshev(n, N));
  return chebyshev_real(n, x) * std::exp(-log_chebyshev(n, N));
}

double threshold(double p, int N) {
  if (p < 1.0) throw Error("threshold needs p >= 1");
  if (std::isinf(p)) return 1.0;
  return std::pow(rho(N), -2.0 / p);
}

std::vector<int> fusion_range(int n, int k) {
  std::vector<int> out;
  for (int l = std::abs(n - k); l <= n + k; l += 2) out.push_back(l);
  return out;
}

bool fuses(int l, int n, int k) {
  return l >= std::abs(n - k) && l <= n + k && (n + k - l) % 2 == 0;
}

double dim_ratio_lhs(int n, int k, int l, int N) {
  if (!fuses(l, n, k))
    throw Error("dim_ratio_lhs: " + std::to_string(l) + " is not in " + std::to_string(n) + " (x) " + std::to_string(k));
  const int r = (n + k - l) / 2;
  auto d = [N](int m) { return chebyshev_real(m, N); };
  double prod = 1.0 / d(r);
  for (int s = 1; s <= r; ++s)
    prod *= d(s) * d(n - r + s - 1) * d(k - r + s - 1) / (d(l + s) * d(s - 1) * d(s - 1));
  return prod;
}

double dim_ratio_normalized(int n, int k, int l, int N) {
  auto d = [N](int m) { return chebyshev_real(m, N); };
  return dim_ratio_lhs(n, k, l, N) / std::sqrt(d(l) / (d(n) * d(k)));
}

double empirical_dim_constant(int max_level, int N) {
  double sup = 0;
  for (int n = 0; n <= max_level; ++n)
    for (int k = 0; k <= max_level; ++k)
      for (int l : fusion_range(n, k)) sup = std::max(sup, dim_ratio_normalized(n, k, l, N));
  return sup;
}

std::string to_string(SeriesVerdict v) {
  switch (v) {
    case SeriesVerdict::Converges: return "Converges";
    case SeriesVerdict::Diverges: return "Diverges";
    case SeriesVerdict::Boundary: return "Boundary";
  }
  return "?";
}

SeriesClassification series_classify(double r, double p, int N, int n_max, double delta) {
  if (!(r > 0 && r < 1)) throw Error("series_classify needs 0 < r < 1");
  if (n_max < 1) throw Error("series_classify needs n_max >= 1");
  SeriesClassification out;
  out.threshold = threshold(p, N);
  if (std::abs(r - out.threshold) < delta) out.analytic = SeriesVerdict::Boundary;
  else out.analytic = r < out.threshold ? SeriesVerdict::Converges : SeriesVerdict::Diverges;

  const double lr = p * std::log(r);
  double acc = -std::numeric_limits<double>::infinity();
  out.log_partial_sums.reserve(n_max + 1);
  for (int n = 0; n <= n_max; ++n) {
    const double term = lr * n + 2.0 * log_chebyshev(n, N);
    const double hi = std::max(acc, term);
    acc = hi + std::log(std::exp(acc - hi) + std::exp(term - hi));
    out.log_partial_sums.push_back(acc);
  }
  out.tail_ratio = std::exp(lr + 2.0 * (log_chebyshev(n_max + 1, N) - log_chebyshev(n_max, N)));
  out.empirical = out.tail_ratio < 1.0 ? SeriesVerdict::Converges : SeriesVerdict::Diverges;
  return out;
}

}  // namespace fqg::spectral
