#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fqg::spectral {

struct RhoData {
  double N;
  double rho;
};

// rho > 1 with rho + 1/rho = x, for x >= 2.
RhoData rho_data(double x);
double rho(double x);

// S_n(N) exactly in 64 bits; throws DimensionOverflow past 2^63.
std::int64_t chebyshev_dim(int n, int N);
// S_n(x) by the three-term recursion in doubles. x may be below 2 (oscillatory regime).
double chebyshev_real(int n, double x);
// (rho^{n+1} - rho^{-n-1}) / (rho - rho^{-1}) for x > 2.
double chebyshev_closed_form(int n, double x);
// log S_n(x) for x >= 2 without overflow.
double log_chebyshev(int n, double x);
// S_n(rN) / S_n(N), stable for large n.
double chebyshev_ratio(int n, double r, int N);

double threshold(double p, int N);

std::vector<int> fusion_range(int n, int k);
bool fuses(int l, int n, int k);

// (1/d_r) prod_{s=1}^r d_s d_{n-r+s-1} d_{k-r+s-1} / (d_{l+s} d_{s-1}^2), r = (n+k-l)/2.
double dim_ratio_lhs(int n, int k, int l, int N);
// dim_ratio_lhs / (d_l / (d_n d_k))^{1/2}
double dim_ratio_normalized(int n, int k, int l, int N);
// sup of dim_ratio_normalized over n, k <= max_level and all admissible l.
double empirical_dim_constant(int max_level, int N);

enum class SeriesVerdict { Converges, Diverges, Boundary };
std::string to_string(SeriesVerdict v);

struct SeriesClassification {
  SeriesVerdict analytic = SeriesVerdict::Boundary;
  SeriesVerdict empirical = SeriesVerdict::Boundary;
  double threshold = 0;
  double tail_ratio = 0;                 // r^p S_{n+1}^2 / S_n^2 at n_max
  std::vector<double> log_partial_sums;  // log sum_{m<=n} r^{pm} S_m(N)^2
};

// Series sum_n r^{pn} S_n(N)^2.
SeriesClassification series_classify(double r, double p, int N, int n_max, double delta = 1e-6);

}  // namespace fqg::spectral
