#pragma once

#include "fqg/algebra.hpp"
#include "fqg/intertwiners.hpp"

#include <optional>
#include <vector>

namespace fqg::trace {

using algebra::BlockElement;

// omega_ij = (1/N) omega_{e_ji}; returns max-abs deviation of
// sum omega_ij * omega_ij^# and sum omega_ij^# * omega_ij from N p_0.
struct GeneratorSumReport {
  double left = 0;
  double right = 0;
};
GeneratorSumReport generator_sum(tl::Category& cat);

// (1/2N) sum_ij (omega_ij * x * omega_ij^# + omega_ij^# * x * omega_ij), via convolve and sharp.
BlockElement phi(tl::Category& cat, const BlockElement& x);

// Phi in Kraus form: Phi(x)_m = (d_n / (N d_m)) sum_G G* x_n G over the
// channels n -> m in {n-2, n, n+2}. Targets outside [n_min, target_max] are
// dropped (absorbing boundary). The n -> n channel pair is orthonormalized from
// the two attachment orders so that no level above n is needed.
class KrausPhi {
 public:
  KrausPhi(tl::Category& cat, int n_min, int n_max, int target_max);

  BlockElement apply(const BlockElement& x) const;

  int n_min() const { return n_min_; }
  int n_max() const { return n_max_; }
  bool real_arithmetic() const { return real_; }

  // Flattened L_2-orthonormal coordinates over the domain levels (block n scaled by sqrt(d_n)).
  Index coordinate_dim() const { return offsets_.back(); }
  template <class Vec>
  Vec apply_coordinates(const Vec& v) const;
  // Restricted to target levels > n_max (the dropped coupling), and its adjoint.
  template <class Vec>
  Vec apply_dropped(const Vec& v) const;
  template <class Vec>
  Vec apply_dropped_adjoint(const Vec& v) const;
  Index dropped_dim() const { return dropped_offsets_.empty() ? 0 : dropped_offsets_.back(); }

 private:
  struct Term {
    int n, m;
    double coef;
    cmat G;
    rmat Gr;
  };
  void add_channel(tl::Category& cat, int n, int m);
  template <class Vec>
  Vec apply_impl(const Vec& v, bool dropped, bool adjoint) const;

  int N_, n_min_, n_max_, target_max_;
  bool real_ = false;
  std::vector<Index> dims_;
  std::vector<Term> terms_;
  std::vector<Index> offsets_;
  std::vector<Index> dropped_offsets_;
};

struct L20NormReport {
  int K = 0;
  double norm = 0;
  double lambda_max = 0, lambda_min = 0;
  double residual = 0;
  int iterations = 0;
  bool converged = false;
  bool real_arithmetic = false;
  std::optional<double> dropped_coupling;  // operator norm of the part mapping into levels K+1, K+2
  double seconds = 0;
};
L20NormReport phi_l20_norm(tl::Category& cat, int K, std::uint64_t seed = 7, bool with_dropped = true);

struct L1Report {
  double max_ratio = 0;
  double unit_ratio = 0;
  double hermiticity = 0;  // max-abs of Phi(x*) - Phi(x)*
  int trials = 0;
};
L1Report phi_l1_check(tl::Category& cat, int trials, std::uint64_t seed, int max_level = 3);

double interpolated_bound(double q, double C_N);

struct IterationTrace {
  std::vector<double> norms;         // ||z_k||_q, k = 0..k_max
  std::vector<double> upper_bounds;  // D_N (n(x)+2k+1)^{1+1/p} ||z_k||_q
  std::vector<int> support_top;      // n(z_k) as computed
  std::vector<bool> exact;           // no mass has reached the absorbing boundary
  double fitted_rate = 0;
  bool strictly_decreasing_after_3 = false;
  bool truncated = false;
  int K = 0;
};
IterationTrace iterate_to_haar(tl::Category& cat, const BlockElement& x, double p, int k_max, double D_N,
                               int K);

}  // namespace fqg::trace
