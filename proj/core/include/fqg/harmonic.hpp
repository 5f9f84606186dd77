#pragma once

#include "fqg/algebra.hpp"
#include "fqg/intertwiners.hpp"
#include "fqg/spectral.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace fqg::harmonic {

using algebra::BlockElement;

// max over trials of ||sum_ij x_ij (x) y_ij||_q / (||x||_q ||y||_q),
// x in B(H (x) l2(d)), y in B(l2(d) (x) K), Gaussian draws.
double schatten_contraction_trial(Index dH, Index d, Index dK, double q, int trials, std::uint64_t seed);
// The bilinear map itself.
cmat schatten_contraction(const cmat& x, const cmat& y, Index dH, Index d, Index dK);

// Maximizes ||V*(x (x) y)V||_{S_q} / (||x||_{S_q} ||y||_{S_q}) over x, y by random
// starts followed by alternating power steps with Schatten duality maps.
// Returns the best raw Schatten ratio found (a lower bound for the true max).
double max_bilinear_ratio(const cmat& V, Index dn, Index dk, double q, int trials, std::uint64_t seed,
                          int power_steps = 25);
// Converts the raw Schatten ratio into the L_q ratio ||p_l(x*y)||_q / (||x||_q ||y||_q).
double lq_ratio_factor(double dn, double dk, double dl, double q);

struct RDCell {
  int n, k, l;
  double ratio;          // trials T
  double ratio_doubled;  // trials 2T
};

struct RDReport {
  double q = 2;
  int max_level = 0;
  int trials = 0;
  std::uint64_t seed = 0;
  std::vector<RDCell> cells;
  double empirical_local_constant = 0;          // max over cells at T trials
  double empirical_local_constant_doubled = 0;  // at 2T trials
  double max_cell_change = 0;                   // max relative per-cell change under doubling
};
RDReport local_rd_scan(tl::Category& cat, double q, int max_level, int trials, std::uint64_t seed);

struct GlobalRDResult {
  int n = 0;
  int K = 0;
  int out_max = 0;
  // max over trials of ||P_{<= out_max} L_x P_{<= K}||_{q->q} / ((n+1) ||x||_q), a lower bound for R(n)
  double worst_ratio = 0;
  bool exact_operator_norm = false;  // q = 2 and Lanczos converged: exact norm of the compression
};
// Compression of y -> x * y to domain levels <= K and range levels <= out_max (default n + K).
// q = 2 gives the exact norm of the compression; other q use Boyd power iterations (lower bounds).
GlobalRDResult global_rd_estimate(tl::Category& cat, int n, double q, int K, int trials, std::uint64_t seed,
                                  int out_max = -1);

double cstar_upper_bound(tl::Category& cat, const BlockElement& x, double p, double D_N);

struct PowerSequence {
  std::vector<double> a;  // a_k, k = 1..
  bool budget_limited = false;
  double min_value = 0;
};
PowerSequence cstar_power_sequence(tl::Category& cat, const BlockElement& x, double p, int k_max, int level_budget);

// Norm of the left regular representation compressed to domain levels <= K - n(x), range levels <= K.
double reduced_norm_lower_bound(tl::Category& cat, const BlockElement& x, int K);

enum class FamilyKind { PhiR, Semigroup };
std::string to_string(FamilyKind k);

struct WeakLpVerdict {
  double p = 2;
  FamilyKind family = FamilyKind::Semigroup;
  double r = 0;
  int stride = 1;
  double decay_rate = 0;  // asymptotic per-level ratio of the profile
  std::optional<double> item2_sup;   // nullopt = infinite
  std::optional<double> item3_norm;  // nullopt = infinite
  bool item2_finite = false;
  bool item3_finite = false;
  bool item4_all_r = false;
  bool weakly_lp = false;
  bool coherent = false;  // the three items agree
};
// stride = 2 keeps only the even levels (the even-word subgroup of the unitary layer).
WeakLpVerdict weak_lp_classify(FamilyKind family, double r, double p, int N, int n_max = 400, int stride = 1);

// Decay rate s(r) = rho(rN)/rho(N) for rN > 2, 1/rho(N) for rN <= 2.
double phi_decay_rate(double r, int N);
// Parameter r with phi_decay_rate(r, N) = s (needs s rho(N) >= 1).
double phi_parameter_for_rate(double s, int N);

struct ExoticWindow {
  double p = 0, p_prime = 0;
  int N = 0;
  double lower = 0, upper = 0;  // threshold(p), threshold(p')
  double r0 = 0;                // window midpoint
  double phi_parameter = 0;     // r with decay rate r0
  WeakLpVerdict at_p_prime;
  WeakLpVerdict at_p;
  // Diagnostic: phi_{r0} taken literally.
  WeakLpVerdict literal_at_p_prime;
  WeakLpVerdict literal_at_p;
  bool split = false;  // (weakly L_{p'}, not weakly L_p)
};
ExoticWindow exotic_window_demo(double p, double p_prime, int N);

struct GramTestReport {
  int m = 0;
  double min_eigenvalue = 0;
  double spectral_norm = 0;
  double tolerance = 0;
  double asymmetry = 0;
  bool pass = false;
};
GramTestReport pd_gram_test(tl::Category& cat, const BlockElement& phi, const std::vector<BlockElement>& family,
                            double rel_tol = 1e-8);

}  // namespace fqg::harmonic
