#pragma once

#include "fqg/types.hpp"

#include <functional>
#include <random>
#include <vector>

namespace fqg::linalg {

cmat kron(const cmat& a, const cmat& b);

// (A (x) I_db) X, rows of X indexed by i*db + j.
cmat kron_left_apply(const cmat& A, Index db, const cmat& X);
// (I_da (x) B) X.
cmat kron_right_apply(Index da, const cmat& B, const cmat& X);

using StridedMap = Eigen::Map<const cmat, 0, Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>>;
// Rows (a, b) of V for fixed b, as a d_a x cols matrix (V has d_a * d_b rows).
StridedMap second_slab(const cmat& V, Index db, Index b);
// Rows (a, b) of V for fixed a, as a d_b x cols matrix.
inline auto first_slab(const cmat& V, Index db, Index a) { return V.middleRows(a * db, db); }

rvec singular_values(const cmat& x);
// Schatten q-norm; q = +inf gives the operator norm.
double schatten_norm(const cmat& x, double q);
double schatten_norm_from_sv(const rvec& sv, double q);

// Polar part Z (Z*Z)^{-1/2}; throws InvariantViolation if Z is rank deficient.
cmat polar_isometry(const cmat& Z, double rank_tol = 1e-8);
// Scale every column's phase so that the first entry of largest modulus in
// column 0 is real positive (one global phase for the whole matrix).
void fix_global_phase(cmat& V);
// Same convention applied column by column.
void fix_column_phases(cmat& V);

// Orthonormal basis of the nullspace of a positive semidefinite H (eigenvalues below tol).
cmat psd_nullspace(const cmat& H, double tol);

cmat random_gaussian(Index rows, Index cols, std::mt19937_64& rng);
// splitmix64-based derivation of independent per-trial seeds.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

// Extreme eigenvalues of a self-adjoint operator on R^n or C^n given as a matvec.
struct LanczosResult {
  double lambda_max = 0;
  double lambda_min = 0;
  double residual = 0;  // residual norm of the Ritz pair attaining max |lambda|
  int iterations = 0;
  bool converged = false;
};

template <class Vec>
LanczosResult lanczos(const std::function<Vec(const Vec&)>& op, Vec start, int max_iter, double tol);

double max_abs(const LanczosResult& r);

}  // namespace fqg::linalg
