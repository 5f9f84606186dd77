#include "fqg/algebra.hpp"
#include "fqg/trace_rigidity.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace fqg;
using namespace fqg::algebra;

namespace {

double max_abs(const BlockElement& x) {
  double m = 0;
  for (const auto& [n, b] : x.blocks) m = std::max(m, b.cwiseAbs().maxCoeff());
  return m;
}

// Dense matrix of Phi on levels lo..hi through the convolution route, in
// L_2-orthonormal coordinates, with outputs outside lo..hi discarded.
rmat dense_phi(tl::Category& cat, int lo, int hi) {
  std::vector<Index> off{0};
  for (int n = lo; n <= hi; ++n) off.push_back(off.back() + cat.dim(n) * cat.dim(n));
  cmat M = cmat::Zero(off.back(), off.back());
  for (int n = lo; n <= hi; ++n) {
    const Index d = cat.dim(n);
    for (Index j = 0; j < d; ++j)
      for (Index i = 0; i < d; ++i) {
        const BlockElement e = (1.0 / std::sqrt(double(d))) * matrix_unit(cat, n, i, j);
        const BlockElement out = trace::phi(cat, e);
        const Index col = off[n - lo] + i + j * d;
        for (const auto& [m, b] : out.blocks) {
          if (m < lo || m > hi) continue;
          const cmat s = std::sqrt(double(cat.dim(m))) * b;
          M.col(col).segment(off[m - lo], s.size()) = Eigen::Map<const cvec>(s.data(), s.size());
        }
      }
  }
  REQUIRE(M.imag().cwiseAbs().maxCoeff() < 1e-12);
  return M.real();
}

}  // namespace

TEST_CASE("generator sums equal N p_0") {
  tl::Category cat(QGParams::identity(3), {.max_level = 3});
  const auto g = trace::generator_sum(cat);
  CHECK(g.left < 1e-12);
  CHECK(g.right < 1e-12);
  tl::Category tw(QGParams::twisted(3), {.max_level = 3});
  const auto h = trace::generator_sum(tw);
  CHECK(h.left < 1e-12);
  CHECK(h.right < 1e-12);
}

TEST_CASE("Phi fixes p_0 and is L_1 contractive") {
  tl::Category cat(QGParams::identity(3), {.max_level = 5});
  const BlockElement p0 = unit_at(cat, 0);
  CHECK(max_abs_diff(trace::phi(cat, p0), p0) < 1e-12);
  const auto l1 = trace::phi_l1_check(cat, 6, 5);
  CHECK(l1.unit_ratio == doctest::Approx(1.0));
  CHECK(l1.max_ratio <= 1.0 + 1e-10);
  CHECK(l1.hermiticity < 1e-10);
}

TEST_CASE("Kraus form agrees with the convolution form") {
  for (const auto& P : {QGParams::identity(3), QGParams::twisted(3)}) {
    tl::Category cat(P, {.max_level = 5});
    const trace::KrausPhi op(cat, 0, 3, 5);
    std::mt19937_64 rng(21);
    const BlockElement x = random_element(cat, {0, 1, 2, 3}, rng);
    const BlockElement a = op.apply(x);
    CHECK(max_abs_diff(a, trace::phi(cat, x)) < 1e-10 * max_abs(a));
  }
}

TEST_CASE("truncated L_2 norm against a dense eigen-solve") {
  tl::Category cat(QGParams::identity(3), {.max_level = 5});
  for (int K : {2, 3}) {
    const rmat M = dense_phi(cat, 1, K);
    CHECK((M - M.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    const rvec ev = Eigen::SelfAdjointEigenSolver<rmat>(M, Eigen::EigenvaluesOnly).eigenvalues();
    const double oracle = std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
    const auto r = trace::phi_l20_norm(cat, K, 7, false);
    CHECK(r.real_arithmetic);
    CHECK(r.norm == doctest::Approx(oracle).epsilon(1e-7));
    if (K == 3) CHECK(oracle == doctest::Approx(0.414862).epsilon(1e-6));
  }
}

TEST_CASE("interpolated bound") {
  CHECK(trace::interpolated_bound(1.5, 0.8) == doctest::Approx(std::pow(0.8, 2.0 / 3.0)));
  CHECK(trace::interpolated_bound(2.0, 0.5) == doctest::Approx(0.5));
  CHECK_THROWS(trace::interpolated_bound(2.0, 1.0));
  CHECK_THROWS(trace::interpolated_bound(3.0, 0.5));
}

TEST_CASE("iteration towards the Haar state") {
  tl::Category cat(QGParams::identity(3), {.max_level = 6});
  const auto flat = trace::iterate_to_haar(cat, unit_at(cat, 0), 2.0, 4, 1.5, 6);
  for (double n : flat.norms) CHECK(n == 0.0);
  const auto tr = trace::iterate_to_haar(cat, matrix_unit(cat, 1, 0, 0), 2.0, 8, 1.5, 6);
  REQUIRE(tr.norms.size() == 9);
  CHECK(tr.exact[2]);
  CHECK_FALSE(tr.exact[3]);
  CHECK(tr.truncated);
  CHECK(tr.fitted_rate < 1.0);
  for (std::size_t k = 1; k < tr.norms.size(); ++k) CHECK(tr.norms[k] <= tr.norms[k - 1] * (1 + 1e-12));
  CHECK_THROWS(trace::iterate_to_haar(cat, unit_at(cat, 0), 1.5, 4, 1.5, 6));
}
