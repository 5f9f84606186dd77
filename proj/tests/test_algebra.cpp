#include "fqg/algebra.hpp"
#include "fqg/harmonic.hpp"
#include "fqg/intertwiners.hpp"
#include "fqg/linalg.hpp"
#include "fqg/spectral.hpp"

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

}  // namespace

TEST_CASE("Haar state and L_q norms of central projections") {
  tl::Category cat(QGParams::identity(3), {.max_level = 4});
  CHECK(std::abs(haar(cat, unit_at(cat, 0)) - cplx(1)) < 1e-15);
  CHECK(std::abs(haar(cat, unit_at(cat, 2)) - cplx(64)) < 1e-12);
  for (double q : {1.0, 1.5, 2.0, 4.0})
    CHECK(lq_norm(cat, unit_at(cat, 2), q) == doctest::Approx(std::pow(8.0, 2.0 / q)));
  BlockElement traceless;
  cmat m = cmat::Zero(3, 3);
  m(0, 1) = 1;
  traceless.blocks.emplace(1, m);
  CHECK(std::abs(haar(cat, traceless)) < 1e-15);
}

TEST_CASE("truncated r^l norm matches the series") {
  tl::Category cat(QGParams::identity(3), {.max_level = 6});
  const auto c = central_family(CentralKind::Semigroup, 0.4, 3, 6);
  const BlockElement x = to_block(cat, c, 6);
  double sum = 0;
  for (int n = 0; n <= 6; ++n) sum += std::pow(0.4, 2.0 * n) * std::pow(spectral::chebyshev_real(n, 3), 2.0);
  CHECK(lq_norm(cat, x, 2.0) == doctest::Approx(std::pow(sum, 0.5)));
}

TEST_CASE("convolution: closed form against the ambient pairing oracle") {
  for (const auto& P : {QGParams::identity(3), QGParams::twisted(3), QGParams::symplectic(4)}) {
    tl::Category cat(P, {.max_level = 5});
    std::mt19937_64 rng(17);
    for (int t = 0; t < 5; ++t) {
      const BlockElement x = random_element(cat, {0, 1, 2}, rng);
      const BlockElement y = random_element(cat, {1, 2}, rng);
      const BlockElement a = random_element(cat, {0, 1, 2, 3, 4}, rng);
      const BlockElement xy = convolve(cat, x, y);
      const cplx lhs = haar(cat, product(a, xy));
      const cplx rhs = convolve_oracle_pairing(cat, x, y, a);
      CHECK(std::abs(lhs - rhs) <= 1e-10 * lq_norm(cat, xy, 2) * lq_norm(cat, a, 2));
    }
  }
}

TEST_CASE("convolution of matrix units at level 1") {
  tl::Category cat(QGParams::identity(3), {.max_level = 3});
  const BlockElement e = matrix_unit(cat, 1, 0, 0);
  const BlockElement ee = convolve(cat, e, e);
  const cmat* p0 = ee.block(0);
  REQUIRE(p0 != nullptr);
  // d_1^2 t*(e11 (x) e11) t = 9 * (1/3)
  CHECK(std::abs((*p0)(0, 0) - cplx(3.0)) < 1e-12);
  for (const auto& [n, b] : ee.blocks) CHECK((n == 0 || n == 2));
}

TEST_CASE("convolution support, unit and associativity") {
  tl::Category cat(QGParams::identity(3), {.max_level = 6});
  std::mt19937_64 rng(5);
  const BlockElement p0 = unit_at(cat, 0);
  CHECK(max_abs_diff(convolve(cat, p0, p0), p0) < 1e-15);
  for (int t = 0; t < 5; ++t) {
    const BlockElement x = random_element(cat, {2}, rng);
    const BlockElement y = random_element(cat, {2}, rng);
    for (const auto& [n, b] : convolve(cat, x, y).blocks) CHECK(n <= 4);
    const BlockElement z = random_element(cat, {0, 1, 2}, rng);
    CHECK(max_abs_diff(convolve(cat, p0, z), z) <= 1e-12 * max_abs(z));
    CHECK(max_abs_diff(convolve(cat, z, p0), z) <= 1e-12 * max_abs(z));
    const BlockElement l = convolve(cat, convolve(cat, x, y), z);
    CHECK(max_abs_diff(l, convolve(cat, x, convolve(cat, y, z))) <= 1e-10 * max_abs(l));
  }
  const BlockElement big = random_element(cat, {4}, rng);
  CHECK_THROWS_AS(convolve(cat, big, big), LevelOverflow);
}

TEST_CASE("antipode and sharp") {
  for (const auto& P : {QGParams::identity(3), QGParams::twisted(3), QGParams::symplectic(4)}) {
    tl::Category cat(P, {.max_level = 5});
    std::mt19937_64 rng(9);
    const BlockElement x = random_element(cat, {0, 1, 2}, rng);
    const BlockElement y = random_element(cat, {1, 2}, rng);
    CHECK(max_abs_diff(antipode(cat, antipode(cat, x)), x) < 1e-12 * max_abs(x));
    for (double q : {1.0, 2.0, 3.0})
      CHECK(lq_norm(cat, antipode(cat, adjoint(x)), q) == doctest::Approx(lq_norm(cat, x, q)).epsilon(1e-12));
    const BlockElement s = sharp(cat, convolve(cat, x, y));
    CHECK(max_abs_diff(s, convolve(cat, sharp(cat, y), sharp(cat, x))) < 1e-10 * max_abs(s));
    // sharp(x) * . is the L_2 adjoint of x * .
    const BlockElement w = random_element(cat, {0, 1, 2, 3}, rng);
    CHECK(max_abs_diff(convolve_left_adjoint(cat, x, w, 5), convolve(cat, sharp(cat, x), w)) < 1e-10 * max_abs(w));
  }
}

TEST_CASE("regular coefficients") {
  tl::Category cat(QGParams::identity(3), {.max_level = 4});
  std::mt19937_64 rng(2);
  const BlockElement y = random_element(cat, {0, 1, 2, 3}, rng);
  CHECK(max_abs_diff(regular_coefficient(cat, unit_at(cat, 0), adjoint(y)), y) < 1e-12 * max_abs(y));
  CHECK(max_abs_diff(regular_coefficient(cat, unit_at(cat, 0), unit_at(cat, 0)), unit_at(cat, 0)) < 1e-15);
}

TEST_CASE("central families") {
  const auto phi = central_family(CentralKind::PoissonLike, 0.7, 3, 10);
  CHECK(phi.profile[0] == doctest::Approx(1.0));
  CHECK(phi.profile[1] == doctest::Approx(0.7));
  CHECK_FALSE(phi.band_checked);
  const auto banded = central_family(CentralKind::PoissonLike, 0.9, 3, 10);
  CHECK(banded.band_checked);
  CHECK(banded.band_c1 > 0);
  CHECK(banded.band_c2 >= banded.band_c1);
  CHECK_THROWS(central_family(CentralKind::Semigroup, 1.2, 3, 10));
}

TEST_CASE("truncated regular representation") {
  tl::Category cat(QGParams::identity(3), {.max_level = 4});
  const auto rep = truncated_regular_rep(cat, unit_at(cat, 0), 2);
  CHECK((rep.matrix - cmat::Identity(rep.matrix.rows(), rep.matrix.cols())).cwiseAbs().maxCoeff() < 1e-12);
  double prev = 0;
  for (int K = 0; K <= 3; ++K) {
    const auto r = truncated_regular_rep(cat, unit_at(cat, 1), K);
    const double nrm = linalg::singular_values(r.matrix).maxCoeff();
    CHECK(nrm >= prev - 1e-12);
    prev = nrm;
  }
}

TEST_CASE("phi_r Gram matrices are positive semidefinite") {
  tl::Category cat(QGParams::identity(3), {.max_level = 4});
  const BlockElement phi = to_block(cat, central_family(CentralKind::PoissonLike, 0.8, 3, 4), 4);
  std::mt19937_64 rng(4);
  std::vector<BlockElement> fam;
  for (int i = 0; i < 6; ++i) fam.push_back(random_element(cat, {0, 1, 2}, rng));
  const auto g = harmonic::pd_gram_test(cat, phi, fam);
  CHECK(g.pass);
  const auto one = harmonic::pd_gram_test(cat, phi, {unit_at(cat, 0)});
  CHECK(one.m == 1);
  CHECK(one.min_eigenvalue == doctest::Approx(1.0));
}

TEST_CASE("element save and load") {
  tl::Category cat(QGParams::identity(3), {.max_level = 3});
  std::mt19937_64 rng(8);
  const BlockElement x = random_element(cat, {0, 2, 3}, rng);
  const auto dir = std::filesystem::temp_directory_path() / "fqg-test-element";
  std::filesystem::remove_all(dir);
  save_element(dir, "x", cat, x);
  CHECK(max_abs_diff(load_element(dir, "x", cat), x) == 0.0);
  std::filesystem::remove_all(dir);
}
