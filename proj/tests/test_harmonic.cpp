#include "fqg/algebra.hpp"
#include "fqg/harmonic.hpp"
#include "fqg/spectral.hpp"

#include <doctest.h>

#include <cmath>

using namespace fqg;
using namespace fqg::harmonic;

TEST_CASE("Schatten contraction with d = 1 is the tensor product") {
  // ||x (x) y||_q = ||x||_q ||y||_q exactly.
  for (double q : {1.0, 1.5, 2.0})
    CHECK(schatten_contraction_trial(2, 1, 3, q, 4, 11) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("Schatten contraction is contractive") {
  for (double q : {1.0, 1.5, 2.0}) CHECK(schatten_contraction_trial(2, 3, 2, q, 50, 3) <= 1.0 + 1e-10);
}

TEST_CASE("lq ratio factor") {
  CHECK(lq_ratio_factor(3, 3, 1, 2.0) == doctest::Approx(3.0));
  CHECK(lq_ratio_factor(1, 1, 1, 1.5) == doctest::Approx(1.0));
}

TEST_CASE("local scan: cells through level 0 are exact") {
  tl::Category cat(QGParams::identity(3), {.max_level = 4});
  const auto rep = local_rd_scan(cat, 2.0, 2, 4, 99);
  REQUIRE_FALSE(rep.cells.empty());
  for (const auto& c : rep.cells) {
    CHECK(c.ratio <= c.ratio_doubled + 1e-12);
    if (c.n == 0) CHECK(c.ratio == doctest::Approx(1.0).epsilon(1e-9));
  }
  CHECK(rep.empirical_local_constant >= 1.0 - 1e-9);
}

TEST_CASE("global estimate at n = 0 is the identity") {
  tl::Category cat(QGParams::identity(3), {.max_level = 4});
  const auto g = global_rd_estimate(cat, 0, 2.0, 3, 2, 1);
  CHECK(g.worst_ratio == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("C* power sequence of p_0") {
  tl::Category cat(QGParams::identity(3), {.max_level = 6});
  const auto s = cstar_power_sequence(cat, algebra::unit_at(cat, 0), 2.0, 5, 6);
  REQUIRE_FALSE(s.a.empty());
  for (double a : s.a) CHECK(a == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("reduced norm of p_0 is 1") {
  tl::Category cat(QGParams::identity(3), {.max_level = 4});
  CHECK(reduced_norm_lower_bound(cat, algebra::unit_at(cat, 0), 3) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("weak L_p classification of r^l") {
  // threshold(2, 3) = 1 / rho(3) = 0.381966...
  const auto small = weak_lp_classify(FamilyKind::Semigroup, 0.3, 2.0, 3);
  CHECK(small.weakly_lp);
  CHECK(small.coherent);
  const auto big = weak_lp_classify(FamilyKind::Semigroup, 0.5, 2.0, 3);
  CHECK_FALSE(big.weakly_lp);
  CHECK(big.coherent);
  CHECK(small.decay_rate == doctest::Approx(0.3));
}

TEST_CASE("phi decay rate inversion") {
  for (double s : {0.45, 0.6, 0.8}) CHECK(phi_decay_rate(phi_parameter_for_rate(s, 3), 3) == doctest::Approx(s));
  CHECK(phi_decay_rate(0.5, 3) == doctest::Approx(1.0 / spectral::rho(3)));
}

TEST_CASE("exotic windows") {
  const auto w = exotic_window_demo(2, 4, 3);
  CHECK(w.lower == doctest::Approx(spectral::threshold(2, 3)));
  CHECK(w.upper == doctest::Approx(spectral::threshold(4, 3)));
  CHECK(w.r0 == doctest::Approx(0.5 * (w.lower + w.upper)));
  CHECK(w.r0 == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(w.split);
  CHECK(w.at_p_prime.weakly_lp);
  CHECK_FALSE(w.at_p.weakly_lp);
  const auto v = exotic_window_demo(3, 5, 3);
  CHECK(v.r0 == doctest::Approx(0.603456).epsilon(1e-5));
  CHECK(v.split);
  CHECK_THROWS(exotic_window_demo(3, 3, 3));
}

TEST_CASE("positive definiteness Gram test on a single element") {
  tl::Category cat(QGParams::identity(3), {.max_level = 2});
  const auto r = pd_gram_test(cat, algebra::unit_at(cat, 0), {algebra::unit_at(cat, 0)});
  CHECK(r.m == 1);
  CHECK(r.min_eigenvalue == doctest::Approx(1.0));
  CHECK(r.pass);
}
