#include "fqg/spectral.hpp"
#include "fqg/types.hpp"

#include <doctest.h>

#include <cmath>

using namespace fqg;
using namespace fqg::spectral;

TEST_CASE("chebyshev dimensions for N = 3") {
  const std::int64_t expected[] = {1, 3, 8, 21, 55, 144, 377};
  for (int n = 0; n <= 6; ++n) CHECK(chebyshev_dim(n, 3) == expected[n]);
}

TEST_CASE("chebyshev recursion agrees with closed form and log form") {
  for (int N : {3, 4, 5, 7})
    for (int n = 0; n <= 30; ++n) {
      const double exact = chebyshev_real(n, N);
      CHECK(chebyshev_closed_form(n, N) == doctest::Approx(exact).epsilon(1e-12));
      CHECK(log_chebyshev(n, N) == doctest::Approx(std::log(exact)).epsilon(1e-12));
    }
  CHECK(log_chebyshev(10, 2.0) == doctest::Approx(std::log(11.0)));
}

TEST_CASE("chebyshev_dim refuses to overflow") {
  CHECK_THROWS_AS(chebyshev_dim(200, 5), DimensionOverflow);
  CHECK_NOTHROW(chebyshev_dim(40, 3));
}

TEST_CASE("rho and thresholds") {
  const double r = rho(3);
  CHECK(r + 1 / r == doctest::Approx(3.0));
  CHECK(threshold(2, 3) == doctest::Approx(0.3819660112501051));
  CHECK(threshold(4, 3) == doctest::Approx(0.6180339887498949));
  CHECK(threshold(INFINITY, 3) == 1.0);
  CHECK(threshold(1e9, 3) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK_THROWS(rho(1.5));
}

TEST_CASE("fusion ranges") {
  CHECK(fusion_range(1, 1) == std::vector<int>{0, 2});
  CHECK(fusion_range(2, 3) == std::vector<int>{1, 3, 5});
  CHECK(fusion_range(0, 4) == std::vector<int>{4});
  CHECK(fuses(3, 2, 1));
  CHECK_FALSE(fuses(2, 2, 1));
}

TEST_CASE("dimension ratio") {
  // r = 0: the product is empty.
  CHECK(dim_ratio_lhs(2, 3, 5, 3) == doctest::Approx(1.0));
  // (1, 1, 0): direct r = 1 evaluation, d_1 d_0 d_0 / (d_1 d_0 d_0) / d_1.
  CHECK(dim_ratio_lhs(1, 1, 0, 3) == doctest::Approx(1.0 / 3.0));
  CHECK(dim_ratio_normalized(1, 1, 0, 3) == doctest::Approx(1.0));
  CHECK_THROWS(dim_ratio_lhs(1, 1, 1, 3));
  const double c = empirical_dim_constant(6, 3);
  CHECK(std::isfinite(c));
  CHECK(c >= 1.0);
  CHECK(c == doctest::Approx(empirical_dim_constant(6, 3)));
}

TEST_CASE("series classification around the threshold") {
  CHECK(series_classify(0.30, 2, 3, 200).empirical == SeriesVerdict::Converges);
  CHECK(series_classify(0.30, 2, 3, 200).analytic == SeriesVerdict::Converges);
  CHECK(series_classify(0.45, 2, 3, 200).empirical == SeriesVerdict::Diverges);
  CHECK(series_classify(threshold(2, 3), 2, 3, 200).analytic == SeriesVerdict::Boundary);
  for (int N : {3, 4, 5})
    for (double p : {2.0, 3.0, 4.0})
      for (double f : {0.95, 1.05}) {
        const auto s = series_classify(threshold(p, N) * f, p, N, 200);
        CHECK(s.analytic == s.empirical);
      }
}

TEST_CASE("partial sums are monotone") {
  const auto s = series_classify(0.5, 2, 3, 50);
  for (std::size_t i = 1; i < s.log_partial_sums.size(); ++i) CHECK(s.log_partial_sums[i] >= s.log_partial_sums[i - 1]);
}

TEST_CASE("chebyshev ratio at n = 0 and n = 1") {
  CHECK(chebyshev_ratio(0, 0.7, 3) == doctest::Approx(1.0));
  CHECK(chebyshev_ratio(1, 0.7, 3) == doctest::Approx(0.7));
  // Oscillatory regime rN < 2 still evaluates.
  CHECK(std::isfinite(chebyshev_ratio(5, 0.5, 3)));
}
