#include "fqg/unitary.hpp"

#include <doctest.h>

#include <random>

using namespace fqg;
using namespace fqg::unitary;

namespace {

std::vector<Word> gammas(const Word& g, const Word& h) {
  std::vector<Word> out;
  for (const auto& t : fusion_decompose(g, h)) out.push_back(t.gamma);
  return out;
}

}  // namespace

TEST_CASE("words") {
  CHECK(bar("uuU") == "uUU");
  CHECK(bar("") == "");
  CHECK(alternating(3) == "uUu");
  CHECK(is_alternating("uUu"));
  CHECK_FALSE(is_alternating("uu"));
  CHECK(words_of_length(3).size() == 8);
  CHECK_THROWS(validate_word("uxU"));
}

TEST_CASE("fusion rules of the free monoid") {
  CHECK(gammas("u", "U") == std::vector<Word>{"uU", ""});
  CHECK(gammas("u", "u") == std::vector<Word>{"uu"});
  CHECK(gammas("uU", "uU") == std::vector<Word>{"uUuU", "uU", ""});
  CHECK(gammas("uu", "UU") == std::vector<Word>{"uuUU", "uU", ""});
  for (const auto& t : fusion_decompose("uUu", "Uuu")) {
    CHECK(t.g_prime + t.tau == "uUu");
    CHECK(bar(t.tau) + t.h_prime == "Uuu");
    CHECK(t.gamma == t.g_prime + t.h_prime);
  }
}

TEST_CASE("dimensions") {
  CHECK(dim_word("", 3) == 1);
  CHECK(dim_word("u", 3) == 3);
  CHECK(dim_word("uu", 3) == 9);
  CHECK(dim_word("uU", 3) == 8);
  CHECK(dim_word("uUu", 3) == 21);
  CHECK(dim_word("uUuU", 3) == 55);
  // dim(g) dim(h) = sum of dim(gamma) over the fusion rule.
  for (const auto& g : words_of_length(2))
    for (const auto& h : words_of_length(3)) {
      std::int64_t s = 0;
      for (const auto& t : fusion_decompose(g, h)) s += dim_word(t.gamma, 4);
      CHECK(s == dim_word(g, 4) * dim_word(h, 4));
    }
}

TEST_CASE("projections and fusion isometries") {
  WordCategory cat(3, 4);
  for (const Word g : {"uU", "Uu", "uu", "uUu", "uUuU"}) {
    const auto r = validate_projection(cat, g);
    CHECK(r.pass);
    CHECK(r.rank == r.expected_rank);
  }
  for (const auto& [g, h] : std::vector<std::pair<Word, Word>>{{"u", "U"}, {"uU", "uU"}, {"uu", "UU"}}) {
    const auto c = word_completeness(cat, g, h);
    CHECK(c.completeness < 1e-10);
    CHECK(c.isometry < 1e-10);
  }
  CHECK_THROWS_AS(cat.projection("uUuUu"), LevelOverflow);
}

TEST_CASE("word convolution: unit, support and adjoint") {
  WordCategory cat(3, 4);
  std::mt19937_64 rng(3);
  const WordElement x = random_word_element(cat, {"u", "U"}, rng);
  const WordElement y = random_word_element(cat, {"uU", "u"}, rng);
  const WordElement e = word_unit(cat);
  CHECK(max_abs_diff(word_convolve(cat, e, y), y) < 1e-12);
  CHECK(max_abs_diff(word_convolve(cat, y, e), y) < 1e-12);
  for (const auto& [g, b] : word_convolve(cat, x, y).blocks) CHECK(g.size() <= 3);
  const WordElement z = random_word_element(cat, {"", "uU", "Uu", "uuU"}, rng);
  const cplx lhs = word_inner(cat, word_convolve(cat, x, y), z);
  const cplx rhs = word_inner(cat, y, word_convolve_left_adjoint(cat, x, z, 4));
  CHECK(std::abs(lhs - rhs) < 1e-10 * (1 + std::abs(lhs)));
}

TEST_CASE("word rd scan needs room for products") {
  WordCategory cat(3, 4);
  CHECK_THROWS_AS(word_rd_scan(cat, 2.0, 3, 2, 1), LevelOverflow);
  const auto rep = word_rd_scan(cat, 2.0, 1, 2, 1);
  CHECK(rep.empirical_local_constant >= 1.0 - 1e-9);
}

TEST_CASE("even-word series against the full monoid") {
  const auto v = even_series_classify(0.3, 2.0, 3, 200);
  CHECK(v.analytic == spectral::SeriesVerdict::Converges);
  CHECK(v.empirical == spectral::SeriesVerdict::Converges);
  CHECK(v.full_blow_up);
  const auto w = even_series_classify(0.1, 2.0, 3, 200);
  CHECK_FALSE(w.full_blow_up);
  const auto d = even_series_classify(0.5, 2.0, 3, 200);
  CHECK(d.analytic == spectral::SeriesVerdict::Diverges);
  CHECK(d.empirical == spectral::SeriesVerdict::Diverges);
}

TEST_CASE("unitary exotic window") {
  const auto w = unitary_exotic_window(3, 5, 3);
  CHECK(w.r0 == doctest::Approx(0.603456).epsilon(1e-5));
  CHECK(w.split);
  CHECK(w.at_p_prime.stride == 2);
}
