#pragma once

#include "fqg/harmonic.hpp"
#include "fqg/types.hpp"

#include <map>
#include <mutex>
#include <random>
#include <string>
#include <tuple>
#include <vector>

namespace fqg::unitary {

// Words over {u, U}, U standing for the conjugate letter ubar. The empty string is e.
using Word = std::string;

void validate_word(const Word& g);
char conj_letter(char c);
// Reversal with letter conjugation.
Word bar(const Word& g);
bool is_alternating(const Word& g);
// Alternating word of length n starting with u.
Word alternating(int n);
std::vector<Word> words_of_length(int n);

struct FusionTerm {
  Word gamma, tau, g_prime, h_prime;  // g = g' tau, h = bar(tau) h', gamma = g' h'
};
// All gamma in g (x) h, longest gamma first.
std::vector<FusionTerm> fusion_decompose(const Word& g, const Word& h);

// dim H_g, memoized across calls; exact in 64 bits.
std::int64_t dim_word(const Word& g, int N);

// Block element on the free monoid: word -> d_g x d_g matrix in colored coordinates.
struct WordElement {
  std::map<Word, cmat> blocks;
  void accumulate(const Word& g, const cmat& m);
  int max_length() const;
};
WordElement operator+(const WordElement& a, const WordElement& b);
double max_abs_diff(const WordElement& a, const WordElement& b);

// Colored representation category of U_N^+ (F = I_N) in ambient coordinates on (C^N)^{(x)l(g)}.
class WordCategory {
 public:
  explicit WordCategory(int N, int max_length = 4);

  int N() const { return N_; }
  int max_length() const { return max_length_; }
  Index dim(const Word& g);

  // Ambient orthogonal projection onto H_g and an orthonormal basis of its range.
  const cmat& projection(const Word& g);
  const cmat& basis(const Word& g);
  // Single-junction cup insertion at position pos: (C^N)^{(x)(l-2)} -> (C^N)^{(x)l}.
  cmat cup_insertion(int length, int pos) const;
  // Junction positions where g has a u U or U u pair.
  static std::vector<int> junctions(const Word& g);
  // r nested cups, a vector of length N^{2r}.
  cvec nested_cups(int r) const;

  // Isometry H_gamma -> H_g (x) H_h in colored coordinates.
  const cmat& isometry(const Word& gamma, const Word& g, const Word& h);

 private:
  void require(const Word& g) const;
  int N_, max_length_;
  std::recursive_mutex mu_;
  std::map<Word, cmat> proj_, basis_;
  std::map<std::tuple<Word, Word, Word>, cmat> iso_;
};

struct ProjectionReport {
  Word g;
  Index rank = 0;
  std::int64_t expected_rank = 0;
  double hermitian = 0, idempotency = 0, cup_annihilation = 0;
  bool pass = false;
};
ProjectionReport validate_projection(WordCategory& cat, const Word& g, double tol = 1e-9);

struct WordCompleteness {
  double completeness = 0;
  double isometry = 0;
};
WordCompleteness word_completeness(WordCategory& cat, const Word& g, const Word& h);

WordElement random_word_element(WordCategory& cat, const std::vector<Word>& support, std::mt19937_64& rng);
WordElement word_unit(WordCategory& cat);
WordElement word_convolve(WordCategory& cat, const WordElement& x, const WordElement& y);
// L_2 adjoint of y -> x * y, restricted to output words of length <= max_len.
WordElement word_convolve_left_adjoint(WordCategory& cat, const WordElement& x, const WordElement& z, int max_len);
double word_lq_norm(WordCategory& cat, const WordElement& x, double q);
cplx word_inner(WordCategory& cat, const WordElement& x, const WordElement& y);

struct WordRDCell {
  Word gamma, g, h;
  double ratio = 0, ratio_doubled = 0;
};
struct WordRDReport {
  double q = 2;
  int max_length = 0;
  int trials = 0;
  std::uint64_t seed = 0;
  std::vector<WordRDCell> cells;
  double empirical_local_constant = 0;
  double empirical_local_constant_doubled = 0;
  double max_cell_change = 0;
  // Length-graded q = 2 estimates: n -> ||x * .|| / ((n+1) ||x||_2) over random x of length n.
  std::vector<std::pair<int, double>> global_ratios;
};
// Needs 2 * max_length <= cat.max_length().
WordRDReport word_rd_scan(WordCategory& cat, double q, int max_length, int trials, std::uint64_t seed);

struct EvenSeriesVerdict {
  spectral::SeriesVerdict analytic = spectral::SeriesVerdict::Boundary;
  spectral::SeriesVerdict empirical = spectral::SeriesVerdict::Boundary;
  double threshold = 0;
  double tail_ratio = 0;  // ratio of consecutive even terms at n_max
  // Full monoid sum over lengths <= full_max_length of r^{l(g)p} dim(g)^2, by length.
  std::vector<double> full_partial_sums;
  bool full_blow_up = false;  // per-length contributions strictly increasing
};
EvenSeriesVerdict even_series_classify(double r, double p, int N, int n_max, int full_max_length = 20);

struct UnitaryExoticWindow {
  double p = 0, p_prime = 0;
  int N = 0;
  double r0 = 0, phi_parameter = 0;
  harmonic::WeakLpVerdict at_p_prime, at_p;
  bool split = false;
};
UnitaryExoticWindow unitary_exotic_window(double p, double p_prime, int N);

}  // namespace fqg::unitary
