#pragma once

#include "fqg/types.hpp"

#include <array>
#include <string>

namespace fqg {

// The pair (N, F) fixing O_F^+. epsilon is derived from F conj(F) = epsilon I.
struct QGParams {
  int N = 3;
  cmat F;
  int epsilon = 1;

  static QGParams identity(int N);
  // F = I_{N/2} (x) [[0,1],[-1,0]], epsilon = -1. N must be even.
  static QGParams symplectic(int N);
  // Diagonal unitary F with distinct phases, epsilon = +1.
  static QGParams phase(int N);
  // F = W W^T for a fixed pseudo-random unitary W: symmetric, non-real, epsilon = +1.
  static QGParams twisted(int N);
  static QGParams from_matrix(const cmat& F, double tol = 1e-10);
  static QGParams named(const std::string& name, int N);
  // Text file: N on the first line, then N rows of "re im" pairs.
  static QGParams from_file(const std::string& path);

  void validate(double tol = 1e-10) const;
  bool is_real() const;

  std::array<unsigned char, 32> hash() const;
  std::string hash_hex() const;
};

}  // namespace fqg
