#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace fqg {

using cplx = std::complex<double>;
using cmat = Eigen::MatrixXcd;
using cvec = Eigen::VectorXcd;
using rmat = Eigen::MatrixXd;
using rvec = Eigen::VectorXd;
using Index = Eigen::Index;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a requested object or product would need a level above the
// configured maximum. Never caught internally: truncation is always explicit.
class LevelOverflow : public Error {
 public:
  LevelOverflow(int level, int max_level)
      : Error("level " + std::to_string(level) + " exceeds max level " + std::to_string(max_level)),
        level(level), max_level(max_level) {}
  int level;
  int max_level;
};

class InvariantViolation : public Error {
 public:
  using Error::Error;
};

class DimensionOverflow : public Error {
 public:
  using Error::Error;
};

}  // namespace fqg
