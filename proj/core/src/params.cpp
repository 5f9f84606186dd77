#include "fqg/params.hpp"

#include <openssl/sha.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

namespace fqg {

namespace {

void append_u32(std::vector<unsigned char>& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

void append_f64(std::vector<unsigned char>& buf, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<unsigned char>(bits >> (8 * i)));
}

}  // namespace

QGParams QGParams::identity(int N) { return from_matrix(cmat::Identity(N, N)); }

QGParams QGParams::symplectic(int N) {
  if (N % 2 != 0) throw Error("symplectic F needs even N, got " + std::to_string(N));
  cmat F = cmat::Zero(N, N);
  for (int b = 0; b < N / 2; ++b) {
    F(2 * b, 2 * b + 1) = 1.0;
    F(2 * b + 1, 2 * b) = -1.0;
  }
  return from_matrix(F);
}

QGParams QGParams::phase(int N) {
  cmat F = cmat::Zero(N, N);
  for (int i = 0; i < N; ++i) F(i, i) = std::polar(1.0, 0.7 * (i + 1));
  return from_matrix(F);
}

QGParams QGParams::twisted(int N) {
  std::mt19937_64 rng(0x5eedULL + N);
  std::normal_distribution<double> g;
  cmat A(N, N);
  for (Index j = 0; j < N; ++j)
    for (Index i = 0; i < N; ++i) A(i, j) = cplx(g(rng), g(rng));
  Eigen::HouseholderQR<cmat> qr(A);
  cmat W = qr.householderQ() * cmat::Identity(N, N);
  return from_matrix(W * W.transpose());
}

QGParams QGParams::from_matrix(const cmat& F, double tol) {
  QGParams p;
  p.N = static_cast<int>(F.rows());
  p.F = F;
  if (F.rows() != F.cols()) throw Error("F must be square");
  const cmat s = F * F.conjugate();
  p.epsilon = s(0, 0).real() >= 0 ? 1 : -1;
  p.validate(tol);
  return p;
}

QGParams QGParams::named(const std::string& name, int N) {
  if (name == "identity") return identity(N);
  if (name == "symplectic") return symplectic(N);
  if (name == "phase") return phase(N);
  if (name == "twisted") return twisted(N);
  throw Error("unknown named F '" + name + "' (identity|symplectic|phase|twisted)");
}

QGParams QGParams::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open F matrix file '" + path + "'");
  int N = 0;
  in >> N;
  if (!in || N < 1) throw Error("F matrix file '" + path + "': bad dimension line");
  cmat F(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      double re = 0, im = 0;
      in >> re >> im;
      if (!in) throw Error("F matrix file '" + path + "': truncated at entry (" + std::to_string(i) + "," + std::to_string(j) + ")");
      F(i, j) = cplx(re, im);
    }
  return from_matrix(F);
}

void QGParams::validate(double tol) const {
  if (N < 3) throw Error("N must be >= 3, got " + std::to_string(N));
  if (F.rows() != N || F.cols() != N) throw Error("F must be N x N");
  const double unit = (F.adjoint() * F - cmat::Identity(N, N)).cwiseAbs().maxCoeff();
  if (unit > tol) throw Error("F is not unitary (deviation " + std::to_string(unit) + ")");
  const double sgn = (F * F.conjugate() - double(epsilon) * cmat::Identity(N, N)).cwiseAbs().maxCoeff();
  if (sgn > tol) throw Error("F conj(F) is not +-I (deviation " + std::to_string(sgn) + ")");
}

bool QGParams::is_real() const { return F.imag().cwiseAbs().maxCoeff() == 0.0; }

std::array<unsigned char, 32> QGParams::hash() const {
  std::vector<unsigned char> buf;
  append_u32(buf, static_cast<std::uint32_t>(N));
  for (Index j = 0; j < F.cols(); ++j)
    for (Index i = 0; i < F.rows(); ++i) {
      append_f64(buf, F(i, j).real());
      append_f64(buf, F(i, j).imag());
    }
  std::array<unsigned char, 32> out{};
  SHA256(buf.data(), buf.size(), out.data());
  return out;
}

std::string QGParams::hash_hex() const {
  static const char* hex = "0123456789abcdef";
  std::string s;
  for (unsigned char c : hash()) {
    s += hex[c >> 4];
    s += hex[c & 15];
  }
  return s;
}

}  // namespace fqg
