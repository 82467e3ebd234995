// Copyright 2026 The qdecouple Authors.
// SPDX-License-Identifier: Apache-2.0

#include "qdc/haar.hpp"

#include <cmath>
#include <numbers>

namespace qdc {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 make_rng(const RngSeed& s, std::uint64_t index) {
  // FNV-1a keeps the stream hash independent of the standard library.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s.stream) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::uint64_t k = splitmix64(s.seed);
  k = splitmix64(k ^ h);
  k = splitmix64(k ^ index);
  return std::mt19937_64(k);
}

namespace {

CMatrix ginibre(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, std::sqrt(0.5));
  CMatrix g(rows, cols);
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) {
      const double re = n(rng);
      const double im = n(rng);
      g(r, c) = cd(re, im);
    }
  return g;
}

CMatrix phase_fixed_q(const CMatrix& g) {
  Eigen::HouseholderQR<CMatrix> qr(g);
  const long k = g.cols();
  CMatrix q = qr.householderQ() * CMatrix::Identity(g.rows(), k);
  const CMatrix& r = qr.matrixQR();
  for (long j = 0; j < k; ++j) {
    const cd rjj = r(j, j);
    const double a = std::abs(rjj);
    q.col(j) *= a > 0.0 ? rjj / a : cd(1.0, 0.0);
  }
  return q;
}

}  // namespace

CMatrix haar_unitary(int d, std::mt19937_64& rng) {
  if (d < 1) throw Error(ErrorKind::InvalidArgument, "haar_unitary: d must be >= 1");
  return phase_fixed_q(ginibre(d, d, rng));
}

CMatrix haar_isometry(int n, int k, std::mt19937_64& rng) {
  if (n < 1 || k < 1 || k > n) throw Error(ErrorKind::InvalidArgument, "haar_isometry: need 1 <= k <= n");
  return phase_fixed_q(ginibre(n, k, rng));
}

CMatrix random_density(int d, int rank, std::mt19937_64& rng) {
  if (d < 1 || rank < 1 || rank > d) throw Error(ErrorKind::InvalidArgument, "random_density: need 1 <= rank <= d");
  const CMatrix g = ginibre(d, rank, rng);
  CMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return hermitian_part(rho);
}

CVector random_pure(int d, std::mt19937_64& rng) {
  if (d < 1) throw Error(ErrorKind::InvalidArgument, "random_pure: d must be >= 1");
  CVector v = ginibre(d, 1, rng).col(0);
  return v / v.norm();
}

std::pair<TwirlCoefficients, CMatrix> twirl_exact(const CMatrix& m) {
  if (m.rows() != m.cols()) throw Error(ErrorKind::DimensionMismatch, "twirl_exact: square matrix required");
  const int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(m.rows()))));
  if (static_cast<long>(d) * d != m.rows()) throw Error(ErrorKind::DimensionMismatch, "twirl_exact: side must be d^2");
  if (!is_hermitian(m, tolerances().herm)) throw Error(ErrorKind::InvalidArgument, "twirl_exact: M must be Hermitian");
  const CMatrix f = swap_operator(d);
  const double tr_m = m.trace().real();
  const double tr_mf = (m * f).trace().real();
  TwirlCoefficients c;
  if (d == 1) {
    c.alpha = tr_m;
    c.beta = 0.0;
  } else {
    const double dd = d;
    c.alpha = (dd * tr_m - tr_mf) / (dd * (dd * dd - 1.0));
    c.beta = (dd * tr_mf - tr_m) / (dd * (dd * dd - 1.0));
  }
  CMatrix out = c.alpha * CMatrix::Identity(d * d, d * d) + c.beta * f;
  return {c, out};
}

std::vector<CMatrix> weyl_operators(int d) {
  if (d < 1) throw Error(ErrorKind::InvalidArgument, "weyl_operators: d must be >= 1");
  check_cap(static_cast<long long>(d) * d, "weyl_operators");
  const double two_pi = 2.0 * std::numbers::pi;
  std::vector<CMatrix> out;
  out.reserve(static_cast<size_t>(d) * d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      CMatrix w = CMatrix::Zero(d, d);
      // X^a Z^b |j> = w^{bj} |j + a>
      for (int j = 0; j < d; ++j) w((j + a) % d, j) = std::polar(1.0, two_pi * b * j / d);
      out.push_back(std::move(w));
    }
  return out;
}

}  // namespace qdc
