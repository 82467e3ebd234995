// Copyright 2026 The qdecouple Authors.
// SPDX-License-Identifier: Apache-2.0

#include "qdc_cli/builders.hpp"

#include <cmath>
#include <sstream>

#include "qdc/haar.hpp"

namespace qdc::cli {

StateOperator table1_state(Table1Kind kind, int k, int dim_e, bool pure_e) {
  if (k < 0 || k > 4) throw Error(ErrorKind::InvalidArgument, "table1_state: k must be in [0, 4]");
  const int d = 1 << k;
  switch (kind) {
    case Table1Kind::Independent: {
      if (dim_e < 1) throw Error(ErrorKind::InvalidArgument, "table1_state: dim_e must be positive");
      CMatrix e = CMatrix::Identity(dim_e, dim_e) / static_cast<double>(dim_e);
      if (pure_e) {
        e.setZero();
        e(0, 0) = 1.0;
      }
      const CMatrix a = CMatrix::Identity(d, d) / static_cast<double>(d);
      return StateOperator(DimsLabel({{"A", d}, {"E", dim_e}}), kron(a, e));
    }
    case Table1Kind::Classical: {
      CMatrix m = CMatrix::Zero(d * d, d * d);
      for (int i = 0; i < d; ++i) m(i * d + i, i * d + i) = 1.0 / d;
      return StateOperator(DimsLabel({{"A", d}, {"E", d}}), m);
    }
    case Table1Kind::Entangled: {
      CVector v = CVector::Zero(d * d);
      for (int i = 0; i < d; ++i) v(i * d + i) = 1.0 / std::sqrt(static_cast<double>(d));
      return StateOperator(DimsLabel({{"A", d}, {"E", d}}), v * v.adjoint());
    }
  }
  throw Error(ErrorKind::InvalidArgument, "table1_state: unknown kind");
}

DimsLabel parse_dims(const std::string& spec) {
  std::vector<Subsystem> subs;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw Error(ErrorKind::InvalidArgument, "dims: expected LABEL=DIM, got '" + item + "'");
    int dim = 0;
    try {
      std::size_t used = 0;
      dim = std::stoi(item.substr(eq + 1), &used);
      if (used != item.size() - eq - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw Error(ErrorKind::InvalidArgument, "dims: bad dimension in '" + item + "'");
    }
    subs.push_back({item.substr(0, eq), dim});
  }
  if (subs.empty()) throw Error(ErrorKind::InvalidArgument, "dims: empty specification");
  return DimsLabel(subs);
}

StateOperator random_mixed_state(const DimsLabel& dims, int rank, std::uint64_t seed) {
  check_cap(dims.total(), "random_mixed_state");
  auto rng = make_rng(RngSeed{seed, "gen-state"}, 0);
  const int r = rank <= 0 ? dims.total() : rank;
  return StateOperator(dims, random_density(dims.total(), r, rng));
}

StateOperator random_pure_state(const DimsLabel& dims, std::uint64_t seed) {
  check_cap(dims.total(), "random_pure_state");
  auto rng = make_rng(RngSeed{seed, "gen-state"}, 0);
  const CVector v = random_pure(dims.total(), rng);
  return StateOperator(dims, v * v.adjoint());
}

PureState pure_from_state(const StateOperator& state, const std::string& purifier) {
  auto [ev, vecs] = herm_eig(state.matrix());
  const long n = ev.size();
  const double top = ev(n - 1);
  if (std::abs(state.trace() - 1.0) > 1e-9) throw Error(ErrorKind::InvalidState, "pure_from_state: state must be normalized");
  if (n == 1 || ev(n - 2) <= tolerances().pinv * top) {
    CVector v = vecs.col(n - 1);
    // Fix the global phase so that the largest amplitude is real and positive.
    Eigen::Index at = 0;
    v.cwiseAbs().maxCoeff(&at);
    v *= std::conj(v(at)) / std::abs(v(at));
    return PureState{state.dims(), v / v.norm()};
  }
  return purify(state, purifier);
}

}  // namespace qdc::cli
