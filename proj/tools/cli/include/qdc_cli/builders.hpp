// Copyright 2026 The qdecouple Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>

#include "qdc/linalg.hpp"

namespace qdc::cli {

enum class Table1Kind { Independent, Classical, Entangled };

/// States on (A, E) with A made of k qubits: I/2^k (x) rho_E, (1/2^k) sum_i |ii><ii|, and the
/// maximally entangled state. For Independent, rho_E is I/dim_e or |0><0| when `pure_e`.
StateOperator table1_state(Table1Kind kind, int k, int dim_e = 2, bool pure_e = false);

/// Parses "A=2,E=3" into labeled dimensions.
DimsLabel parse_dims(const std::string& spec);

/// Induced-measure state with the given rank (0 means full rank).
StateOperator random_mixed_state(const DimsLabel& dims, int rank, std::uint64_t seed);
StateOperator random_pure_state(const DimsLabel& dims, std::uint64_t seed);

/// The amplitude vector of a rank-one state, or a purification on `purifier` otherwise.
PureState pure_from_state(const StateOperator& state, const std::string& purifier);

}  // namespace qdc::cli
