// Copyright 2026 The qdecouple Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include <random>

#include "qdc/linalg.hpp"

namespace qdc {

enum class TraceClass { TracePreserving, TraceNonIncreasing, General };
std::string to_string(TraceClass c);

/// Kraus operators, each dim_out x dim_in.
struct KrausSet {
  int dim_in = 1;
  int dim_out = 1;
  std::vector<CMatrix> operators;
};

/// Completely positive map stored as its Choi matrix J(T) = (I (x) T)|Phi><Phi| on
/// labels ("A'", "B"), normalized so that tr J(id) = 1. The input index is the leading
/// factor: J[(a, b), (a', b')].
class Channel {
 public:
  Channel() = default;
  /// Validates J >= 0 and classifies the trace behaviour.
  Channel(int dim_in, int dim_out, CMatrix choi);

  int dim_in() const { return dim_in_; }
  int dim_out() const { return dim_out_; }
  const StateOperator& choi() const { return choi_; }
  TraceClass trace_class() const { return class_; }
  /// tau_B = tr_A' J(T), which equals T(I/|A|).
  CMatrix tau_b() const;

  /// T applied to an operator whose leading factor (dimension dim_in) is the input and
  /// whose remaining factors have total dimension `rest`. Output leads with dim_out.
  CMatrix apply_leading(const CMatrix& rho, int rest) const;

 private:
  struct Nz {
    int a, b, ap, bp;
    cd v;
  };

  int dim_in_ = 1;
  int dim_out_ = 1;
  StateOperator choi_;
  TraceClass class_ = TraceClass::General;
  std::vector<Nz> nz_;  // nonzeros of |A| J
};

Channel choi_of(const KrausSet& kraus);
/// Eigenvectors of J with eigenvalue above the Kraus tolerance, scaled by sqrt(|A| lambda).
KrausSet kraus_of(const Channel& ch);

/// Applies `ch` to the subsystems `on` (jointly, in the order given). The output
/// subsystem `out_label` takes the position of the first entry of `on`.
StateOperator apply(const Channel& ch, const StateOperator& state, const std::vector<std::string>& on,
                    const std::string& out_label = "B");
/// Same contract as apply, evaluated as sum_k (K_k (x) I) rho (K_k (x) I)^dagger.
StateOperator apply_kraus(const KrausSet& kraus, const StateOperator& state,
                          const std::vector<std::string>& on, const std::string& out_label = "B");

struct Stinespring {
  CMatrix v;        ///< (dim_out * dim_env) x dim_in, output factor leading
  int dim_env = 1;  ///< Kraus rank
};
Stinespring stinespring(const Channel& ch);
/// Channel onto the environment of the Stinespring dilation.
Channel complementary(const Channel& ch);

/// Trace-preserving channel with `rank` Kraus operators read off a Haar isometry.
Channel random_tpcpm(int dim_in, int dim_out, int rank, std::mt19937_64& rng);

enum class Table2Kind { Identity, Measure, Erase, IdMeasure, IdTrace };

/// The five qubit channels: identity on m qubits, computational-basis measurement,
/// erasure to |0><0|, identity on the leading m' qubits with measurement of the rest,
/// identity on the leading m' qubits with the rest traced out.
Channel table2_builder(Table2Kind kind, int m, int m_prime = 0);
/// Parses `id:m`, `meas:m`, `erase:m`, `id+meas:m,m'`, `id+trace:m,m'`.
Channel channel_from_spec(const std::string& spec);

/// tau_AB for the converse: |A| (sqrt(conj rho_A) (x) I) J (sqrt(conj rho_A) (x) I). The
/// conjugate makes tr_A' tau = T(rho_A) under the Choi index convention above.
StateOperator converse_tau(const Channel& ch, const CMatrix& rho_a);

}  // namespace qdc
