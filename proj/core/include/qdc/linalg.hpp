// Copyright 2026 The qdecouple Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace qdc {

using cd = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

enum class ErrorKind {
  DimensionCap,
  DuplicateLabel,
  UnknownLabel,
  DimensionMismatch,
  InvalidState,
  InvalidArgument,
  Precondition,
  Solver,
};

/// Library error carrying a machine-checkable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Numerical tolerances shared by every module.
struct Tolerances {
  double herm = 1e-10;       ///< Hermiticity, relative to the operator norm.
  double psd = 1e-10;        ///< Minimum eigenvalue >= -psd * ||.||_inf.
  double trace = 1e-9;       ///< Subnormalized trace slack.
  double pinv = 1e-10;       ///< Generalized-inverse cutoff, relative to lambda_max.
  double kraus = 1e-12;      ///< Choi eigenvalues at or below this are dropped.
};

const Tolerances& tolerances();
void set_tolerances(const Tolerances& t);

/// Total-dimension cap. Defaults to 256 or the value of QDC_DIM_CAP.
int dimension_cap();
void set_dimension_cap(int cap);
void check_cap(long long total, const char* where);

struct Subsystem {
  std::string label;
  int dim = 1;
  bool operator==(const Subsystem&) const = default;
};

/// Ordered list of labeled tensor factors. The first factor is the most significant
/// digit of the computational-basis index.
class DimsLabel {
 public:
  DimsLabel() = default;
  explicit DimsLabel(std::vector<Subsystem> subsystems);
  DimsLabel(std::initializer_list<Subsystem> subsystems)
      : DimsLabel(std::vector<Subsystem>(subsystems)) {}

  const std::vector<Subsystem>& subsystems() const { return subs_; }
  int size() const { return static_cast<int>(subs_.size()); }
  int total() const { return total_; }
  int index_of(const std::string& label) const;
  bool has(const std::string& label) const { return index_of(label) >= 0; }
  int dim_of(const std::string& label) const;
  std::vector<std::string> labels() const;
  std::vector<int> dims() const;
  /// Product of the dimensions of the named factors.
  int dim_of(const std::vector<std::string>& labels) const;
  DimsLabel concat(const DimsLabel& other) const;
  /// Factors named in `labels`, in the order given.
  DimsLabel select(const std::vector<std::string>& labels) const;
  bool operator==(const DimsLabel& o) const { return subs_ == o.subs_; }

 private:
  std::vector<Subsystem> subs_;
  int total_ = 1;
};

/// Positive semidefinite operator on a labeled space. Construction validates the
/// invariants; `positive` skips the trace bound and `trusted` skips all checks.
class StateOperator {
 public:
  StateOperator() = default;
  StateOperator(DimsLabel dims, CMatrix matrix);

  static StateOperator positive(DimsLabel dims, CMatrix matrix);
  static StateOperator trusted(DimsLabel dims, CMatrix matrix);

  const DimsLabel& dims() const { return dims_; }
  const CMatrix& matrix() const { return m_; }
  double trace() const { return m_.trace().real(); }
  int dim() const { return dims_.total(); }

 private:
  DimsLabel dims_;
  CMatrix m_;
};

struct PureState {
  DimsLabel dims;
  CVector amplitudes;

  StateOperator density() const;
};

// Raw helpers over plain matrices and integer dimension lists.

CMatrix hermitian_part(const CMatrix& m);
bool is_hermitian(const CMatrix& m, double rel_tol);
/// Eigenvalues ascending, eigenvectors in columns, after symmetrization.
std::pair<RVector, CMatrix> herm_eig(const CMatrix& m);
RVector herm_eigenvalues(const CMatrix& m);
/// f applied to the spectrum with negative eigenvalues clipped to zero.
CMatrix psd_sqrt(const CMatrix& m);
/// m^p on the support: eigenvalues <= pinv*lambda_max map to zero. Handles p < 0.
CMatrix psd_power(const CMatrix& m, double p);
CMatrix pinv_psd(const CMatrix& m);
double operator_norm_herm(const CMatrix& m);

CMatrix kron(const CMatrix& a, const CMatrix& b);
/// Reorders tensor factors: output factor j is input factor perm[j].
CMatrix permute_raw(const CMatrix& m, const std::vector<int>& dims, const std::vector<int>& perm);
CVector permute_vector_raw(const CVector& v, const std::vector<int>& dims,
                           const std::vector<int>& perm);
/// Traces out every factor not listed in `keep`; kept factors stay in ascending order.
CMatrix partial_trace_raw(const CMatrix& m, const std::vector<int>& dims,
                          const std::vector<int>& keep);
/// (U (x) I) m (U (x) I)^dagger with U (dout x din, possibly non-square) acting on the leading factor.
CMatrix conjugate_leading(const CMatrix& m, const CMatrix& u);

// Labeled operations.

StateOperator tensor(const StateOperator& a, const StateOperator& b);
StateOperator partial_trace(const StateOperator& op, const std::vector<std::string>& keep);
StateOperator permute(const StateOperator& op, const std::vector<std::string>& order);
/// Reduced state on `first` followed by `second`, in the order given.
StateOperator reduce_to(const StateOperator& op, const std::vector<std::string>& first,
                        const std::vector<std::string>& second = {});
/// (U (x) I) rho (U (x) I)^dagger with U acting on `labels` jointly.
StateOperator conjugate_local(const StateOperator& op, const std::vector<std::string>& labels,
                              const CMatrix& u);

double trace_norm(const CMatrix& m);
double trace_distance(const CMatrix& a, const CMatrix& b);
double fidelity(const CMatrix& rho, const CMatrix& sigma);
double fidelity(const StateOperator& rho, const StateOperator& sigma);
double generalized_fidelity(const StateOperator& rho, const StateOperator& sigma);
double purified_distance(const StateOperator& rho, const StateOperator& sigma);

PureState purify(const StateOperator& rho, const std::string& new_label);
CMatrix swap_operator(int d);

struct Extension {
  CMatrix t_a;
  StateOperator sigma_ab;
};
/// Extends sigma_A to a state on the labels of rho_AB with the same purified distance.
Extension extension_map(const StateOperator& rho_ab, const StateOperator& sigma_a);

StateOperator maximally_mixed(const DimsLabel& dims);
StateOperator basis_projector(const DimsLabel& dims, int index);

}  // namespace qdc
