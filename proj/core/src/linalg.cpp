// Copyright 2026 The qdecouple Authors.
// SPDX-License-Identifier: Apache-2.0

#include "qdc/linalg.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>

namespace qdc {

namespace {

std::mutex g_tol_mutex;
Tolerances g_tol;

int initial_cap() {
  if (const char* env = std::getenv("QDC_DIM_CAP")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v > 0 && v < (1L << 20)) return static_cast<int>(v);
  }
  return 256;
}

std::atomic<int> g_cap{initial_cap()};

std::vector<int> index_of_labels(const DimsLabel& dims, const std::vector<std::string>& labels) {
  std::vector<int> out;
  out.reserve(labels.size());
  std::set<std::string> seen;
  for (const auto& l : labels) {
    int i = dims.index_of(l);
    if (i < 0) throw Error(ErrorKind::UnknownLabel, "unknown subsystem label '" + l + "'");
    if (!seen.insert(l).second)
      throw Error(ErrorKind::DuplicateLabel, "label '" + l + "' listed twice");
    out.push_back(i);
  }
  return out;
}

// Mixed-radix strides with the first factor most significant.
std::vector<long> strides_of(const std::vector<int>& dims) {
  std::vector<long> s(dims.size(), 1);
  for (int k = static_cast<int>(dims.size()) - 2; k >= 0; --k) s[k] = s[k + 1] * dims[k + 1];
  return s;
}

// For every index of the permuted space, the matching index of the original space.
std::vector<long> permutation_map(const std::vector<int>& dims, const std::vector<int>& perm) {
  const int k = static_cast<int>(dims.size());
  std::vector<int> new_dims(k);
  for (int j = 0; j < k; ++j) new_dims[j] = dims[perm[j]];
  const auto old_strides = strides_of(dims);
  long total = 1;
  for (int d : dims) total *= d;
  std::vector<long> map(total);
  std::vector<int> digit(k, 0);
  long old_index = 0;
  for (long n = 0; n < total; ++n) {
    map[n] = old_index;
    for (int j = k - 1; j >= 0; --j) {
      old_index += old_strides[perm[j]];
      if (++digit[j] < new_dims[j]) break;
      old_index -= old_strides[perm[j]] * new_dims[j];
      digit[j] = 0;
    }
  }
  return map;
}

}  // namespace

const Tolerances& tolerances() {
  std::lock_guard<std::mutex> lock(g_tol_mutex);
  return g_tol;
}

void set_tolerances(const Tolerances& t) {
  std::lock_guard<std::mutex> lock(g_tol_mutex);
  g_tol = t;
}

int dimension_cap() { return g_cap.load(); }

void set_dimension_cap(int cap) {
  if (cap < 1) throw Error(ErrorKind::InvalidArgument, "dimension cap must be positive");
  g_cap.store(cap);
}

void check_cap(long long total, const char* where) {
  if (total > dimension_cap()) {
    std::ostringstream os;
    os << where << ": total dimension " << total << " exceeds cap " << dimension_cap();
    throw Error(ErrorKind::DimensionCap, os.str());
  }
}

// ---------------------------------------------------------------------------
// DimsLabel

DimsLabel::DimsLabel(std::vector<Subsystem> subsystems) : subs_(std::move(subsystems)) {
  std::set<std::string> seen;
  long long total = 1;
  for (const auto& s : subs_) {
    if (s.label.empty()) throw Error(ErrorKind::InvalidArgument, "empty subsystem label");
    if (s.dim < 1) throw Error(ErrorKind::InvalidArgument, "subsystem dimension must be >= 1");
    if (!seen.insert(s.label).second)
      throw Error(ErrorKind::DuplicateLabel, "duplicate subsystem label '" + s.label + "'");
    total *= s.dim;
    check_cap(total, "DimsLabel");
  }
  total_ = static_cast<int>(total);
}

int DimsLabel::index_of(const std::string& label) const {
  for (int i = 0; i < size(); ++i)
    if (subs_[i].label == label) return i;
  return -1;
}

int DimsLabel::dim_of(const std::string& label) const {
  int i = index_of(label);
  if (i < 0) throw Error(ErrorKind::UnknownLabel, "unknown subsystem label '" + label + "'");
  return subs_[i].dim;
}

int DimsLabel::dim_of(const std::vector<std::string>& labels) const {
  int d = 1;
  for (const auto& l : labels) d *= dim_of(l);
  return d;
}

std::vector<std::string> DimsLabel::labels() const {
  std::vector<std::string> out;
  for (const auto& s : subs_) out.push_back(s.label);
  return out;
}

std::vector<int> DimsLabel::dims() const {
  std::vector<int> out;
  for (const auto& s : subs_) out.push_back(s.dim);
  return out;
}

DimsLabel DimsLabel::concat(const DimsLabel& other) const {
  std::vector<Subsystem> all = subs_;
  all.insert(all.end(), other.subs_.begin(), other.subs_.end());
  return DimsLabel(std::move(all));
}

DimsLabel DimsLabel::select(const std::vector<std::string>& labels) const {
  std::vector<Subsystem> out;
  for (int i : index_of_labels(*this, labels)) out.push_back(subs_[i]);
  return DimsLabel(std::move(out));
}

// ---------------------------------------------------------------------------
// StateOperator

StateOperator StateOperator::trusted(DimsLabel dims, CMatrix matrix) {
  StateOperator s;
  s.dims_ = std::move(dims);
  s.m_ = std::move(matrix);
  return s;
}

StateOperator StateOperator::positive(DimsLabel dims, CMatrix matrix) {
  if (matrix.rows() != dims.total() || matrix.cols() != dims.total())
    throw Error(ErrorKind::DimensionMismatch, "matrix side does not match total dimension");
  if (!matrix.allFinite()) throw Error(ErrorKind::InvalidState, "non-finite matrix entry");
  const Tolerances& tol = tolerances();
  if (!is_hermitian(matrix, tol.herm))
    throw Error(ErrorKind::InvalidState, "operator is not Hermitian within tolerance");
  CMatrix h = hermitian_part(matrix);
  RVector ev = herm_eigenvalues(h);
  double norm = std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
  if (ev(0) < -tol.psd * std::max(norm, 1e-300) && ev(0) < -1e-300) {
    std::ostringstream os;
    os << "operator is not positive semidefinite (min eigenvalue " << ev(0) << ")";
    throw Error(ErrorKind::InvalidState, os.str());
  }
  return trusted(std::move(dims), std::move(h));
}

StateOperator::StateOperator(DimsLabel dims, CMatrix matrix) {
  *this = positive(std::move(dims), std::move(matrix));
  if (trace() > 1.0 + tolerances().trace) {
    std::ostringstream os;
    os << "trace " << trace() << " exceeds 1";
    throw Error(ErrorKind::InvalidState, os.str());
  }
}

StateOperator PureState::density() const {
  return StateOperator::trusted(dims, amplitudes * amplitudes.adjoint());
}

// ---------------------------------------------------------------------------
// Raw helpers

CMatrix hermitian_part(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

bool is_hermitian(const CMatrix& m, double rel_tol) {
  if (m.rows() != m.cols()) return false;
  double scale = m.cwiseAbs().maxCoeff();
  if (scale == 0.0) return true;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= rel_tol * std::max(scale, 1.0);
}

std::pair<RVector, CMatrix> herm_eig(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(m));
  return {es.eigenvalues(), es.eigenvectors()};
}

RVector herm_eigenvalues(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double operator_norm_herm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  RVector ev = herm_eigenvalues(m);
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

CMatrix psd_sqrt(const CMatrix& m) {
  auto [ev, v] = herm_eig(m);
  RVector s = ev.cwiseMax(0.0).cwiseSqrt();
  return v * s.asDiagonal() * v.adjoint();
}

CMatrix psd_power(const CMatrix& m, double p) {
  auto [ev, v] = herm_eig(m);
  const double lmax = ev.size() ? ev.maxCoeff() : 0.0;
  const double cut = tolerances().pinv * std::max(lmax, 0.0);
  RVector f(ev.size());
  for (int i = 0; i < ev.size(); ++i) f(i) = (ev(i) > cut && ev(i) > 0.0) ? std::pow(ev(i), p) : 0.0;
  return v * f.asDiagonal() * v.adjoint();
}

CMatrix pinv_psd(const CMatrix& m) { return psd_power(m, -1.0); }

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

CMatrix permute_raw(const CMatrix& m, const std::vector<int>& dims, const std::vector<int>& perm) {
  bool identity = true;
  for (size_t j = 0; j < perm.size(); ++j) identity = identity && perm[j] == static_cast<int>(j);
  if (identity) return m;
  const auto map = permutation_map(dims, perm);
  const long n = static_cast<long>(map.size());
  CMatrix out(n, n);
  for (long c = 0; c < n; ++c)
    for (long r = 0; r < n; ++r) out(r, c) = m(map[r], map[c]);
  return out;
}

CVector permute_vector_raw(const CVector& v, const std::vector<int>& dims,
                           const std::vector<int>& perm) {
  const auto map = permutation_map(dims, perm);
  CVector out(v.size());
  for (long r = 0; r < static_cast<long>(map.size()); ++r) out(r) = v(map[r]);
  return out;
}

CMatrix partial_trace_raw(const CMatrix& m, const std::vector<int>& dims,
                          const std::vector<int>& keep) {
  std::vector<int> sorted_keep = keep;
  std::sort(sorted_keep.begin(), sorted_keep.end());
  std::vector<int> perm = sorted_keep;
  long dk = 1, dt = 1;
  for (int i : sorted_keep) dk *= dims[i];
  for (int i = 0; i < static_cast<int>(dims.size()); ++i) {
    if (!std::binary_search(sorted_keep.begin(), sorted_keep.end(), i)) {
      perm.push_back(i);
      dt *= dims[i];
    }
  }
  const CMatrix p = permute_raw(m, dims, perm);
  CMatrix out = CMatrix::Zero(dk, dk);
  for (long j = 0; j < dk; ++j)
    for (long i = 0; i < dk; ++i) {
      cd acc = 0.0;
      for (long t = 0; t < dt; ++t) acc += p(i * dt + t, j * dt + t);
      out(i, j) = acc;
    }
  return out;
}

CMatrix conjugate_leading(const CMatrix& m, const CMatrix& u) {
  using Strided = Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>;
  const long din = u.cols();
  const long dout = u.rows();
  const long n = m.rows();
  if (din < 1 || m.cols() != n || n % din != 0)
    throw Error(ErrorKind::DimensionMismatch, "conjugate_leading: U does not act on the leading factor");
  const long rest = n / din;
  const long nout = dout * rest;
  // Rows (a, e) for fixed e form a strided view; U acts on it from the left.
  CMatrix left(nout, n);
  for (long e = 0; e < rest; ++e) {
    Eigen::Map<const CMatrix, 0, Strided> src(m.data() + e, din, n, Strided(n, rest));
    Eigen::Map<CMatrix, 0, Strided> dst(left.data() + e, dout, n, Strided(nout, rest));
    dst.noalias() = u * src;
  }
  // Columns (a', e') for fixed e' form a strided view; U^dagger acts from the right.
  CMatrix both(nout, nout);
  const CMatrix ud = u.adjoint();
  for (long e = 0; e < rest; ++e) {
    Eigen::Map<const CMatrix, 0, Strided> src(left.data() + e * nout, nout, din, Strided(rest * nout, 1));
    Eigen::Map<CMatrix, 0, Strided> dst(both.data() + e * nout, nout, dout, Strided(rest * nout, 1));
    dst.noalias() = src * ud;
  }
  return both;
}

// ---------------------------------------------------------------------------
// Labeled operations

StateOperator tensor(const StateOperator& a, const StateOperator& b) {
  check_cap(static_cast<long long>(a.dim()) * b.dim(), "tensor");
  DimsLabel dims = a.dims().concat(b.dims());
  return StateOperator::trusted(std::move(dims), kron(a.matrix(), b.matrix()));
}

StateOperator partial_trace(const StateOperator& op, const std::vector<std::string>& keep) {
  auto idx = index_of_labels(op.dims(), keep);
  std::sort(idx.begin(), idx.end());
  std::vector<Subsystem> subs;
  for (int i : idx) subs.push_back(op.dims().subsystems()[i]);
  CMatrix r = partial_trace_raw(op.matrix(), op.dims().dims(), idx);
  return StateOperator::trusted(DimsLabel(std::move(subs)), hermitian_part(r));
}

StateOperator permute(const StateOperator& op, const std::vector<std::string>& order) {
  if (static_cast<int>(order.size()) != op.dims().size())
    throw Error(ErrorKind::InvalidArgument, "permutation must list every label exactly once");
  auto perm = index_of_labels(op.dims(), order);
  return StateOperator::trusted(op.dims().select(order),
                                permute_raw(op.matrix(), op.dims().dims(), perm));
}

StateOperator reduce_to(const StateOperator& op, const std::vector<std::string>& first,
                        const std::vector<std::string>& second) {
  std::vector<std::string> all = first;
  all.insert(all.end(), second.begin(), second.end());
  StateOperator r = partial_trace(op, all);
  return permute(r, all);
}

StateOperator conjugate_local(const StateOperator& op, const std::vector<std::string>& labels,
                              const CMatrix& u) {
  const int du = op.dims().dim_of(labels);
  if (u.rows() != du || u.cols() != du)
    throw Error(ErrorKind::DimensionMismatch, "local operator does not match subsystem dimension");
  auto lead = index_of_labels(op.dims(), labels);
  std::vector<int> perm = lead;
  for (int i = 0; i < op.dims().size(); ++i)
    if (std::find(lead.begin(), lead.end(), i) == lead.end()) perm.push_back(i);
  const auto dims = op.dims().dims();
  CMatrix p = permute_raw(op.matrix(), dims, perm);
  p = conjugate_leading(p, u);
  std::vector<int> inv(perm.size());
  for (size_t j = 0; j < perm.size(); ++j) inv[perm[j]] = static_cast<int>(j);
  std::vector<int> pdims(perm.size());
  for (size_t j = 0; j < perm.size(); ++j) pdims[j] = dims[perm[j]];
  return StateOperator::trusted(op.dims(), permute_raw(p, pdims, inv));
}

double trace_norm(const CMatrix& m) {
  if (m.rows() != m.cols()) throw Error(ErrorKind::DimensionMismatch, "trace_norm needs a square matrix");
  if (m.size() == 0) return 0.0;
  if (is_hermitian(m, 1e-13)) return herm_eigenvalues(m).cwiseAbs().sum();
  Eigen::BDCSVD<CMatrix> svd(m);
  return svd.singularValues().sum();
}

double trace_distance(const CMatrix& a, const CMatrix& b) { return 0.5 * trace_norm(a - b); }

double fidelity(const CMatrix& rho, const CMatrix& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols())
    throw Error(ErrorKind::DimensionMismatch, "fidelity: dimension mismatch");
  CMatrix x = psd_sqrt(rho) * psd_sqrt(sigma);
  Eigen::BDCSVD<CMatrix> svd(x);
  return svd.singularValues().sum();
}

double fidelity(const StateOperator& rho, const StateOperator& sigma) {
  if (rho.dim() != sigma.dim()) throw Error(ErrorKind::DimensionMismatch, "fidelity: dimension mismatch");
  return fidelity(rho.matrix(), sigma.matrix());
}

double generalized_fidelity(const StateOperator& rho, const StateOperator& sigma) {
  const double a = std::max(0.0, 1.0 - rho.trace());
  const double b = std::max(0.0, 1.0 - sigma.trace());
  return fidelity(rho, sigma) + std::sqrt(a * b);
}

double purified_distance(const StateOperator& rho, const StateOperator& sigma) {
  const double f = std::min(1.0, generalized_fidelity(rho, sigma));
  return std::sqrt(std::max(0.0, 1.0 - f * f));
}

PureState purify(const StateOperator& rho, const std::string& new_label) {
  if (std::abs(rho.trace() - 1.0) > 1e-9)
    throw Error(ErrorKind::InvalidState, "purify requires a normalized state");
  if (rho.dims().has(new_label))
    throw Error(ErrorKind::DuplicateLabel, "purifying label already present");
  auto [ev, v] = herm_eig(rho.matrix());
  const double cut = tolerances().pinv * std::max(ev.maxCoeff(), 0.0);
  std::vector<int> keep;
  for (int i = ev.size() - 1; i >= 0; --i)
    if (ev(i) > cut) keep.push_back(i);
  const int r = std::max<int>(1, static_cast<int>(keep.size()));
  DimsLabel dims = rho.dims().concat(DimsLabel({{new_label, r}}));
  CVector psi = CVector::Zero(dims.total());
  for (int k = 0; k < static_cast<int>(keep.size()); ++k) {
    const double w = std::sqrt(ev(keep[k]));
    for (int x = 0; x < rho.dim(); ++x) psi(x * r + k) += w * v(x, keep[k]);
  }
  return PureState{std::move(dims), std::move(psi)};
}

CMatrix swap_operator(int d) {
  if (d < 1) throw Error(ErrorKind::InvalidArgument, "swap_operator: d must be >= 1");
  check_cap(static_cast<long long>(d) * d, "swap_operator");
  CMatrix f = CMatrix::Zero(d * d, d * d);
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k) f(k * d + i, i * d + k) = 1.0;
  return f;
}

namespace {

// Orthonormal basis of the support of a PSD matrix.
CMatrix support_basis(const CMatrix& m) {
  auto [ev, v] = herm_eig(m);
  const double cut = tolerances().pinv * std::max(ev.maxCoeff(), 0.0);
  std::vector<int> cols;
  for (int i = 0; i < ev.size(); ++i)
    if (ev(i) > cut && ev(i) > 0.0) cols.push_back(i);
  CMatrix b(m.rows(), static_cast<long>(cols.size()));
  for (size_t j = 0; j < cols.size(); ++j) b.col(j) = v.col(cols[j]);
  return b;
}

// Orthonormal basis of span(space) minus span(taken); both have orthonormal columns.
CMatrix complement_within(const CMatrix& space, const CMatrix& taken) {
  if (space.cols() == 0) return space;
  CMatrix p = space;
  if (taken.cols() > 0) p -= taken * (taken.adjoint() * space);
  Eigen::BDCSVD<CMatrix> svd(p, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  int r = 0;
  while (r < s.size() && s(r) > 1e-8) ++r;
  return svd.matrixU().leftCols(r);
}

}  // namespace

Extension extension_map(const StateOperator& rho_ab, const StateOperator& sigma_a) {
  std::vector<std::string> a_labels = sigma_a.dims().labels();
  for (const auto& l : a_labels)
    if (!rho_ab.dims().has(l)) throw Error(ErrorKind::UnknownLabel, "extension_map: label '" + l + "' not in rho_AB");
  if (!(rho_ab.dims().select(a_labels) == sigma_a.dims()))
    throw Error(ErrorKind::DimensionMismatch, "extension_map: subsystem dimensions differ");

  const StateOperator rho_a = reduce_to(rho_ab, a_labels);
  const CMatrix sq_sigma = psd_sqrt(sigma_a.matrix());
  const CMatrix sq_rho = psd_sqrt(rho_a.matrix());
  const CMatrix x = sq_sigma * sq_rho;

  const CMatrix supp_rho = support_basis(rho_a.matrix());
  const CMatrix supp_sigma = support_basis(sigma_a.matrix());
  if (supp_sigma.cols() > supp_rho.cols())
    throw Error(ErrorKind::Precondition, "extension_map: rank(sigma_A) exceeds rank(rho_A)");

  // Polar part of X on its range, completed so that V maps supp(rho_A) onto a space
  // containing supp(sigma_A).
  Eigen::BDCSVD<CMatrix> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double smax = s.size() ? s(0) : 0.0;
  int rx = 0;
  while (rx < s.size() && s(rx) > 1e-12 * std::max(smax, 1e-300) && s(rx) > 1e-300) ++rx;
  CMatrix p = svd.matrixU().leftCols(rx);
  CMatrix q = svd.matrixV().leftCols(rx);
  CMatrix v = p * q.adjoint();
  CMatrix p2 = complement_within(supp_sigma, p);
  CMatrix q2 = complement_within(supp_rho, q);
  const long extra = std::min(p2.cols(), q2.cols());
  if (extra > 0) v += p2.leftCols(extra) * q2.leftCols(extra).adjoint();

  CMatrix t = sq_sigma * v * psd_power(rho_a.matrix(), -0.5);
  StateOperator sigma_ab = conjugate_local(rho_ab, a_labels, t);
  return Extension{t, StateOperator::trusted(sigma_ab.dims(), hermitian_part(sigma_ab.matrix()))};
}

StateOperator maximally_mixed(const DimsLabel& dims) {
  const int d = dims.total();
  return StateOperator::trusted(dims, CMatrix::Identity(d, d) / static_cast<double>(d));
}

StateOperator basis_projector(const DimsLabel& dims, int index) {
  const int d = dims.total();
  if (index < 0 || index >= d) throw Error(ErrorKind::InvalidArgument, "basis index out of range");
  CMatrix m = CMatrix::Zero(d, d);
  m(index, index) = 1.0;
  return StateOperator::trusted(dims, m);
}

}  // namespace qdc
