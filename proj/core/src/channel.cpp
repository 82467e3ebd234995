// Copyright 2026 The qdecouple Authors.
// SPDX-License-Identifier: Apache-2.0

#include "qdc/channel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qdc/haar.hpp"

namespace qdc {

std::string to_string(TraceClass c) {
  switch (c) {
    case TraceClass::TracePreserving: return "TracePreserving";
    case TraceClass::TraceNonIncreasing: return "TraceNonIncreasing";
    case TraceClass::General: return "General";
  }
  return "General";
}

namespace {

DimsLabel choi_dims(int din, int dout) { return DimsLabel({{"A'", din}, {"B", dout}}); }

// Moves the factors named in `on` to the front, in the given order.
std::vector<int> leading_perm(const DimsLabel& dims, const std::vector<std::string>& on) {
  std::vector<int> perm;
  for (const auto& l : on) {
    int i = dims.index_of(l);
    if (i < 0) throw Error(ErrorKind::UnknownLabel, "unknown label '" + l + "'");
    if (std::find(perm.begin(), perm.end(), i) != perm.end())
      throw Error(ErrorKind::DuplicateLabel, "label '" + l + "' listed twice");
    perm.push_back(i);
  }
  for (int i = 0; i < dims.size(); ++i)
    if (std::find(perm.begin(), perm.end(), i) == perm.end()) perm.push_back(i);
  return perm;
}

// Result dims: `out_label` at the position of on[0], the other untouched factors in place.
StateOperator place_output(const CMatrix& out, const DimsLabel& in_dims, const std::vector<std::string>& on,
                           const std::string& out_label, int dim_out) {
  std::vector<Subsystem> lead = {{out_label, dim_out}};
  std::vector<Subsystem> rest;
  std::vector<Subsystem> final_order;
  for (const auto& s : in_dims.subsystems()) {
    if (std::find(on.begin(), on.end(), s.label) != on.end()) {
      if (s.label == on[0]) final_order.push_back(lead[0]);
      continue;
    }
    if (s.label == out_label) throw Error(ErrorKind::DuplicateLabel, "output label '" + out_label + "' already present");
    rest.push_back(s);
    final_order.push_back(s);
  }
  std::vector<Subsystem> cur = lead;
  cur.insert(cur.end(), rest.begin(), rest.end());
  StateOperator cur_op = StateOperator::trusted(DimsLabel(cur), hermitian_part(out));
  std::vector<std::string> order;
  for (const auto& s : final_order) order.push_back(s.label);
  return permute(cur_op, order);
}

}  // namespace

Channel::Channel(int dim_in, int dim_out, CMatrix choi) : dim_in_(dim_in), dim_out_(dim_out) {
  if (dim_in < 1 || dim_out < 1) throw Error(ErrorKind::InvalidArgument, "channel dimensions must be >= 1");
  check_cap(static_cast<long long>(dim_in) * dim_out, "Channel");
  choi_ = StateOperator::positive(choi_dims(dim_in, dim_out), std::move(choi));

  const CMatrix ta = partial_trace_raw(choi_.matrix(), {dim_in, dim_out}, {0});
  const CMatrix target = CMatrix::Identity(dim_in, dim_in) / static_cast<double>(dim_in);
  const double tol = 1e-9;
  if ((ta - target).cwiseAbs().maxCoeff() <= tol) {
    class_ = TraceClass::TracePreserving;
  } else if (herm_eigenvalues(target - ta).minCoeff() >= -tol) {
    class_ = TraceClass::TraceNonIncreasing;
  } else {
    class_ = TraceClass::General;
  }

  const CMatrix& j = choi_.matrix();
  const double cut = 1e-15 * std::max(1.0, j.cwiseAbs().maxCoeff());
  for (int c = 0; c < j.cols(); ++c)
    for (int r = 0; r < j.rows(); ++r)
      if (std::abs(j(r, c)) > cut)
        nz_.push_back(Nz{r / dim_out, r % dim_out, c / dim_out, c % dim_out, static_cast<double>(dim_in) * j(r, c)});
}

CMatrix Channel::tau_b() const { return partial_trace_raw(choi_.matrix(), {dim_in_, dim_out_}, {1}); }

CMatrix Channel::apply_leading(const CMatrix& rho, int rest) const {
  if (rho.rows() != static_cast<long>(dim_in_) * rest || rho.cols() != rho.rows())
    throw Error(ErrorKind::DimensionMismatch, "channel input dimension mismatch");
  // out[(b,e),(b',e')] = sum |A| J[(a,b),(a',b')] rho[(a,e),(a',e')]
  CMatrix out = CMatrix::Zero(static_cast<long>(dim_out_) * rest, static_cast<long>(dim_out_) * rest);
  for (const auto& z : nz_)
    out.block(static_cast<long>(z.b) * rest, static_cast<long>(z.bp) * rest, rest, rest) +=
        z.v * rho.block(static_cast<long>(z.a) * rest, static_cast<long>(z.ap) * rest, rest, rest);
  return out;
}

Channel choi_of(const KrausSet& kraus) {
  const int din = kraus.dim_in, dout = kraus.dim_out;
  if (din < 1 || dout < 1) throw Error(ErrorKind::InvalidArgument, "Kraus dimensions must be >= 1");
  check_cap(static_cast<long long>(din) * dout, "choi_of");
  CMatrix j = CMatrix::Zero(din * dout, din * dout);
  for (const auto& k : kraus.operators) {
    if (k.rows() != dout || k.cols() != din)
      throw Error(ErrorKind::DimensionMismatch, "Kraus operator has wrong shape");
    CVector v(din * dout);
    for (int a = 0; a < din; ++a)
      for (int b = 0; b < dout; ++b) v(a * dout + b) = k(b, a);
    j.noalias() += v * v.adjoint();
  }
  j /= static_cast<double>(din);
  return Channel(din, dout, std::move(j));
}

KrausSet kraus_of(const Channel& ch) {
  const int din = ch.dim_in(), dout = ch.dim_out();
  auto [ev, vecs] = herm_eig(ch.choi().matrix());
  KrausSet out{din, dout, {}};
  const double cut = tolerances().kraus;
  for (int k = static_cast<int>(ev.size()) - 1; k >= 0; --k) {
    if (ev(k) <= cut) continue;
    const double s = std::sqrt(din * ev(k));
    CMatrix op(dout, din);
    for (int a = 0; a < din; ++a)
      for (int b = 0; b < dout; ++b) op(b, a) = s * vecs(a * dout + b, k);
    out.operators.push_back(std::move(op));
  }
  return out;
}

StateOperator apply(const Channel& ch, const StateOperator& state, const std::vector<std::string>& on,
                    const std::string& out_label) {
  if (on.empty()) throw Error(ErrorKind::InvalidArgument, "apply: no input subsystems");
  const int din = state.dims().dim_of(on);
  if (din != ch.dim_in()) throw Error(ErrorKind::DimensionMismatch, "apply: input dimension mismatch");
  const int rest = state.dim() / din;
  check_cap(static_cast<long long>(ch.dim_out()) * rest, "apply");
  auto perm = leading_perm(state.dims(), on);
  CMatrix p = permute_raw(state.matrix(), state.dims().dims(), perm);
  return place_output(ch.apply_leading(p, rest), state.dims(), on, out_label, ch.dim_out());
}

StateOperator apply_kraus(const KrausSet& kraus, const StateOperator& state, const std::vector<std::string>& on,
                          const std::string& out_label) {
  if (on.empty()) throw Error(ErrorKind::InvalidArgument, "apply_kraus: no input subsystems");
  const int din = state.dims().dim_of(on);
  if (din != kraus.dim_in) throw Error(ErrorKind::DimensionMismatch, "apply_kraus: input dimension mismatch");
  const int rest = state.dim() / din;
  auto perm = leading_perm(state.dims(), on);
  CMatrix p = permute_raw(state.matrix(), state.dims().dims(), perm);
  CMatrix out = CMatrix::Zero(static_cast<long>(kraus.dim_out) * rest, static_cast<long>(kraus.dim_out) * rest);
  const CMatrix id = CMatrix::Identity(rest, rest);
  for (const auto& k : kraus.operators) {
    CMatrix kk = kron(k, id);
    out.noalias() += kk * p * kk.adjoint();
  }
  return place_output(out, state.dims(), on, out_label, kraus.dim_out);
}

Stinespring stinespring(const Channel& ch) {
  if (ch.trace_class() != TraceClass::TracePreserving)
    throw Error(ErrorKind::Precondition, "stinespring: channel is not trace preserving");
  KrausSet k = kraus_of(ch);
  const int denv = std::max<int>(1, static_cast<int>(k.operators.size()));
  check_cap(static_cast<long long>(ch.dim_out()) * denv, "stinespring");
  CMatrix v = CMatrix::Zero(static_cast<long>(ch.dim_out()) * denv, ch.dim_in());
  for (int e = 0; e < static_cast<int>(k.operators.size()); ++e)
    for (int b = 0; b < ch.dim_out(); ++b) v.row(b * denv + e) = k.operators[e].row(b);
  return Stinespring{std::move(v), denv};
}

Channel complementary(const Channel& ch) {
  Stinespring s = stinespring(ch);
  KrausSet c{ch.dim_in(), s.dim_env, {}};
  for (int b = 0; b < ch.dim_out(); ++b) {
    CMatrix f(s.dim_env, ch.dim_in());
    for (int e = 0; e < s.dim_env; ++e) f.row(e) = s.v.row(b * s.dim_env + e);
    c.operators.push_back(std::move(f));
  }
  return choi_of(c);
}

Channel table2_builder(Table2Kind kind, int m, int m_prime) {
  if (m < 0 || m_prime < 0 || m_prime > m || m > 30)
    throw Error(ErrorKind::InvalidArgument, "table2_builder: need m >= m' >= 0");
  const long long d = 1LL << m;
  check_cap(d * d, "table2_builder");
  const int di = static_cast<int>(d);
  const int keep = 1 << m_prime;
  const int rest = di / keep;
  KrausSet k{di, di, {}};
  switch (kind) {
    case Table2Kind::Identity:
      k.operators.push_back(CMatrix::Identity(di, di));
      break;
    case Table2Kind::Measure:
      for (int i = 0; i < di; ++i) {
        CMatrix p = CMatrix::Zero(di, di);
        p(i, i) = 1.0;
        k.operators.push_back(p);
      }
      break;
    case Table2Kind::Erase:
      for (int i = 0; i < di; ++i) {
        CMatrix p = CMatrix::Zero(di, di);
        p(0, i) = 1.0;
        k.operators.push_back(p);
      }
      break;
    case Table2Kind::IdMeasure:
      for (int j = 0; j < rest; ++j) {
        CMatrix p = CMatrix::Zero(rest, rest);
        p(j, j) = 1.0;
        k.operators.push_back(kron(CMatrix::Identity(keep, keep), p));
      }
      break;
    case Table2Kind::IdTrace:
      k.dim_out = keep;
      for (int j = 0; j < rest; ++j) {
        CMatrix bra = CMatrix::Zero(1, rest);
        bra(0, j) = 1.0;
        k.operators.push_back(kron(CMatrix::Identity(keep, keep), bra));
      }
      break;
  }
  return choi_of(k);
}

Channel channel_from_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw Error(ErrorKind::InvalidArgument, "channel spec needs 'kind:params': " + spec);
  const std::string kind = spec.substr(0, colon);
  const std::string params = spec.substr(colon + 1);
  std::vector<int> nums;
  std::stringstream ss(params);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      size_t used = 0;
      int v = std::stoi(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      nums.push_back(v);
    } catch (const std::exception&) {
      throw Error(ErrorKind::InvalidArgument, "channel spec has a non-integer parameter: " + spec);
    }
  }
  auto need = [&](size_t n) {
    if (nums.size() != n) throw Error(ErrorKind::InvalidArgument, "channel spec has wrong parameter count: " + spec);
  };
  if (kind == "id") { need(1); return table2_builder(Table2Kind::Identity, nums[0]); }
  if (kind == "meas") { need(1); return table2_builder(Table2Kind::Measure, nums[0]); }
  if (kind == "erase") { need(1); return table2_builder(Table2Kind::Erase, nums[0]); }
  if (kind == "id+meas") { need(2); return table2_builder(Table2Kind::IdMeasure, nums[0], nums[1]); }
  if (kind == "id+trace") { need(2); return table2_builder(Table2Kind::IdTrace, nums[0], nums[1]); }
  throw Error(ErrorKind::InvalidArgument, "unknown channel kind '" + kind + "'");
}

StateOperator converse_tau(const Channel& ch, const CMatrix& rho_a) {
  if (rho_a.rows() != ch.dim_in() || rho_a.cols() != ch.dim_in())
    throw Error(ErrorKind::DimensionMismatch, "converse_tau: rho_A dimension mismatch");
  // The square root acts on the transposed copy A' so that tr_A' tau = T(rho_A).
  const CMatrix s = kron(psd_sqrt(rho_a.conjugate()), CMatrix::Identity(ch.dim_out(), ch.dim_out()));
  CMatrix t = static_cast<double>(ch.dim_in()) * s * ch.choi().matrix() * s;
  return StateOperator::trusted(DimsLabel({{"A", ch.dim_in()}, {"B", ch.dim_out()}}), hermitian_part(t));
}

Channel random_tpcpm(int dim_in, int dim_out, int rank, std::mt19937_64& rng) {
  if (dim_in < 1 || dim_out < 1 || rank < 1 || static_cast<long long>(dim_out) * rank < dim_in)
    throw Error(ErrorKind::InvalidArgument, "random_tpcpm: need dim_out * rank >= dim_in");
  check_cap(static_cast<long long>(dim_out) * rank, "random_tpcpm");
  const CMatrix v = haar_isometry(dim_out * rank, dim_in, rng);
  KrausSet ks{dim_in, dim_out, {}};
  for (int k = 0; k < rank; ++k) {
    CMatrix op(dim_out, dim_in);
    for (int b = 0; b < dim_out; ++b) op.row(b) = v.row(b * rank + k);
    ks.operators.push_back(std::move(op));
  }
  return choi_of(ks);
}

}  // namespace qdc
