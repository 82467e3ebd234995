// Copyright 2026 The qdecouple Authors.
// SPDX-License-Identifier: Apache-2.0

#include "qdc/decoupling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "parallel.hpp"

namespace qdc {

namespace {

// State reordered as (A, E) with the reference operator tau_B (x) rho_E.
struct Prepared {
  CMatrix rho;
  int da = 1;
  int de = 1;
  Labels e;
  CMatrix reference;
  // Rotating J instead of rho costs (|A||B|)^2 |E|^2 against |A| n^2 for conjugating rho;
  // the cheaper route is chosen once per experiment.
  bool rotate_choi = false;
  CMatrix regrouped;  // rho with rows (a, a') and columns (e, e'), set when rotate_choi
};

Labels complement(const StateOperator& state, const Labels& a) {
  for (const auto& l : a)
    if (!state.dims().has(l)) throw Error(ErrorKind::UnknownLabel, "unknown label '" + l + "'");
  Labels e;
  for (const auto& l : state.dims().labels())
    if (std::find(a.begin(), a.end(), l) == a.end()) e.push_back(l);
  return e;
}

Prepared prepare(const StateOperator& state, const Labels& a, const Channel& ch) {
  if (a.empty()) throw Error(ErrorKind::InvalidArgument, "decoupling: no input subsystems");
  Prepared p;
  p.e = complement(state, a);
  p.da = state.dims().dim_of(a);
  if (p.da != ch.dim_in()) throw Error(ErrorKind::DimensionMismatch, "decoupling: channel input dimension differs from |A|");
  p.de = state.dim() / p.da;
  Labels order = a;
  order.insert(order.end(), p.e.begin(), p.e.end());
  p.rho = permute(state, order).matrix();
  const CMatrix rho_e = partial_trace_raw(p.rho, {p.da, p.de}, {1});
  p.reference = kron(ch.tau_b(), rho_e);
  const double dab = static_cast<double>(p.da) * ch.dim_out();
  const double n = static_cast<double>(p.da) * p.de;
  p.rotate_choi = dab * dab * p.de * p.de < p.da * n * n;
  if (p.rotate_choi) {
    const long de = p.de;
    p.regrouped.resize(static_cast<long>(p.da) * p.da, de * de);
    for (int a = 0; a < p.da; ++a)
      for (int ap = 0; ap < p.da; ++ap)
        for (long e = 0; e < de; ++e)
          for (long ep = 0; ep < de; ++ep) p.regrouped(a * p.da + ap, e * de + ep) = p.rho(a * de + e, ap * de + ep);
  }
  return p;
}

// T(U X U^dagger) = T_U(X) where T_U has Choi matrix (U^T (x) I) J (conj(U) (x) I). With
// X regrouped as rows (a, a') and columns (e, e'), applying T_U is a single product.
CMatrix apply_rotated(const Channel& ch, const CMatrix& u, const CMatrix& x_regrouped, int rest) {
  const int din = ch.dim_in(), dout = ch.dim_out();
  const CMatrix j = conjugate_leading(ch.choi().matrix(), u.transpose());
  CMatrix jr(static_cast<long>(dout) * dout, static_cast<long>(din) * din);
  for (int a = 0; a < din; ++a)
    for (int ap = 0; ap < din; ++ap)
      for (int b = 0; b < dout; ++b)
        for (int bp = 0; bp < dout; ++bp) jr(b * dout + bp, a * din + ap) = j(a * dout + b, ap * dout + bp);
  const CMatrix prod = static_cast<double>(din) * (jr * x_regrouped);
  CMatrix out(static_cast<long>(dout) * rest, static_cast<long>(dout) * rest);
  for (int b = 0; b < dout; ++b)
    for (int bp = 0; bp < dout; ++bp)
      for (int e = 0; e < rest; ++e)
        for (int ep = 0; ep < rest; ++ep)
          out(static_cast<long>(b) * rest + e, static_cast<long>(bp) * rest + ep) = prod(b * dout + bp, static_cast<long>(e) * rest + ep);
  return out;
}

double distance_at(const Prepared& p, const Channel& ch, const CMatrix& u) {
  const CMatrix out = p.rotate_choi ? apply_rotated(ch, u, p.regrouped, p.de) : ch.apply_leading(conjugate_leading(p.rho, u), p.de);
  return trace_norm(out - p.reference);
}

struct H2Terms {
  double ae = 0.0;
  double ab = 0.0;
};

H2Terms h2_terms(const StateOperator& state, const Labels& a, const Channel& ch, bool optimize) {
  const Labels e = complement(state, a);
  H2Terms t;
  t.ae = h2(state, a, e, optimize).value;
  t.ab = h2(ch.choi(), {"A'"}, {"B"}, optimize).value;
  return t;
}

struct HminTerms {
  double ae = 0.0;
  double ab = 0.0;
};

HminTerms hmin_terms(const StateOperator& state, const Labels& a, const Channel& ch, double eps) {
  if (!(eps >= 0.0 && eps < 1.0)) throw Error(ErrorKind::InvalidArgument, "bound_smooth: eps must be in [0, 1)");
  if (ch.trace_class() == TraceClass::General)
    throw Error(ErrorKind::Precondition, "bound_smooth: tr J(T) must not exceed 1");
  if (eps > 0.0 && ch.trace_class() != TraceClass::TracePreserving)
    throw Error(ErrorKind::Precondition, "bound_smooth: eps > 0 requires a trace-preserving channel");
  const Labels e = complement(state, a);
  HminTerms t;
  t.ae = h_min_smooth(state, a, e, eps).value;
  // The Choi state of a trace non-increasing map is subnormalized; only eps = 0 reaches here.
  t.ab = eps > 0.0 ? h_min_smooth(ch.choi(), {"A'"}, {"B"}, eps).value : h_min(ch.choi(), {"A'"}, {"B"}).value;
  return t;
}

void check_unitary(const CMatrix& u, int d) {
  if (u.rows() != d || u.cols() != d) throw Error(ErrorKind::DimensionMismatch, "sample_distance: U must act on A");
  const double dev = (u.adjoint() * u - CMatrix::Identity(d, d)).cwiseAbs().maxCoeff();
  if (dev > 1e-10) throw Error(ErrorKind::InvalidArgument, "sample_distance: U is not unitary");
}

}  // namespace

double sample_distance(const StateOperator& state, const Labels& a, const Channel& channel, const CMatrix& u) {
  Prepared p = prepare(state, a, channel);
  check_unitary(u, p.da);
  return distance_at(p, channel, u);
}

double decoupling_distance(const StateOperator& state, const Labels& a, const Channel& channel) {
  Prepared p = prepare(state, a, channel);
  const CMatrix rho_a = partial_trace_raw(p.rho, {p.da, p.de}, {0});
  const CMatrix rho_e = partial_trace_raw(p.rho, {p.da, p.de}, {1});
  const CMatrix out = channel.apply_leading(p.rho, p.de);
  return trace_norm(out - kron(channel.apply_leading(rho_a, 1), rho_e));
}

double bound_nonsmooth(const StateOperator& state, const Labels& a, const Channel& channel, bool optimize_h2) {
  prepare(state, a, channel);
  const H2Terms t = h2_terms(state, a, channel, optimize_h2);
  return std::exp2(-0.5 * (t.ae + t.ab));
}

double bound_smooth(const StateOperator& state, const Labels& a, const Channel& channel, double epsilon) {
  prepare(state, a, channel);
  const HminTerms t = hmin_terms(state, a, channel, epsilon);
  return std::exp2(-0.5 * (t.ae + t.ab)) + 12.0 * epsilon;
}

DecouplingReport run(const DecouplingExperiment& exp) {
  if (exp.num_samples < 1) throw Error(ErrorKind::InvalidArgument, "decoupling: num_samples must be positive");
  const Prepared p = prepare(exp.state, exp.a, exp.channel);
  std::vector<double> d(static_cast<std::size_t>(exp.num_samples));
  detail::parallel_for(d.size(), exp.workers, [&](std::size_t i) {
    auto rng = make_rng(exp.seed, i);
    d[i] = distance_at(p, exp.channel, haar_unitary(p.da, rng));
  });

  DecouplingReport r;
  const auto stats = detail::mean_stats(d);
  r.empirical_mean = stats.mean;
  r.std_error = stats.std_error;
  r.epsilon = exp.epsilon;
  r.num_samples = exp.num_samples;
  r.seed = exp.seed;
  if (exp.num_samples <= kMaxStoredSamples) r.per_sample_distances = std::move(d);

  try {
    const H2Terms h = h2_terms(exp.state, exp.a, exp.channel, exp.optimize_h2);
    r.h2_ae = h.ae;
    r.h2_ab_tau = h.ab;
    r.bound_nonsmooth = std::exp2(-0.5 * (h.ae + h.ab));
    const TraceClass tc = exp.channel.trace_class();
    const bool smooth_ok = exp.epsilon == 0.0 ? tc != TraceClass::General : tc == TraceClass::TracePreserving;
    if (exp.smooth_bound && smooth_ok) {
      const HminTerms m = hmin_terms(exp.state, exp.a, exp.channel, exp.epsilon);
      r.hmin_ae = m.ae;
      r.hmin_ab_tau = m.ab;
      r.bound_smooth = std::exp2(-0.5 * (m.ae + m.ab)) + 12.0 * exp.epsilon;
    }
  } catch (const Error& e) {
    r.bound_nonsmooth = std::numeric_limits<double>::quiet_NaN();
    r.bound_smooth.reset();
    r.bound_error = e.what();
  }
  return r;
}

ConverseParams ConverseParams::defaults(double eps) {
  ConverseParams c;
  c.eps = eps;
  c.eps1 = std::sqrt(eps);
  c.eps2 = 0.0;
  c.eps3 = 2.0 * std::sqrt(eps);
  return c;
}

ConverseReport converse_check(const StateOperator& state, const Labels& a, const Channel& channel,
                              const ConverseParams& params) {
  if (channel.trace_class() != TraceClass::TracePreserving)
    throw Error(ErrorKind::Precondition, "converse_check: channel must be trace preserving");
  if (!(params.eps >= 0.0) || !(params.eps1 > 0.0) || !(params.eps2 >= 0.0) || !(params.eps3 >= 0.0))
    throw Error(ErrorKind::InvalidArgument, "converse_check: need eps >= 0, eps1 > 0, eps2 >= 0, eps3 >= 0");
  ConverseReport r;
  r.measured_distance = decoupling_distance(state, a, channel);
  if (r.measured_distance > params.eps + 1e-12) {
    std::ostringstream os;
    os << "converse_check: measured decoupling distance " << r.measured_distance << " exceeds eps = " << params.eps;
    throw Error(ErrorKind::Precondition, os.str());
  }
  const Labels e = complement(state, a);
  const StateOperator tau = converse_tau(channel, reduce_to(state, a).matrix());

  r.hmax_ab_tau = h_max_smooth(tau, {"A", "B"}, {}, params.eps2).value;
  r.hmin_b_tau = h_min_smooth(tau, {"B"}, {}, params.eps3).value;
  r.hmax_a_given_b_tau = h_max_smooth(tau, {"A"}, {"B"}, params.eps2).value;
  r.rhs = -std::log2(2.0 / (params.eps1 * params.eps1));

  r.smoothing_ae = params.eps1 + 2.0 * params.eps2 + params.eps3 + std::sqrt(2.0 * params.eps);
  if (r.smoothing_ae >= 1.0) {
    // Every subnormalized state lies in the ball, so the smooth min-entropy is unbounded.
    r.vacuous = true;
    r.hmin_ae = std::numeric_limits<double>::infinity();
    r.lhs = std::numeric_limits<double>::infinity();
    r.slack = std::numeric_limits<double>::infinity();
    r.holds = true;
    return r;
  }
  r.hmin_ae = h_min_smooth(state, a, e, r.smoothing_ae).value;
  r.lhs = r.hmin_ae + r.hmax_ab_tau - r.hmin_b_tau;
  r.slack = r.lhs - r.rhs;
  r.holds = r.lhs >= r.rhs - 1e-6;
  return r;
}

}  // namespace qdc
