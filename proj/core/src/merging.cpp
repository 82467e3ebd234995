// Copyright 2026 The qdecouple Authors.
// SPDX-License-Identifier: Apache-2.0

#include "qdc/merging.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "parallel.hpp"

namespace qdc {

namespace {

// Sampled mode still materializes one K|A|-long frame per block.
constexpr long long kSampledSideLimit = 1LL << 22;

struct Polar {
  CMatrix v;
  double trace_norm = 0.0;
};

// V with tr(M V^T) = ||M||_1: M = U S W^dagger gives V = conj(U_r) W_r^T on the rank-r part.
Polar polar_decoder(const CMatrix& m) {
  Eigen::BDCSVD<CMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVector& s = svd.singularValues();
  const double smax = s.size() ? s(0) : 0.0;
  int r = 0;
  while (r < s.size() && s(r) > 1e-12 * smax) ++r;
  Polar p;
  p.v = svd.matrixU().leftCols(r).conjugate() * svd.matrixV().leftCols(r).transpose();
  p.trace_norm = s.sum();
  return p;
}

// Amplitudes as a (rest x bob) matrix with the non-Bob factors in `rest` order.
CMatrix cut_matrix(const PureState& s, const Labels& rest, const Labels& bob) {
  std::vector<int> perm;
  for (const auto& l : rest) perm.push_back(s.dims.index_of(l));
  for (const auto& l : bob) perm.push_back(s.dims.index_of(l));
  const CVector v = permute_vector_raw(s.amplitudes, s.dims.dims(), perm);
  const int dr = s.dims.dim_of(rest);
  const int db = s.dims.dim_of(bob);
  CMatrix m(dr, db);
  for (int r = 0; r < dr; ++r)
    for (int b = 0; b < db; ++b) m(r, b) = v(static_cast<long>(r) * db + b);
  return m;
}

Labels others(const DimsLabel& dims, const Labels& bob) {
  for (const auto& l : bob)
    if (!dims.has(l)) throw Error(ErrorKind::UnknownLabel, "unknown label '" + l + "'");
  Labels out;
  for (const auto& l : dims.labels())
    if (std::find(bob.begin(), bob.end(), l) == bob.end()) out.push_back(l);
  return out;
}

struct Entry {
  int a, b, e;
  cd v;
};

// psi reordered to (A, B, E) and stored by its nonzero amplitudes.
struct Prepared {
  int da = 1, db = 1, de = 1;
  std::vector<Entry> nz;
  CMatrix rho_e;
};

Prepared prepare(const MergingInstance& in) {
  const DimsLabel& dims = in.psi.dims;
  if (in.a == in.b) throw Error(ErrorKind::DuplicateLabel, "merging: A and B must differ");
  const Labels e = others(dims, {in.a, in.b});
  if (in.psi.amplitudes.size() != dims.total())
    throw Error(ErrorKind::DimensionMismatch, "merging: amplitude count differs from the dimensions");
  if (std::abs(in.psi.amplitudes.squaredNorm() - 1.0) > 1e-9)
    throw Error(ErrorKind::InvalidState, "merging: psi must be a unit vector");
  Prepared p;
  p.da = dims.dim_of(in.a);
  p.db = dims.dim_of(in.b);
  p.de = dims.dim_of(e);
  Labels order = {in.a, in.b};
  order.insert(order.end(), e.begin(), e.end());
  std::vector<int> perm;
  for (const auto& l : order) perm.push_back(dims.index_of(l));
  const CVector v = permute_vector_raw(in.psi.amplitudes, dims.dims(), perm);
  CMatrix by_e(static_cast<long>(p.da) * p.db, p.de);  // rows (a, b), columns e
  for (int a = 0; a < p.da; ++a)
    for (int b = 0; b < p.db; ++b)
      for (int x = 0; x < p.de; ++x) {
        const cd val = v((static_cast<long>(a) * p.db + b) * p.de + x);
        by_e(a * p.db + b, x) = val;
        if (std::abs(val) > 0.0) p.nz.push_back({a, b, x, val});
      }
  p.rho_e = by_e.transpose() * by_e.conjugate();
  return p;
}

// Psi_sigma for one outcome: rows (l, e), columns (b0, b), from the L x K|A| block `ux`.
CMatrix outcome_matrix(const CMatrix& ux, const Prepared& p, int k) {
  const long l = ux.rows();
  CMatrix out = CMatrix::Zero(l * p.de, static_cast<long>(k) * p.db);
  const double norm = 1.0 / std::sqrt(static_cast<double>(k));
  for (const auto& z : p.nz) {
    const cd v = z.v * norm;
    for (long r = 0; r < l; ++r)
      for (int b0 = 0; b0 < k; ++b0)
        out(r * p.de + z.e, static_cast<long>(b0) * p.db + z.b) += ux(r, static_cast<long>(b0) * p.da + z.a) * v;
  }
  return out;
}

// Target Phi^L_{A1 B1} (x) psi_{B' B E}: rows (l, e), columns (b1, a', b).
CMatrix target_matrix(const Prepared& p, int l) {
  CMatrix t = CMatrix::Zero(static_cast<long>(l) * p.de, static_cast<long>(l) * p.da * p.db);
  const double norm = 1.0 / std::sqrt(static_cast<double>(l));
  for (const auto& z : p.nz)
    for (int r = 0; r < l; ++r)
      t(static_cast<long>(r) * p.de + z.e, (static_cast<long>(r) * p.da + z.a) * p.db + z.b) = z.v * norm;
  return t;
}

OutcomeRecord score(const CMatrix& psi_sigma, const CMatrix& t_red, int x) {
  OutcomeRecord r;
  r.x = x;
  r.p = psi_sigma.squaredNorm();
  if (r.p <= 0.0) return r;
  const CMatrix s = hermitian_part(psi_sigma * psi_sigma.adjoint()) / r.p;
  r.fidelity = std::min(1.0, fidelity(s, t_red));
  r.distance = trace_norm(s - t_red);
  return r;
}

bool exact_feasible(const Prepared& p, int k, int l) {
  const long long cap = dimension_cap();
  return static_cast<long long>(k) * p.da <= cap && static_cast<long long>(k) * p.db <= cap &&
         static_cast<long long>(l) * p.da * p.db <= cap;
}

MergingResult run_core(const MergingInstance& in) {
  if (in.k < 1 || in.l < 1) throw Error(ErrorKind::InvalidArgument, "merging: K and L must be positive");
  const Prepared p = prepare(in);
  const long long side = static_cast<long long>(in.k) * p.da;
  if (side % in.l != 0) {
    std::ostringstream os;
    os << "merging: L = " << in.l << " does not divide K|A| = " << side;
    throw Error(ErrorKind::InvalidArgument, os.str());
  }
  const long long n_out = side / in.l;
  const bool feasible = exact_feasible(p, in.k, in.l);
  bool sampled = false;
  switch (in.mode) {
    case MergingMode::Exact:
      if (!feasible) throw Error(ErrorKind::DimensionCap, "merging: exact mode exceeds the dimension cap");
      break;
    case MergingMode::Sampled: sampled = true; break;
    case MergingMode::Auto: sampled = !feasible; break;
  }
  if (sampled && (side > kSampledSideLimit || static_cast<long long>(in.l) * p.de > dimension_cap()))
    throw Error(ErrorKind::DimensionCap, "merging: K|A| too large even for sampled mode");

  const CMatrix t_red = kron(CMatrix::Identity(in.l, in.l) / static_cast<double>(in.l), p.rho_e);
  const double four_eps = 4.0 * in.epsilon_target;
  MergingResult res;
  res.cost_bits = std::log2(static_cast<double>(in.k)) - std::log2(static_cast<double>(in.l));
  res.num_outcomes = static_cast<int>(n_out);
  res.sampled = sampled;

  if (!sampled) {
    auto rng = make_rng(RngSeed{in.seed.seed, in.seed.stream + "/unitary"}, 0);
    const CMatrix u = haar_unitary(static_cast<int>(side), rng);
    const CMatrix target = target_matrix(p, in.l);
    std::vector<OutcomeRecord> rec(static_cast<std::size_t>(n_out));
    std::vector<double> mismatch(rec.size(), 0.0);
    detail::parallel_for(rec.size(), in.workers, [&](std::size_t x) {
      const CMatrix psi_sigma = outcome_matrix(u.middleRows(static_cast<long>(x) * in.l, in.l), p, in.k);
      rec[x] = score(psi_sigma, t_red, static_cast<int>(x));
      if (rec[x].p <= 0.0) return;
      // Bob's decoder acts on (B0, B) only and maps into (B1, B', B).
      const Polar dec = polar_decoder(target.adjoint() * psi_sigma);
      const CMatrix decoded = psi_sigma * dec.v.transpose();
      const double overlap = std::abs((target.adjoint() * decoded).trace()) / std::sqrt(rec[x].p);
      mismatch[x] = std::abs(overlap - rec[x].fidelity);
    });
    std::vector<double> contrib(rec.size()), probs(rec.size()), good(rec.size());
    for (std::size_t x = 0; x < rec.size(); ++x) {
      contrib[x] = std::sqrt(rec[x].p / static_cast<double>(n_out)) * rec[x].fidelity;
      probs[x] = rec[x].p;
      good[x] = rec[x].distance <= four_eps ? rec[x].p : 0.0;
    }
    res.fidelity = detail::pairwise_sum(contrib.data(), contrib.size());
    res.probability_sum = detail::pairwise_sum(probs.data(), probs.size());
    res.decoupled_fraction = detail::pairwise_sum(good.data(), good.size());
    res.decoder_mismatch = *std::max_element(mismatch.begin(), mismatch.end());
    res.per_outcome = std::move(rec);
    return res;
  }

  if (in.samples < 1) throw Error(ErrorKind::InvalidArgument, "merging: samples must be positive");
  std::vector<OutcomeRecord> rec(static_cast<std::size_t>(in.samples));
  const RngSeed block_seed{in.seed.seed, in.seed.stream + "/block"};
  detail::parallel_for(rec.size(), in.workers, [&](std::size_t j) {
    auto rng = make_rng(block_seed, j);
    const CMatrix ux = haar_isometry(static_cast<int>(side), in.l, rng).adjoint();
    rec[j] = score(outcome_matrix(ux, p, in.k), t_red, static_cast<int>(j));
  });
  const double n = static_cast<double>(n_out);
  std::vector<double> contrib(rec.size()), probs(rec.size()), good(rec.size());
  for (std::size_t j = 0; j < rec.size(); ++j) {
    contrib[j] = std::sqrt(n * rec[j].p) * rec[j].fidelity;
    probs[j] = n * rec[j].p;
    good[j] = rec[j].distance <= four_eps ? n * rec[j].p : 0.0;
  }
  const auto stats = detail::mean_stats(contrib);
  res.fidelity = stats.mean;
  res.fidelity_std_error = stats.std_error;
  res.probability_sum = detail::mean_stats(probs).mean;
  res.decoupled_fraction = detail::mean_stats(good).mean;
  res.per_outcome = std::move(rec);
  return res;
}

void attach_bounds(MergingResult& r, const MergingInstance& in) {
  if (!(in.epsilon_target > 0.0)) return;
  const StateOperator rho = reduce_to(in.psi.density(), {in.a}, {in.b});
  r.bound_achievable = cost_achievable(rho, {in.a}, {in.b}, in.epsilon_target);
  if (4.0 * std::sqrt(in.epsilon_target) < 1.0) r.bound_converse = cost_converse(rho, {in.a}, {in.b}, in.epsilon_target);
}

}  // namespace

MeasurementIsometry measurement_isometry(const CMatrix& u, int l) {
  const long side = u.rows();
  if (u.cols() != side) throw Error(ErrorKind::DimensionMismatch, "measurement_isometry: U must be square");
  if (l < 1 || side % l != 0) throw Error(ErrorKind::InvalidArgument, "measurement_isometry: L must divide K|A|");
  const long n = side / l;
  check_cap(static_cast<long long>(l) * n * n, "measurement_isometry");
  MeasurementIsometry m;
  m.num_outcomes = static_cast<int>(n);
  m.w = CMatrix::Zero(l * n * n, side);
  for (long x = 0; x < n; ++x)
    for (long r = 0; r < l; ++r) m.w.row((r * n + x) * n + x) = u.row(x * l + r);
  return m;
}

UhlmannResult uhlmann_isometry(const PureState& sigma, const PureState& target, const Labels& sigma_bob,
                               const Labels& target_bob, double delta) {
  const Labels rest = others(sigma.dims, sigma_bob);
  const Labels rest_t = others(target.dims, target_bob);
  if (rest.size() != rest_t.size()) throw Error(ErrorKind::DimensionMismatch, "uhlmann: non-Bob factors differ");
  for (const auto& l : rest)
    if (!target.dims.has(l) || target.dims.dim_of(l) != sigma.dims.dim_of(l) ||
        std::find(target_bob.begin(), target_bob.end(), l) != target_bob.end())
      throw Error(ErrorKind::DimensionMismatch, "uhlmann: non-Bob factor '" + l + "' differs");
  const CMatrix ps = cut_matrix(sigma, rest, sigma_bob);
  const CMatrix pt = cut_matrix(target, rest, target_bob);
  const double ns = ps.norm(), nt = pt.norm();
  if (!(ns > 0.0) || !(nt > 0.0)) throw Error(ErrorKind::InvalidState, "uhlmann: zero vector");

  UhlmannResult r;
  const CMatrix rs = ps * ps.adjoint() / (ns * ns);
  const CMatrix rt = pt * pt.adjoint() / (nt * nt);
  r.marginal_fidelity = std::min(1.0, fidelity(rs, rt));
  const double pd = std::sqrt(std::max(0.0, 1.0 - r.marginal_fidelity * r.marginal_fidelity));
  if (pd > delta + 1e-12) {
    std::ostringstream os;
    os << "uhlmann: reductions are " << pd << " apart in purified distance, above delta = " << delta;
    throw Error(ErrorKind::Precondition, os.str());
  }
  const Polar dec = polar_decoder(pt.adjoint() * ps);
  r.v = dec.v;
  r.fidelity = std::abs((pt.adjoint() * (ps * dec.v.transpose())).trace()) / (ns * nt);
  return r;
}

MergingResult run_merging(const MergingInstance& instance) {
  MergingResult r = run_core(instance);
  attach_bounds(r, instance);
  return r;
}

MergingSummary run_merging_seeds(MergingInstance instance, const std::vector<std::uint64_t>& seeds) {
  MergingSummary s;
  s.seeds = seeds;
  std::optional<MergingResult> bounds;
  for (std::uint64_t seed : seeds) {
    instance.seed.seed = seed;
    MergingResult r = run_core(instance);
    if (!bounds) {
      bounds.emplace();
      attach_bounds(*bounds, instance);
    }
    r.bound_achievable = bounds->bound_achievable;
    r.bound_converse = bounds->bound_converse;
    s.runs.push_back(std::move(r));
  }
  std::vector<double> f;
  for (const auto& r : s.runs) f.push_back(r.fidelity);
  const auto stats = detail::mean_stats(f);
  s.mean_fidelity = stats.mean;
  s.std_error = stats.std_error;
  return s;
}

CostBound realize_cost(double target) {
  if (!std::isfinite(target)) throw Error(ErrorKind::InvalidArgument, "realize_cost: target must be finite");
  // Targets within 1e-9 of an integer are taken as that integer.
  const double nearest = std::round(target);
  const double c = std::abs(target - nearest) <= 1e-9 ? nearest : std::ceil(target);
  CostBound b;
  b.raw = target;
  b.ell = c < 0.0 ? static_cast<int>(-c) : 0;
  b.kappa = static_cast<int>(c) + b.ell;
  if (b.kappa > 30 || b.ell > 30) throw Error(ErrorKind::DimensionCap, "realize_cost: K or L exceeds 2^30");
  b.realized = static_cast<double>(b.kappa - b.ell);
  return b;
}

CostBound cost_achievable(const StateOperator& state, const Labels& target, const Labels& condition, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error(ErrorKind::InvalidArgument, "cost_achievable: eps must be in (0, 1)");
  const double hmax = h_max_smooth(state, target, condition, epsilon * epsilon / 13.0).value;
  const double raw = hmax - 4.0 * std::log2(epsilon) + 2.0 * std::log2(13.0);
  CostBound b = realize_cost(raw);
  b.raw = raw;
  return b;
}

double cost_converse(const StateOperator& state, const Labels& target, const Labels& condition, double epsilon) {
  if (!(epsilon > 0.0)) throw Error(ErrorKind::InvalidArgument, "cost_converse: eps must be positive");
  const double smoothing = 4.0 * std::sqrt(epsilon);
  if (!(smoothing < 1.0)) throw Error(ErrorKind::InvalidArgument, "cost_converse: 4 sqrt(eps) must be below 1");
  return h_max_smooth(state, target, condition, smoothing).value + std::log2(epsilon) - 1.0;
}

}  // namespace qdc
