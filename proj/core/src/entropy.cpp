// Copyright 2026 The qdecouple Authors.
// SPDX-License-Identifier: Apache-2.0

#include "qdc/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace qdc {

namespace {

struct Bipartite {
  CMatrix rho;  // on A (x) B, A leading
  int da = 1;
  int db = 1;
};

Bipartite bipartite(const StateOperator& state, const Labels& target, const Labels& condition) {
  for (const auto& t : target)
    if (std::find(condition.begin(), condition.end(), t) != condition.end())
      throw Error(ErrorKind::InvalidArgument, "target and condition share label '" + t + "'");
  for (const auto& l : target)
    if (!state.dims().has(l)) throw Error(ErrorKind::UnknownLabel, "unknown label '" + l + "'");
  for (const auto& l : condition)
    if (!state.dims().has(l)) throw Error(ErrorKind::UnknownLabel, "unknown label '" + l + "'");
  Bipartite b;
  b.da = state.dims().dim_of(target);
  b.db = state.dims().dim_of(condition);
  if (target.empty() && condition.empty()) {
    b.rho = CMatrix::Constant(1, 1, state.trace());
  } else {
    b.rho = reduce_to(state, target, condition).matrix();
  }
  return b;
}

double log2_safe(double x) { return x > 0.0 ? std::log2(x) : -std::numeric_limits<double>::infinity(); }

double entropy_bits(const CMatrix& m) {
  RVector ev = herm_eigenvalues(m);
  double h = 0.0;
  for (int i = 0; i < ev.size(); ++i)
    if (ev(i) > 0.0) h -= ev(i) * std::log2(ev(i));
  return h;
}

void require_normalized(const CMatrix& rho, const char* where) {
  const double t = rho.trace().real();
  if (std::abs(t - 1.0) > 1e-9) {
    std::ostringstream os;
    os << where << ": state must be normalized (trace " << t << ")";
    throw Error(ErrorKind::InvalidState, os.str());
  }
}

// Accepts a MaxIter result whose last iterate meets the default certificate.
sdp::Solution solve_checked(const sdp::Problem& p, const char* what) {
  auto certified = [](const sdp::Solution& s) {
    return s.status == sdp::Status::Optimal ||
           (s.status == sdp::Status::MaxIter && s.primal_residual <= 1e-8 && s.dual_residual <= 1e-8 &&
            std::abs(s.gap) <= 1e-7 * (1.0 + std::abs(s.primal_obj)));
  };
  sdp::Options opt;
  opt.gap_rel = 1e-9;
  sdp::Solution s = sdp::solve(p, opt);
  if (certified(s)) return s;
  // Chasing the tight gap can lose primal feasibility to round-off; the looser target
  // stops before that happens.
  opt.gap_rel = 1e-7;
  s = sdp::solve(p, opt);
  if (certified(s)) return s;
  std::ostringstream os;
  os << what << ": SDP ended with status " << sdp::to_string(s.status) << " after " << s.iterations
     << " iterations (gap " << s.gap << ", residuals " << s.primal_residual << ", " << s.dual_residual << ")";
  throw Error(ErrorKind::Solver, os.str());
}

struct Support {
  CMatrix v;  // n x r orthonormal columns
  RVector d;  // r positive eigenvalues
};

Support support_of(const CMatrix& rho) {
  auto [ev, vecs] = herm_eig(rho);
  const double cut = tolerances().pinv * std::max(ev.maxCoeff(), 0.0);
  std::vector<int> keep;
  for (int i = static_cast<int>(ev.size()) - 1; i >= 0; --i)
    if (ev(i) > cut && ev(i) > 0.0) keep.push_back(i);
  Support s;
  s.v = CMatrix(rho.rows(), static_cast<long>(keep.size()));
  s.d = RVector(static_cast<long>(keep.size()));
  for (size_t k = 0; k < keep.size(); ++k) {
    s.v.col(k) = vecs.col(keep[k]);
    s.d(k) = ev(keep[k]);
  }
  return s;
}

// Puts I_A (x) sigma into `block` starting at `off`.
void put_identity_tensor(sdp::LmiBuilder& lb, int block, int off, int da, const sdp::HermitianVar& sigma,
                         double scale = 1.0) {
  const int db = sigma.n;
  for (int a = 0; a < da; ++a)
    for (int i = 0; i < db; ++i)
      for (int j = i; j < db; ++j) lb.put(block, off + a * db + i, off + a * db + j, sigma.at(i, j).scaled(scale));
}

void put_constant(sdp::LmiBuilder& lb, int block, int off, const CMatrix& m, double scale = 1.0) {
  for (int i = 0; i < m.rows(); ++i)
    for (int j = i; j < m.cols(); ++j) {
      if (m(i, j) == cd(0.0)) continue;
      sdp::LinExpr e;
      e.constant = scale * m(i, j);
      lb.put(block, off + i, off + j, e);
    }
}

StateOperator normalized_witness(const CMatrix& s, int db) {
  CMatrix h = hermitian_part(s);
  const double t = h.trace().real();
  if (t > 0.0) h /= t;
  return StateOperator::trusted(DimsLabel({{"B", db}}), h);
}

// rho_AC of the canonical purification of rho_AB (C has dimension rank rho_AB).
struct Purified {
  CMatrix rho_ac;
  int rank = 0;
};

Purified purified_ac(const CMatrix& rho_ab, int da, int db) {
  Support s = support_of(rho_ab);
  const int r = std::max<int>(1, static_cast<int>(s.d.size()));
  check_cap(static_cast<long long>(da) * r, "purification");
  // psi[(a, b), k] = sqrt(d_k) v_k[(a, b)]; rho_AC = sum_b psi_b psi_b^dagger over the (a, k) index.
  CMatrix out = CMatrix::Zero(static_cast<long>(da) * r, static_cast<long>(da) * r);
  for (int b = 0; b < db; ++b) {
    CVector w = CVector::Zero(static_cast<long>(da) * r);
    for (int a = 0; a < da; ++a)
      for (int k = 0; k < static_cast<int>(s.d.size()); ++k) w(a * r + k) = std::sqrt(s.d(k)) * s.v(a * db + b, k);
    out.noalias() += w * w.adjoint();
  }
  return Purified{hermitian_part(out), r};
}

EntropyResult h_min_raw(const CMatrix& rho, int da, int db) {
  EntropyResult res;
  const double lmax = operator_norm_herm(rho);
  if (!(lmax > 0.0)) throw Error(ErrorKind::InvalidState, "h_min: zero operator");
  if (db == 1) {
    res.value = -std::log2(lmax);
    res.optimizer_sigma = StateOperator::trusted(DimsLabel({{"B", 1}}), CMatrix::Identity(1, 1));
    return res;
  }
  // Rescaled so that ||rho||_inf = 1 and tr sigma' >= 1.
  const int n = da * db;
  sdp::LmiBuilder lb;
  const int blk = lb.add_block(n);
  const auto sigma = lb.add_hermitian(db);
  for (int i = 0; i < db; ++i) lb.set_objective(sigma.offset + i, -1.0);
  put_identity_tensor(lb, blk, 0, da, sigma);
  put_constant(lb, blk, 0, rho, -1.0 / lmax);
  sdp::Solution s = solve_checked(lb.build(), "h_min");
  const double tr = -s.dual_obj;
  res.value = -std::log2(tr * lmax);
  res.certificate_gap = std::abs(s.gap) * lmax / std::max(tr * lmax, 1e-300);
  res.optimizer_sigma = normalized_witness(sigma.value(s.y), db);
  return res;
}

// max Re tr X over [[rho, X], [X^dagger, I (x) sigma]] >= 0, tr sigma <= 1.
EntropyResult h_max_direct(const CMatrix& rho, int da, int db) {
  EntropyResult res;
  const double t = rho.trace().real();
  if (!(t > 0.0)) throw Error(ErrorKind::InvalidState, "h_max: zero operator");
  Support sup = support_of(rho / t);
  const int r = static_cast<int>(sup.d.size());
  const int n = da * db;
  sdp::LmiBuilder lb;
  const int blk = lb.add_block(r + n);
  const int tr_blk = lb.add_block(1);
  const auto sigma = lb.add_hermitian(db);
  const auto y = lb.add_complex(r, n);
  for (int i = 0; i < r; ++i) {
    sdp::LinExpr e;
    e.constant = sup.d(i);
    lb.put(blk, i, i, e);
  }
  for (int i = 0; i < r; ++i)
    for (int c = 0; c < n; ++c) lb.put(blk, i, r + c, y.at(i, c));
  put_identity_tensor(lb, blk, r, da, sigma);
  sdp::LinExpr one;
  one.constant = 1.0;
  for (int i = 0; i < db; ++i) one += sigma.at(i, i).scaled(-1.0);
  lb.put(tr_blk, 0, 0, one);
  // Re tr(V Y) = sum_{x,i} Re(V_xi) Re(Y_ix) - Im(V_xi) Im(Y_ix)
  for (int i = 0; i < r; ++i)
    for (int x = 0; x < n; ++x) {
      const int slot = y.offset + 2 * (i * n + x);
      lb.set_objective(slot, sup.v(x, i).real());
      lb.set_objective(slot + 1, -sup.v(x, i).imag());
    }
  sdp::Solution s = solve_checked(lb.build(), "h_max");
  const double f = s.dual_obj;
  res.value = 2.0 * std::log2(f) + std::log2(t);
  res.certificate_gap = std::abs(s.gap) / std::max(f, 1e-300);
  res.optimizer_sigma = normalized_witness(sigma.value(s.y), db);
  return res;
}

double h2_value(const CMatrix& rho, int da, const CMatrix& s_quarter) {
  const int db = static_cast<int>(s_quarter.rows());
  CMatrix s = kron(CMatrix::Identity(da, da), s_quarter);
  CMatrix m = s * rho * s;
  (void)db;
  return -std::log2(m.squaredNorm());
}

// Euclidean projection of the spectrum onto {lambda_i >= floor, sum lambda_i = 1}.
CMatrix project_density(const CMatrix& h, double floor) {
  auto [ev, v] = herm_eig(h);
  const int d = static_cast<int>(ev.size());
  double lo = ev.minCoeff() - 1.0 - floor, hi = ev.maxCoeff() + 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    double s = 0.0;
    for (int i = 0; i < d; ++i) s += std::max(floor, ev(i) - mid);
    (s > 1.0 ? lo : hi) = mid;
  }
  RVector p(d);
  const double shift = 0.5 * (lo + hi);
  for (int i = 0; i < d; ++i) p(i) = std::max(floor, ev(i) - shift);
  p /= p.sum();
  return v * p.asDiagonal() * v.adjoint();
}

// Hermitian basis: E_ii, (E_ij + E_ji)/sqrt2, i(E_ij - E_ji)/sqrt2.
std::vector<CMatrix> hermitian_basis(int d) {
  std::vector<CMatrix> out;
  for (int i = 0; i < d; ++i) {
    CMatrix e = CMatrix::Zero(d, d);
    e(i, i) = 1.0;
    out.push_back(e);
  }
  const double r = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      CMatrix e = CMatrix::Zero(d, d);
      e(i, j) = r;
      e(j, i) = r;
      out.push_back(e);
      CMatrix f = CMatrix::Zero(d, d);
      f(i, j) = cd(0.0, r);
      f(j, i) = cd(0.0, -r);
      out.push_back(f);
    }
  return out;
}

// Best value of h2_at over a Bloch-ball grid for a qubit condition.
double h2_qubit_grid(const CMatrix& rho, int da, int steps) {
  double best = -std::numeric_limits<double>::infinity();
  const CMatrix x = (CMatrix(2, 2) << 0, 1, 1, 0).finished();
  const CMatrix y = (CMatrix(2, 2) << 0, cd(0, -1), cd(0, 1), 0).finished();
  const CMatrix z = (CMatrix(2, 2) << 1, 0, 0, -1).finished();
  for (int i = 0; i <= steps; ++i)
    for (int j = 0; j <= steps; ++j)
      for (int k = 0; k <= steps; ++k) {
        const double bx = -1.0 + 2.0 * i / steps, by = -1.0 + 2.0 * j / steps, bz = -1.0 + 2.0 * k / steps;
        if (bx * bx + by * by + bz * bz > 0.999) continue;
        CMatrix s = 0.5 * (CMatrix::Identity(2, 2) + bx * x + by * y + bz * z);
        try {
          best = std::max(best, h2_at(rho, da, s));
        } catch (const Error&) {
        }
      }
  return best;
}

}  // namespace

double von_neumann(const StateOperator& state, const Labels& target, const Labels& condition) {
  Bipartite b = bipartite(state, target, condition);
  require_normalized(b.rho, "von_neumann");
  const double hab = entropy_bits(b.rho);
  const double hb = b.db == 1 ? 0.0 : entropy_bits(partial_trace_raw(b.rho, {b.da, b.db}, {1}));
  return hab - hb;
}

EntropyResult h_min(const StateOperator& state, const Labels& target, const Labels& condition) {
  Bipartite b = bipartite(state, target, condition);
  return h_min_raw(b.rho, b.da, b.db);
}

EntropyResult h_max(const StateOperator& state, const Labels& target, const Labels& condition) {
  Bipartite b = bipartite(state, target, condition);
  const double t = b.rho.trace().real();
  if (!(t > 0.0)) throw Error(ErrorKind::InvalidState, "h_max: zero operator");
  if (b.db == 1) {
    EntropyResult res;
    res.value = 2.0 * log2_safe(psd_sqrt(b.rho).trace().real());
    res.optimizer_sigma = StateOperator::trusted(DimsLabel({{"B", 1}}), CMatrix::Identity(1, 1));
    return res;
  }
  EntropyResult direct = h_max_direct(b.rho, b.da, b.db);
  Purified p = purified_ac(b.rho / t, b.da, b.db);
  EntropyResult dual = h_min_raw(p.rho_ac, b.da, p.rank);
  const double via_dual = -dual.value + std::log2(t);
  direct.cross_check = std::abs(direct.value - via_dual);
  if (direct.cross_check > 1e-4) {
    std::ostringstream os;
    os << "h_max: direct SDP (" << direct.value << ") and duality route (" << via_dual << ") disagree";
    throw Error(ErrorKind::Solver, os.str());
  }
  direct.certificate_gap = std::max(direct.certificate_gap, dual.certificate_gap);
  return direct;
}

double h2_at(const CMatrix& rho_ab, int dim_a, const CMatrix& sigma_b) {
  const int db = static_cast<int>(sigma_b.rows());
  if (rho_ab.rows() != static_cast<long>(dim_a) * db)
    throw Error(ErrorKind::DimensionMismatch, "h2: sigma_B does not match the condition dimension");
  const CMatrix rho_b = partial_trace_raw(rho_ab, {dim_a, db}, {1});
  const CMatrix proj = psd_power(sigma_b, 0.0);
  const double outside = (rho_b - proj * rho_b * proj).trace().real();
  if (outside > 1e-9 * std::max(1.0, rho_b.trace().real()))
    throw Error(ErrorKind::Precondition, "h2: rho_B has support outside sigma_B");
  return h2_value(rho_ab, dim_a, psd_power(sigma_b, -0.25));
}

EntropyResult h2(const StateOperator& state, const Labels& target, const Labels& condition, bool optimize_sigma) {
  Bipartite b = bipartite(state, target, condition);
  const double t = b.rho.trace().real();
  if (!(t > 0.0)) throw Error(ErrorKind::InvalidState, "h2: zero operator");
  EntropyResult res;
  if (b.db == 1) {
    res.value = h2_at(b.rho, b.da, CMatrix::Identity(1, 1));
    res.optimizer_sigma = StateOperator::trusted(DimsLabel({{"B", 1}}), CMatrix::Identity(1, 1));
    return res;
  }
  CMatrix rho_b = partial_trace_raw(b.rho, {b.da, b.db}, {1});
  CMatrix sigma = hermitian_part(rho_b / rho_b.trace().real());
  double best = h2_at(b.rho, b.da, sigma);
  CMatrix best_sigma = sigma;
  res.lower_bound = true;
  if (optimize_sigma) {
    // Minimizes f(sigma) = tr[(S rho S)^2] = 2^{-H2} by projected gradient with backtracking.
    const double floor = 1e-8;
    const auto basis = hermitian_basis(b.db);
    auto f = [&](const CMatrix& s) { return std::exp2(-h2_value(b.rho, b.da, psd_power(s, -0.25))); };
    CMatrix cur = project_density(sigma, floor);
    double fcur = f(cur);
    double step = 1.0;
    for (int it = 0; it < 300; ++it) {
      CMatrix grad = CMatrix::Zero(b.db, b.db);
      const double h = 1e-7;
      for (const auto& e : basis) {
        const double g = (f(cur + h * e) - f(cur - h * e)) / (2.0 * h);
        grad += g * e;
      }
      const double gn = grad.norm();
      if (gn < 1e-14) break;
      bool moved = false;
      for (int bt = 0; bt < 40; ++bt) {
        CMatrix cand = project_density(cur - (step / gn) * grad, floor);
        const double fc = f(cand);
        if (fc < fcur - 1e-15 * std::abs(fcur)) {
          const double delta = (cur - cand).norm();
          cur = cand;
          fcur = fc;
          moved = true;
          step *= 2.0;
          if (delta < 1e-12) moved = false;
          break;
        }
        step *= 0.5;
      }
      if (!moved) break;
    }
    const double val = -std::log2(fcur);
    if (val > best) {
      best = val;
      best_sigma = cur;
    }
    if (b.db == 2) {
      const double grid = h2_qubit_grid(b.rho, b.da, 40);
      res.lower_bound = grid > best + 1e-3;
    }
  }
  res.value = best;
  res.optimizer_sigma = normalized_witness(best_sigma, b.db);
  return res;
}

// Variables and constraints shared by the smoothing programs: [[D, X'], [X'^dagger, rho-hat]]
// >= 0 on the support of rho, I (x) sigma' >= rho-hat and tr rho-hat <= 1. `fid` is
// Re tr(V X') <= F(rho, rho-hat).
struct SmoothingProgram {
  sdp::LmiBuilder lb;
  sdp::HermitianVar rho_hat;
  sdp::HermitianVar sigma;
  sdp::LinExpr fid;
};

SmoothingProgram smoothing_program(const Support& sup, int da, int db) {
  const int n = da * db;
  const int r = static_cast<int>(sup.d.size());
  SmoothingProgram sp;
  sdp::LmiBuilder& lb = sp.lb;
  const int fid_blk = lb.add_block(r + n);
  const int dom_blk = lb.add_block(n);
  const int tr_scalar = lb.add_block(1);
  sp.rho_hat = lb.add_hermitian(n);
  sp.sigma = lb.add_hermitian(db);
  const auto x = lb.add_complex(r, n);
  for (int i = 0; i < r; ++i) {
    sdp::LinExpr e;
    e.constant = sup.d(i);
    lb.put(fid_blk, i, i, e);
  }
  for (int i = 0; i < r; ++i)
    for (int c = 0; c < n; ++c) lb.put(fid_blk, i, r + c, x.at(i, c));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) lb.put(fid_blk, r + i, r + j, sp.rho_hat.at(i, j));
  put_identity_tensor(lb, dom_blk, 0, da, sp.sigma);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) lb.put(dom_blk, i, j, sp.rho_hat.at(i, j).scaled(-1.0));
  for (int i = 0; i < r; ++i)
    for (int c = 0; c < n; ++c) {
      const int slot = x.offset + 2 * (i * n + c);
      sp.fid.terms.push_back({slot, cd(sup.v(c, i).real(), 0.0)});
      sp.fid.terms.push_back({slot + 1, cd(-sup.v(c, i).imag(), 0.0)});
    }
  sdp::LinExpr tr;
  tr.constant = 1.0;
  for (int i = 0; i < n; ++i) tr += sp.rho_hat.at(i, i).scaled(-1.0);
  lb.put(tr_scalar, 0, 0, tr);
  return sp;
}

void fill_smooth_result(EntropyResult& res, const SmoothingProgram& sp, const sdp::Solution& s, int da, int db) {
  res.optimizer_sigma = normalized_witness(sp.sigma.value(s.y), db);
  DimsLabel dims({{"A", da}, {"B", db}});
  res.smoothed_state = StateOperator::trusted(dims, hermitian_part(sp.rho_hat.value(s.y)));
}

// Max F(rho, rho-hat) over the smoothing program with tr sigma' <= lambda. The optimum is
// concave and nondecreasing in lambda.
struct FidelityAt {
  double f = 0.0;
  EntropyResult witness;
};

FidelityAt max_fidelity_at(const Support& sup, int da, int db, double lambda) {
  SmoothingProgram sp = smoothing_program(sup, da, db);
  const int cap = sp.lb.add_block(1);
  sdp::LinExpr e;
  e.constant = lambda;
  for (int i = 0; i < db; ++i) e += sp.sigma.at(i, i).scaled(-1.0);
  sp.lb.put(cap, 0, 0, e);
  for (const auto& [slot, c] : sp.fid.terms) sp.lb.set_objective(slot, c.real());
  const sdp::Solution s = solve_checked(sp.lb.build(), "h_min_smooth");
  FidelityAt out;
  out.f = s.dual_obj;
  out.witness.certificate_gap = std::abs(s.gap);
  fill_smooth_result(out.witness, sp, s, da, db);
  return out;
}

// Root of F(lambda) = sqrt(1 - eps^2) by a safeguarded secant on the bracket
// [lo, (1 - eps^2) 2^{-H_min}], where scaling rho by 1 - eps^2 certifies the upper end.
// The fidelity constraint of the direct program leaves an O(eps^2) slack everywhere on its
// feasible set, which double precision cannot resolve for small eps; here the smoothing
// parameter enters only through the root.
EntropyResult h_min_smooth_by_root(const Bipartite& b, const Support& sup, double epsilon) {
  const double target = std::sqrt(1.0 - epsilon * epsilon);
  double hi = (1.0 - epsilon * epsilon) * std::exp2(-h_min_raw(b.rho, b.da, b.db).value);
  FidelityAt at_hi = max_fidelity_at(sup, b.da, b.db, hi);
  double f_hi = at_hi.f - target;
  double lo = 0.5 * hi;
  FidelityAt at_lo = max_fidelity_at(sup, b.da, b.db, lo);
  double f_lo = at_lo.f - target;
  for (int i = 0; i < 64 && f_lo >= 0.0; ++i) {
    hi = lo;
    f_hi = f_lo;
    at_hi = std::move(at_lo);
    lo *= 0.5;
    at_lo = max_fidelity_at(sup, b.da, b.db, lo);
    f_lo = at_lo.f - target;
  }
  if (f_lo >= 0.0) throw Error(ErrorKind::Solver, "h_min_smooth: no bracket for the smoothing root");
  // Illinois variant of regula falsi; F is only resolved to about 1e-9.
  int side = 0;
  for (int it = 0; it < 100 && hi - lo > 1e-10 * hi && f_hi > 1e-10; ++it) {
    double mid = hi - f_hi * (hi - lo) / (f_hi - f_lo);
    if (!(mid > lo && mid < hi)) mid = 0.5 * (lo + hi);
    FidelityAt m = max_fidelity_at(sup, b.da, b.db, mid);
    const double fm = m.f - target;
    if (fm >= 0.0) {
      hi = mid;
      f_hi = fm;
      at_hi = std::move(m);
      if (side == 1) f_lo *= 0.5;
      side = 1;
    } else {
      lo = mid;
      f_lo = fm;
      if (side == -1) f_hi *= 0.5;
      side = -1;
    }
  }
  EntropyResult res = std::move(at_hi.witness);
  res.value = -std::log2(hi);
  res.certificate_gap = std::max(res.certificate_gap, (hi - lo) / hi);
  return res;
}

EntropyResult h_min_smooth(const StateOperator& state, const Labels& target, const Labels& condition,
                           double epsilon) {
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw Error(ErrorKind::InvalidArgument, "smoothing parameter must be in [0, 1)");
  Bipartite b = bipartite(state, target, condition);
  require_normalized(b.rho, "h_min_smooth");
  if (epsilon == 0.0) return h_min_raw(b.rho, b.da, b.db);

  const Support sup = support_of(b.rho);
  SmoothingProgram sp = smoothing_program(sup, b.da, b.db);
  for (int i = 0; i < b.db; ++i) sp.lb.set_objective(sp.sigma.offset + i, -1.0);
  // Re tr(V X') >= sqrt(1 - eps^2)
  const int fid_scalar = sp.lb.add_block(1);
  sdp::LinExpr fid = sp.fid;
  fid.constant = -std::sqrt(1.0 - epsilon * epsilon);
  sp.lb.put(fid_scalar, 0, 0, fid);

  sdp::Solution s;
  try {
    s = solve_checked(sp.lb.build(), "h_min_smooth");
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Solver) throw;
    return h_min_smooth_by_root(b, sup, epsilon);
  }
  const double trs = -s.dual_obj;
  EntropyResult res;
  res.value = -std::log2(trs);
  res.certificate_gap = std::abs(s.gap) / std::max(trs, 1e-300);
  fill_smooth_result(res, sp, s, b.da, b.db);
  return res;
}

EntropyResult h_max_smooth(const StateOperator& state, const Labels& target, const Labels& condition,
                           double epsilon) {
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw Error(ErrorKind::InvalidArgument, "smoothing parameter must be in [0, 1)");
  Bipartite b = bipartite(state, target, condition);
  require_normalized(b.rho, "h_max_smooth");
  if (epsilon == 0.0) return h_max(state, target, condition);
  Purified p = purified_ac(b.rho, b.da, b.db);
  StateOperator ac = StateOperator::trusted(DimsLabel({{"A", b.da}, {"C", p.rank}}), p.rho_ac);
  EntropyResult r = h_min_smooth(ac, {"A"}, {"C"}, epsilon);
  r.value = -r.value;
  r.optimizer_sigma.reset();
  return r;
}

}  // namespace qdc
