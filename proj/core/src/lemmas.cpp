// Copyright 2026 The qdecouple Authors.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "qdc/decoupling.hpp"

namespace qdc {

namespace {

using Rng = std::mt19937_64;

CMatrix gaussian(int r, int c, Rng& rng) {
  std::normal_distribution<double> n(0.0, std::sqrt(0.5));
  CMatrix m(r, c);
  for (int j = 0; j < c; ++j)
    for (int i = 0; i < r; ++i) {
      const double re = n(rng);
      const double im = n(rng);
      m(i, j) = cd(re, im);
    }
  return m;
}

CMatrix random_hermitian(int d, Rng& rng) {
  const CMatrix g = gaussian(d, d, rng);
  return (g + g.adjoint()) / 2.0;
}

int pick(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

StateOperator random_state(const DimsLabel& dims, Rng& rng) {
  const int d = dims.total();
  return StateOperator(dims, random_density(d, pick(rng, 1, d), rng));
}

double scale_of(double x) { return 1.0 + std::abs(x); }

// Runs `trial(rng, i)` for each trial; it returns the slack (>= -tol passes) and may set
// `what` to describe the instance.
template <class Fn>
LemmaCheck run_check(const std::string& name, std::uint64_t seed, int trials, double tol, Fn trial) {
  LemmaCheck c;
  c.name = name;
  c.trials = trials;
  c.worst_slack = std::numeric_limits<double>::infinity();
  const auto t0 = std::chrono::steady_clock::now();
  const RngSeed s{seed, "lemma:" + name};
  for (int i = 0; i < trials; ++i) {
    auto rng = make_rng(s, static_cast<std::uint64_t>(i));
    std::string what;
    double slack;
    try {
      slack = trial(rng, what);
    } catch (const Error& e) {
      slack = -std::numeric_limits<double>::infinity();
      what = e.what();
    }
    c.worst_slack = std::min(c.worst_slack, slack);
    if (!(slack >= -tol)) {
      if (c.failures == 0) {
        std::ostringstream os;
        os << "trial " << i << ": slack " << slack << (what.empty() ? "" : " (" + what + ")");
        c.first_failure = os.str();
      }
      ++c.failures;
    }
  }
  if (trials == 0) c.worst_slack = 0.0;
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return c;
}

}  // namespace

std::vector<LemmaCheck> verify_proof_lemmas(std::uint64_t seed, int trials) {
  std::vector<LemmaCheck> out;
  if (trials <= 0) return out;

  out.push_back(run_check("swap_trick", seed, trials, 1e-10, [](Rng& rng, std::string&) {
    const int d = pick(rng, 2, 4);
    const CMatrix m = gaussian(d, d, rng), n = gaussian(d, d, rng);
    const cd lhs = (kron(m, n) * swap_operator(d)).trace();
    const cd rhs = (m * n).trace();
    return -std::abs(lhs - rhs) / scale_of(std::abs(rhs));
  }));

  out.push_back(run_check("twirl", seed, trials, 1e-9, [](Rng& rng, std::string&) {
    const int d = pick(rng, 2, 4);
    const CMatrix m = random_hermitian(d * d, rng);
    const auto [coef, e] = twirl_exact(m);
    const CMatrix f = swap_operator(d);
    const CMatrix v = haar_unitary(d, rng);
    const CMatrix vv = kron(v, v);
    const double norm = scale_of(m.norm());
    double err = std::abs(e.trace() - m.trace());
    err = std::max(err, std::abs((e * f).trace() - (m * f).trace()));
    err = std::max(err, (vv * e * vv.adjoint() - e).cwiseAbs().maxCoeff());
    return -err / norm;
  }));

  out.push_back(run_check("purity_ratio", seed, trials, 1e-10, [](Rng& rng, std::string&) {
    const int da = pick(rng, 2, 4), db = pick(rng, 2, 4);
    const CMatrix xi = random_density(da * db, pick(rng, 1, da * db), rng) * uniform(rng, 0.1, 3.0);
    const CMatrix xb = partial_trace_raw(xi, {da, db}, {1});
    const double ratio = (xi * xi).trace().real() / (xb * xb).trace().real();
    const double lower = ratio - 1.0 / da;
    const double upper = da - ratio;
    // The upper bound follows from xi <= |A| I (x) xi_B.
    const CMatrix gap = static_cast<double>(da) * kron(CMatrix::Identity(da, da), xb) - xi;
    const double psd = herm_eigenvalues(gap).minCoeff() / operator_norm_herm(xi);
    return std::min({lower, upper, psd});
  }));

  out.push_back(run_check("weyl_depolarization", seed, trials, 1e-10, [](Rng& rng, std::string&) {
    const int da = pick(rng, 2, 4), db = pick(rng, 1, 4);
    const CMatrix xi = random_density(da * db, pick(rng, 1, da * db), rng);
    CMatrix sum = CMatrix::Zero(da * db, da * db);
    for (const auto& w : weyl_operators(da)) sum += conjugate_leading(xi, w);
    const CMatrix expect = static_cast<double>(da) *
                           kron(CMatrix::Identity(da, da), partial_trace_raw(xi, {da, db}, {1}));
    return -(sum - expect).cwiseAbs().maxCoeff();
  }));

  auto trace_norm_bound = [](Rng& rng, std::string& what, bool near_singular) {
    const int d = pick(rng, 2, 4);
    CMatrix sigma = random_density(d, d, rng) * uniform(rng, 0.2, 2.0);
    CMatrix proj = CMatrix::Identity(d, d);
    if (near_singular) {
      // One eigenvalue 1e-9 times the largest and one exactly zero; M lives on the support.
      auto [ev, vecs] = herm_eig(sigma);
      RVector lam = ev;
      lam(0) = 0.0;
      lam(1) = 1e-9 * lam(d - 1);
      sigma = vecs * lam.cast<cd>().asDiagonal() * vecs.adjoint();
      proj = psd_power(sigma, 0.0);
      what = "near-singular sigma";
    }
    const bool hermitian = pick(rng, 0, 1) == 1;
    CMatrix m = hermitian ? random_hermitian(d, rng) : gaussian(d, d, rng);
    m = proj * m * proj;
    const CMatrix s4 = psd_power(sigma, -0.25);
    const CMatrix s2 = psd_power(sigma, -0.5);
    const double lhs = trace_norm(m);
    double rhs = std::sqrt(sigma.trace().real() * (s4 * m * s2 * m.adjoint() * s4).trace().real());
    if (hermitian) {
      const CMatrix k = s4 * m * s4;
      rhs = std::min(rhs, std::sqrt(sigma.trace().real() * (k * k).trace().real()));
    }
    return (rhs - lhs) / scale_of(lhs);
  };
  out.push_back(run_check("weighted_trace_norm", seed, trials, 1e-10,
                          [&](Rng& rng, std::string& what) { return trace_norm_bound(rng, what, false); }));
  out.push_back(run_check("weighted_trace_norm_near_singular", seed, trials, 1e-9,
                          [&](Rng& rng, std::string& what) { return trace_norm_bound(rng, what, true); }));

  out.push_back(run_check("fuchs_van_de_graaf", seed, trials, 1e-9, [](Rng& rng, std::string&) {
    const int d = pick(rng, 2, 4);
    const CMatrix r = random_density(d, pick(rng, 1, d), rng);
    const CMatrix s = random_density(d, pick(rng, 1, d), rng);
    const double f = fidelity(r, s);
    const double td = trace_distance(r, s);
    return std::min(td - (1.0 - f), std::sqrt(std::max(0.0, 1.0 - f * f)) - td);
  }));

  out.push_back(run_check("extension_map", seed, trials, 1e-7, [](Rng& rng, std::string&) {
    const int da = pick(rng, 2, 4), db = pick(rng, 1, 4);
    const DimsLabel dims({{"A", da}, {"B", db}});
    const StateOperator rho = random_state(dims, rng);
    const int ra = static_cast<int>((herm_eigenvalues(reduce_to(rho, {"A"}).matrix()).array() > 1e-10).count());
    const StateOperator sigma_a(DimsLabel({{"A", da}}), random_density(da, pick(rng, 1, ra), rng));
    const Extension ext = extension_map(rho, sigma_a);
    const double marg = (reduce_to(ext.sigma_ab, {"A"}).matrix() - sigma_a.matrix()).cwiseAbs().maxCoeff();
    const double pd = std::abs(purified_distance(rho, ext.sigma_ab) -
                               purified_distance(reduce_to(rho, {"A"}), sigma_a));
    return -std::max(marg, pd);
  }));
  return out;
}

std::vector<LemmaCheck> verify_entropy_lemmas(std::uint64_t seed, int trials) {
  std::vector<LemmaCheck> out;
  if (trials <= 0) return out;
  const double tol = 1e-6;
  const double smooth_tol = 1e-5;
  const double eps_grid[] = {0.0, 0.05, 0.1};

  out.push_back(run_check("h2_above_hmin", seed, trials, tol, [](Rng& rng, std::string&) {
    const int da = pick(rng, 2, 3), db = pick(rng, 2, 3);
    const DimsLabel dims({{"A", da}, {"B", db}});
    CMatrix m = random_density(da * db, da * db, rng) * uniform(rng, 0.5, 1.0);
    const StateOperator rho(dims, m);
    const EntropyResult hm = h_min(rho, {"A"}, {"B"});
    // The min-entropy witness sigma certifies H2 >= Hmin directly.
    const double at_witness = h2_at(m, da, hm.optimizer_sigma->matrix());
    const double best = std::max(at_witness, h2(rho, {"A"}, {"B"}).value);
    return best - hm.value;
  }));

  out.push_back(run_check("superadditivity", seed, trials, smooth_tol, [&](Rng& rng, std::string& what) {
    const int db2 = pick(rng, 1, 2);
    const StateOperator r1 = random_state(DimsLabel({{"A", 2}, {"B", 2}}), rng);
    const StateOperator r2 = random_state(DimsLabel({{"A2", 2}, {"B2", db2}}), rng);
    const double e1 = eps_grid[pick(rng, 0, 2)], e2 = eps_grid[pick(rng, 0, 2)];
    std::ostringstream os;
    os << "eps " << e1 << ", " << e2;
    what = os.str();
    const double lhs = h_min_smooth(tensor(r1, r2), {"A", "A2"}, {"B", "B2"}, e1 + e2).value;
    const double rhs = h_min_smooth(r1, {"A"}, {"B"}, e1).value + h_min_smooth(r2, {"A2"}, {"B2"}, e2).value;
    return lhs - rhs;
  }));

  out.push_back(run_check("dimension_lower_bound", seed, trials, tol, [](Rng& rng, std::string&) {
    const int da = pick(rng, 1, 4), db = pick(rng, 1, 4);
    const StateOperator rho = random_state(DimsLabel({{"A", da}, {"B", db}}), rng);
    return h_min(rho, {"A"}, {"B"}).value + std::log2(db);
  }));

  out.push_back(run_check("trace_out_upper_bound", seed, trials, smooth_tol, [&](Rng& rng, std::string&) {
    const int db = pick(rng, 1, 2);
    const StateOperator rho = random_state(DimsLabel({{"A", 2}, {"B", db}, {"C", 2}}), rng);
    const double eps = eps_grid[pick(rng, 0, 2)];
    const double lhs = h_min_smooth(rho, {"A", "B"}, {"C"}, eps).value;
    const double rhs = h_min_smooth(rho, {"A"}, {"C"}, eps).value + std::log2(db);
    return rhs - lhs;
  }));

  out.push_back(run_check("classical_register", seed, trials, tol, [](Rng& rng, std::string&) {
    const int nx = pick(rng, 2, 3);
    const DimsLabel ab({{"A", 2}, {"B", 2}});
    std::vector<double> p(nx);
    for (auto& v : p) v = uniform(rng, 0.1, 1.0);
    double tot = 0.0;
    for (double v : p) tot += v;
    CMatrix big = CMatrix::Zero(4 * nx, 4 * nx);
    double mix = 0.0;
    for (int x = 0; x < nx; ++x) {
      p[x] /= tot;
      const CMatrix rx = random_density(4, pick(rng, 1, 4), rng);
      CMatrix proj = CMatrix::Zero(nx, nx);
      proj(x, x) = 1.0;
      big += p[x] * kron(rx, proj);
      mix += p[x] * std::exp2(-h_min(StateOperator(ab, rx), {"A"}, {"B"}).value);
    }
    const StateOperator rho(DimsLabel({{"A", 2}, {"B", 2}, {"X", nx}}), big);
    const double lhs = h_min(rho, {"A"}, {"B", "X"}).value;
    return -std::abs(lhs + std::log2(mix));
  }));

  out.push_back(run_check("chain_rule", seed, trials, smooth_tol, [](Rng& rng, std::string& what) {
    const StateOperator rho = random_state(DimsLabel({{"A", 2}, {"B", 2}, {"C", 2}}), rng);
    const double eps = pick(rng, 0, 1) ? 0.1 : 0.05;
    const double e1 = pick(rng, 0, 1) ? 0.05 : 0.0;
    const double e2 = pick(rng, 0, 1) ? 0.05 : 0.0;
    std::ostringstream os;
    os << "eps " << eps << ", " << e1 << ", " << e2;
    what = os.str();
    const double lhs = h_min_smooth(rho, {"A", "B"}, {"C"}, eps + 2.0 * e1 + e2).value;
    const double rhs = h_min_smooth(rho, {"A"}, {"B", "C"}, e1).value + h_min_smooth(rho, {"B"}, {"C"}, e2).value -
                       std::log2(2.0 / (eps * eps));
    return lhs - rhs;
  }));
  return out;
}

}  // namespace qdc
