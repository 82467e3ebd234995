// Copyright 2026 The qdecouple Authors.
// SPDX-License-Identifier: Apache-2.0

#include "qdc/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

namespace qdc::sdp {

std::string to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "Optimal";
    case Status::Infeasible: return "Infeasible";
    case Status::MaxIter: return "MaxIter";
  }
  return "Unknown";
}

void validate(const Problem& p) {
  const int nb = static_cast<int>(p.block_dims.size());
  if (nb == 0) throw Error(ErrorKind::InvalidArgument, "sdp: no blocks");
  if (static_cast<int>(p.c.size()) != nb) throw Error(ErrorKind::InvalidArgument, "sdp: objective block count");
  long long nvar = 0;
  for (int b = 0; b < nb; ++b) {
    const int n = p.block_dims[b];
    if (n < 1) throw Error(ErrorKind::InvalidArgument, "sdp: block dimension must be >= 1");
    if (p.c[b].rows() != n || p.c[b].cols() != n)
      throw Error(ErrorKind::InvalidArgument, "sdp: objective block has wrong size");
    if (!is_hermitian(p.c[b], 1e-12)) throw Error(ErrorKind::InvalidArgument, "sdp: objective block not Hermitian");
    nvar += static_cast<long long>(n) * n;
  }
  if (static_cast<long long>(p.constraints.size()) > nvar)
    throw Error(ErrorKind::InvalidArgument, "sdp: more constraints than variable dimensions");
  for (const auto& con : p.constraints) {
    std::map<std::tuple<int, int, int>, cd> m;
    for (const auto& e : con.a.entries) {
      if (e.block < 0 || e.block >= nb || e.row < 0 || e.col < 0 || e.row >= p.block_dims[e.block] ||
          e.col >= p.block_dims[e.block])
        throw Error(ErrorKind::InvalidArgument, "sdp: constraint entry out of range");
      m[{e.block, e.row, e.col}] += e.value;
    }
    for (const auto& [key, v] : m) {
      auto [b, r, c] = key;
      auto it = m.find({b, c, r});
      cd other = it == m.end() ? cd(0.0) : it->second;
      if (std::abs(v - std::conj(other)) > 1e-12 * (1.0 + std::abs(v)))
        throw Error(ErrorKind::InvalidArgument, "sdp: constraint matrix not Hermitian");
    }
  }
}

double inner(const SparseBlockMatrix& a, const std::vector<CMatrix>& x) {
  double s = 0.0;
  for (const auto& e : a.entries) s += (e.value * x[e.block](e.col, e.row)).real();
  return s;
}

namespace {

using Blocks = std::vector<CMatrix>;

double inner_dense(const Blocks& a, const Blocks& b) {
  double s = 0.0;
  for (size_t k = 0; k < a.size(); ++k) s += (a[k].conjugate().cwiseProduct(b[k])).sum().real();
  return s;
}

double frob(const Blocks& a) {
  double s = 0.0;
  for (const auto& m : a) s += m.squaredNorm();
  return std::sqrt(s);
}

struct Scaling {
  CMatrix g;     // W = G G^dagger
  CMatrix ginv;  // G^{-1}
  RVector d;     // G^{-1} X G^{-dagger} = G^dagger Z G = diag(d)
  CMatrix w;
};

class Solver {
 public:
  Solver(const Problem& p, const Options& o) : p_(p), opt_(o) {
    nb_ = static_cast<int>(p.block_dims.size());
    m_ = static_cast<int>(p.constraints.size());
    ntot_ = 0;
    for (int n : p.block_dims) ntot_ += n;
    // Per-constraint entries grouped by block.
    by_block_.resize(m_);
    for (int i = 0; i < m_; ++i) {
      by_block_[i].resize(nb_);
      for (const auto& e : p.constraints[i].a.entries) by_block_[i][e.block].push_back(e);
    }
    b_ = RVector(m_);
    for (int i = 0; i < m_; ++i) b_(i) = p.constraints[i].b;
  }

  Solution run();

 private:
  RVector apply_a(const Blocks& x) const {
    RVector r(m_);
    for (int i = 0; i < m_; ++i) r(i) = inner(p_.constraints[i].a, x);
    return r;
  }

  Blocks apply_at(const RVector& y) const {
    Blocks out = zeros();
    for (int i = 0; i < m_; ++i) {
      if (y(i) == 0.0) continue;
      for (const auto& e : p_.constraints[i].a.entries) out[e.block](e.row, e.col) += y(i) * e.value;
    }
    return out;
  }

  Blocks zeros() const {
    Blocks z(nb_);
    for (int b = 0; b < nb_; ++b) z[b] = CMatrix::Zero(p_.block_dims[b], p_.block_dims[b]);
    return z;
  }

  // M_ij = <A_i, W A_j W>. Sparse pairs use sum_{e in A_i, f in A_j} e f W[e.c, f.r] W[f.c, e.r];
  // a constraint with more than n entries in a block is expanded to a dense W A_j W.
  Eigen::MatrixXd schur(const std::vector<Scaling>& sc) const {
    Eigen::MatrixXd mat = Eigen::MatrixXd::Zero(m_, m_);
    CMatrix pj;
    for (int b = 0; b < nb_; ++b) {
      const CMatrix& w = sc[b].w;
      const int n = p_.block_dims[b];
      for (int j = 0; j < m_; ++j) {
        const auto& ej = by_block_[j][b];
        if (ej.empty()) continue;
        const bool dense = static_cast<int>(ej.size()) > n;
        if (dense) {
          CMatrix a = CMatrix::Zero(n, n);
          for (const auto& e : ej) a(e.row, e.col) += e.value;
          pj.noalias() = w * a * w;
        }
        for (int i = 0; i <= j; ++i) {
          const auto& ei = by_block_[i][b];
          if (ei.empty()) continue;
          double s = 0.0;
          if (dense) {
            for (const auto& e : ei) s += (e.value * pj(e.col, e.row)).real();
          } else {
            for (const auto& e : ei)
              for (const auto& f : ej) s += (e.value * f.value * w(e.col, f.row) * w(f.col, e.row)).real();
          }
          mat(i, j) += s;
          if (i != j) mat(j, i) += s;
        }
      }
    }
    return mat;
  }

  static bool nt_scaling(const CMatrix& x, const CMatrix& z, Scaling& out) {
    Eigen::LLT<CMatrix> lx(x), lz(z);
    if (lx.info() != Eigen::Success || lz.info() != Eigen::Success) return false;
    CMatrix l = lx.matrixL();
    CMatrix r = lz.matrixL();
    Eigen::JacobiSVD<CMatrix> svd(r.adjoint() * l, Eigen::ComputeFullU | Eigen::ComputeFullV);
    RVector s = svd.singularValues();
    if (s.minCoeff() <= 0.0) return false;
    const CMatrix& v = svd.matrixV();
    RVector is = s.cwiseSqrt().cwiseInverse();
    out.g = l * v * is.asDiagonal();
    CMatrix linv = l.triangularView<Eigen::Lower>().solve(CMatrix::Identity(x.rows(), x.cols()));
    out.ginv = s.cwiseSqrt().asDiagonal() * v.adjoint() * linv;
    out.d = s;
    out.w = out.g * out.g.adjoint();
    out.w = hermitian_part(out.w);
    return true;
  }

  // Largest alpha with x + alpha * dx >= 0.
  static double max_step(const CMatrix& x, const CMatrix& dx) {
    Eigen::LLT<CMatrix> l(x);
    if (l.info() != Eigen::Success) return 0.0;
    CMatrix t = l.matrixL().solve(dx);
    CMatrix s = l.matrixL().solve(CMatrix(t.adjoint())).adjoint();
    double lmin = herm_eigenvalues(s).minCoeff();
    return lmin >= 0.0 ? std::numeric_limits<double>::infinity() : -1.0 / lmin;
  }

  struct Direction {
    Blocks dx, dz;
    RVector dy;
  };

  Direction direction(const std::vector<Scaling>& sc, const Eigen::LLT<Eigen::MatrixXd>& chol,
                      const Blocks& rc, const RVector& rp, const Blocks& rd) const {
    Blocks grg(nb_), wrw(nb_);
    for (int b = 0; b < nb_; ++b) {
      grg[b] = sc[b].g * rc[b] * sc[b].g.adjoint();
      wrw[b] = sc[b].w * rd[b] * sc[b].w;
    }
    RVector h = rp - apply_a(grg) + apply_a(wrw);
    Direction d;
    d.dy = chol.solve(h);
    d.dz.resize(nb_);
    d.dx.resize(nb_);
    // A(dx) moves by M ddy, so solving against the residual rp - A(dx) refines dy
    // and undoes the regularization and round-off of the Schur solve.
    const double target = 1e-14 * (1.0 + rp.norm() + h.norm());
    double last = std::numeric_limits<double>::infinity();
    for (int refine = 0;; ++refine) {
      Blocks aty = apply_at(d.dy);
      for (int b = 0; b < nb_; ++b) {
        d.dz[b] = hermitian_part(rd[b] - aty[b]);
        d.dx[b] = hermitian_part(grg[b] - sc[b].w * d.dz[b] * sc[b].w);
      }
      RVector e = rp - apply_a(d.dx);
      const double en = e.norm();
      if (refine == 10 || en <= target || en > 0.5 * last) break;
      last = en;
      d.dy += chol.solve(e);
    }
    return d;
  }

  const Problem& p_;
  Options opt_;
  int nb_ = 0;
  int m_ = 0;
  int ntot_ = 0;
  RVector b_;
  std::vector<std::vector<std::vector<Entry>>> by_block_;
};

Solution Solver::run() {
  Solution sol;
  Blocks x = zeros(), z = zeros();
  RVector y = RVector::Zero(m_);

  // Starting point scaled to the data.
  for (int b = 0; b < nb_; ++b) {
    const int n = p_.block_dims[b];
    double xi = std::max(10.0, std::sqrt(static_cast<double>(n)));
    double eta = xi;
    for (int i = 0; i < m_; ++i) {
      double na = 0.0;
      for (const auto& e : by_block_[i][b]) na += std::norm(e.value);
      if (by_block_[i][b].empty()) continue;
      na = 1.0 + std::sqrt(na);
      xi = std::max(xi, n * (1.0 + std::abs(b_(i))) / na);
      eta = std::max(eta, na);
    }
    eta = std::max(eta, 1.0 + p_.c[b].norm());
    x[b] = xi * CMatrix::Identity(n, n);
    z[b] = eta * CMatrix::Identity(n, n);
  }

  double cnorm = 0.0;
  for (const auto& c : p_.c) cnorm += c.squaredNorm();
  cnorm = std::sqrt(cnorm);
  const double bnorm = b_.norm();

  if (opt_.trace_csv) *opt_.trace_csv << "iteration,primal_obj,dual_obj,gap\n";
  double best_merit = std::numeric_limits<double>::infinity();

  for (int it = 0; it <= opt_.max_iter; ++it) {
    RVector rp = b_ - apply_a(x);
    Blocks aty = apply_at(y);
    Blocks rd(nb_);
    for (int b = 0; b < nb_; ++b) rd[b] = p_.c[b] - z[b] - aty[b];
    const double pobj = inner_dense(p_.c, x);
    const double dobj = b_.dot(y);
    const double pres = rp.norm() / (1.0 + bnorm);
    const double dres = frob(rd) / (1.0 + cnorm);
    const double xz = inner_dense(x, z);

    IterateRecord rec{it, pobj, dobj, pobj - dobj, pres, dres, xz};
    sol.history.push_back(rec);
    if (opt_.trace_csv) *opt_.trace_csv << it << ',' << pobj << ',' << dobj << ',' << (pobj - dobj) << '\n';

    // Scaled distance to the stopping criteria; <= 1 means converged.
    const double merit = std::max({pres / opt_.feas_tol, dres / opt_.feas_tol,
                                   std::abs(pobj - dobj) / (opt_.gap_rel * (1.0 + std::abs(pobj)))});
    if (merit <= best_merit) {
      best_merit = merit;
      sol.x = x;
      sol.z = z;
      sol.y = y;
      sol.primal_obj = pobj;
      sol.dual_obj = dobj;
      sol.gap = pobj - dobj;
      sol.primal_residual = pres;
      sol.dual_residual = dres;
    }
    sol.iterations = it;

    if (merit <= 1.0) {
      sol.status = Status::Optimal;
      return sol;
    }
    // Near the boundary round-off can push the iterates away again; keep the best one.
    if (it > 10 && merit > 1e3 * best_merit) break;
    // Farkas rays: (y, Z) with A^T y + Z ~ 0 and b^T y > 0, or X with A X ~ 0 and <C, X> < 0.
    {
      Blocks ray(nb_);
      for (int b = 0; b < nb_; ++b) ray[b] = aty[b] + z[b];
      if (dobj > 0.0 && frob(ray) <= 1e-8 * dobj && dobj > 1e8) {
        sol.status = Status::Infeasible;
        return sol;
      }
      RVector ax = b_ - rp;
      if (pobj < 0.0 && ax.norm() <= 1e-8 * -pobj && -pobj > 1e8) {
        sol.status = Status::Infeasible;
        return sol;
      }
    }
    if (it == opt_.max_iter) break;

    const double mu = xz / ntot_;
    std::vector<Scaling> sc(nb_);
    bool ok = true;
    for (int b = 0; b < nb_ && ok; ++b) ok = nt_scaling(x[b], z[b], sc[b]);
    if (!ok) break;

    Eigen::MatrixXd mat = schur(sc);
    double reg = opt_.kkt_reg;
    Eigen::LLT<Eigen::MatrixXd> chol;
    for (int attempt = 0; attempt < 6; ++attempt) {
      Eigen::MatrixXd mr = mat;
      mr.diagonal().array() += reg * std::max(1.0, mat.diagonal().cwiseAbs().maxCoeff());
      chol.compute(mr);
      if (chol.info() == Eigen::Success) break;
      reg *= 100.0;
    }
    if (chol.info() != Eigen::Success) break;

    // Predictor.
    Blocks rc(nb_);
    for (int b = 0; b < nb_; ++b) rc[b] = CMatrix((-sc[b].d).cast<cd>().asDiagonal());
    Direction pred = direction(sc, chol, rc, rp, rd);
    double ap = 1.0, ad = 1.0;
    for (int b = 0; b < nb_; ++b) {
      ap = std::min(ap, max_step(x[b], pred.dx[b]));
      ad = std::min(ad, max_step(z[b], pred.dz[b]));
    }
    double xz_aff = 0.0;
    for (int b = 0; b < nb_; ++b)
      xz_aff += (CMatrix(x[b] + ap * pred.dx[b]).conjugate().cwiseProduct(z[b] + ad * pred.dz[b])).sum().real();
    double ratio = std::clamp(xz_aff / std::max(xz, 1e-300), 0.0, 1.0);
    const double expon = std::min(ap, ad) > 0.1 ? 3.0 : 2.0;
    const double sigma = std::clamp(std::pow(ratio, expon), 0.0, 1.0);

    // Corrector with the second-order term in the scaled space.
    for (int b = 0; b < nb_; ++b) {
      const int n = p_.block_dims[b];
      const RVector& d = sc[b].d;
      CMatrix dxs = sc[b].ginv * pred.dx[b] * sc[b].ginv.adjoint();
      CMatrix dzs = sc[b].g.adjoint() * pred.dz[b] * sc[b].g;
      CMatrix corr = 0.5 * (dxs * dzs + dzs * dxs);
      CMatrix r(n, n);
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          cd v = -corr(i, j);
          if (i == j) v += sigma * mu - d(i) * d(i);
          r(i, j) = v * (2.0 / (d(i) + d(j)));
        }
      rc[b] = r;
    }
    Direction dir = direction(sc, chol, rc, rp, rd);
    ap = std::numeric_limits<double>::infinity();
    ad = ap;
    for (int b = 0; b < nb_; ++b) {
      ap = std::min(ap, max_step(x[b], dir.dx[b]));
      ad = std::min(ad, max_step(z[b], dir.dz[b]));
    }
    const double gamma = 0.95;
    ap = std::min(1.0, gamma * ap);
    ad = std::min(1.0, gamma * ad);
    for (int b = 0; b < nb_; ++b) {
      x[b] = hermitian_part(x[b] + ap * dir.dx[b]);
      z[b] = hermitian_part(z[b] + ad * dir.dz[b]);
    }
    y += ad * dir.dy;
  }
  sol.status = best_merit <= 1.0 ? Status::Optimal : Status::MaxIter;
  return sol;
}

}  // namespace

Solution solve(const Problem& p, const Options& opt) {
  validate(p);
  Solver s(p, opt);
  return s.run();
}

// ---------------------------------------------------------------------------
// LMI assembly

LinExpr& LinExpr::operator+=(const LinExpr& o) {
  terms.insert(terms.end(), o.terms.begin(), o.terms.end());
  constant += o.constant;
  return *this;
}

LinExpr LinExpr::scaled(cd s) const {
  LinExpr e = *this;
  for (auto& t : e.terms) t.second *= s;
  e.constant *= s;
  return e;
}

LinExpr LinExpr::real_part() const {
  LinExpr e = *this;
  for (auto& t : e.terms) t.second = cd(t.second.real(), 0.0);
  e.constant = cd(e.constant.real(), 0.0);
  return e;
}

namespace {

// Index of the (re, im) pair for upper entry (i, j), i < j, after the n diagonal slots.
int upper_slot(int n, int i, int j) {
  // Number of upper entries in rows before i, then offset within row i.
  const int before = i * n - i * (i + 1) / 2;
  return n + 2 * (before + (j - i - 1));
}

}  // namespace

LinExpr HermitianVar::at(int i, int j) const {
  LinExpr e;
  if (i == j) {
    e.terms.push_back({offset + i, cd(1.0, 0.0)});
  } else if (i < j) {
    const int s = offset + upper_slot(n, i, j);
    e.terms.push_back({s, cd(1.0, 0.0)});
    e.terms.push_back({s + 1, cd(0.0, 1.0)});
  } else {
    const int s = offset + upper_slot(n, j, i);
    e.terms.push_back({s, cd(1.0, 0.0)});
    e.terms.push_back({s + 1, cd(0.0, -1.0)});
  }
  return e;
}

CMatrix HermitianVar::value(const RVector& y) const {
  CMatrix m(n, n);
  for (int i = 0; i < n; ++i) {
    m(i, i) = y(offset + i);
    for (int j = i + 1; j < n; ++j) {
      const int s = offset + upper_slot(n, i, j);
      m(i, j) = cd(y(s), y(s + 1));
      m(j, i) = std::conj(m(i, j));
    }
  }
  return m;
}

LinExpr ComplexVar::at(int i, int j) const {
  const int s = offset + 2 * (i * cols + j);
  LinExpr e;
  e.terms.push_back({s, cd(1.0, 0.0)});
  e.terms.push_back({s + 1, cd(0.0, 1.0)});
  return e;
}

CMatrix ComplexVar::value(const RVector& y) const {
  CMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      const int s = offset + 2 * (i * cols + j);
      m(i, j) = cd(y(s), y(s + 1));
    }
  return m;
}

int LmiBuilder::add_block(int dim) {
  if (dim < 1) throw Error(ErrorKind::InvalidArgument, "LmiBuilder: block dimension must be >= 1");
  blocks_.push_back(dim);
  return static_cast<int>(blocks_.size()) - 1;
}

int LmiBuilder::new_vars(int n) {
  const int first = num_vars();
  objective_.resize(first + n, 0.0);
  coeffs_.resize(first + n);
  return first;
}

int LmiBuilder::add_scalar(double objective) {
  int v = new_vars(1);
  objective_[v] = objective;
  return v;
}

HermitianVar LmiBuilder::add_hermitian(int n) {
  HermitianVar h{n, 0};
  h.offset = new_vars(h.count());
  return h;
}

ComplexVar LmiBuilder::add_complex(int rows, int cols) {
  ComplexVar c{rows, cols, 0};
  c.offset = new_vars(c.count());
  return c;
}

void LmiBuilder::put(int block, int r, int c, const LinExpr& e) {
  for (const auto& [k, v] : e.terms) {
    if (v == cd(0.0)) continue;
    coeffs_[k][{block, r, c}] += v;
    if (r != c) coeffs_[k][{block, c, r}] += std::conj(v);
  }
  if (e.constant != cd(0.0)) {
    constant_[{block, r, c}] += e.constant;
    if (r != c) constant_[{block, c, r}] += std::conj(e.constant);
  }
}

Problem LmiBuilder::build() const {
  Problem p;
  p.block_dims = blocks_;
  p.c.resize(blocks_.size());
  for (size_t b = 0; b < blocks_.size(); ++b) p.c[b] = CMatrix::Zero(blocks_[b], blocks_[b]);
  for (const auto& [key, v] : constant_) {
    auto [b, r, c] = key;
    p.c[b](r, c) += v;
  }
  for (auto& c : p.c) c = hermitian_part(c);
  p.constraints.resize(objective_.size());
  for (size_t k = 0; k < objective_.size(); ++k) {
    p.constraints[k].b = objective_[k];
    for (const auto& [key, v] : coeffs_[k]) {
      if (v == cd(0.0)) continue;
      auto [b, r, c] = key;
      p.constraints[k].a.entries.push_back(Entry{b, r, c, -v});
    }
  }
  return p;
}

}  // namespace qdc::sdp
