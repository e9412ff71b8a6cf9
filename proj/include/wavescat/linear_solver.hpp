// Matrix-free Krylov solvers over field-like vectors.
//
// The vector type only needs value-semantics arithmetic (+, -, scalar*) and
// a dot(a,b) overload; CellField, EdgeField, and the four-field state all
// qualify. All reductions go through the fixed-order pairwise sum, so two
// runs with identical inputs produce bit-identical iterates.
#pragma once

#include <cmath>
#include <functional>
#include <utility>

#include "wavescat/field.hpp"

namespace wavescat {

enum class SolveStatus { kConverged, kBreakdown, kMaxIter };

struct SolveReport {
  int iterations = 0;
  double final_residual = 0;  // relative to ||rhs||
  SolveStatus status = SolveStatus::kConverged;
};

// Preconditioned conjugate gradient. `precond` maps residual -> z; pass the
// identity for plain CG. Breakdown (non-positive curvature) is reported, not
// thrown, so the caller can fall back to an indefiniteness-tolerant method.
template <typename Vec, typename Op, typename Precond>
SolveReport conjugate_gradient(const Op& apply, const Vec& rhs, Vec& x,
                               double tol, int max_iter, const Precond& precond) {
  const double bnorm = std::sqrt(dot(rhs, rhs));
  SolveReport rep;
  if (bnorm == 0.0) {
    x = rhs;  // zero rhs, zero solution
    return rep;
  }
  Vec r = rhs - apply(x);
  double rnorm = std::sqrt(dot(r, r));
  if (rnorm <= tol * bnorm) {
    rep.final_residual = rnorm / bnorm;
    return rep;
  }
  Vec z = precond(r);
  Vec p = z;
  double rz = dot(r, z);
  for (int it = 1; it <= max_iter; ++it) {
    Vec ap = apply(p);
    const double pap = dot(p, ap);
    if (!(pap > 0.0)) {
      rep.iterations = it;
      rep.final_residual = rnorm / bnorm;
      rep.status = SolveStatus::kBreakdown;
      return rep;
    }
    const double alpha = rz / pap;
    x += alpha * p;
    r -= alpha * ap;
    rnorm = std::sqrt(dot(r, r));
    rep.iterations = it;
    if (rnorm <= tol * bnorm) {
      rep.final_residual = rnorm / bnorm;
      return rep;
    }
    z = precond(r);
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    p = z + beta * p;
  }
  rep.final_residual = rnorm / bnorm;
  rep.status = SolveStatus::kMaxIter;
  return rep;
}

// BiCGStab without preconditioning; handles the nonsymmetric and the
// sign-indefinite cases.
template <typename Vec, typename Op>
SolveReport bicgstab(const Op& apply, const Vec& rhs, Vec& x, double tol,
                     int max_iter) {
  const double bnorm = std::sqrt(dot(rhs, rhs));
  SolveReport rep;
  if (bnorm == 0.0) {
    x = rhs;
    return rep;
  }
  Vec r = rhs - apply(x);
  double rnorm = std::sqrt(dot(r, r));
  if (rnorm <= tol * bnorm) {
    rep.final_residual = rnorm / bnorm;
    return rep;
  }
  const Vec rhat = r;
  Vec p = r;
  double rho = dot(rhat, r);
  for (int it = 1; it <= max_iter; ++it) {
    rep.iterations = it;
    if (std::abs(rho) < 1e-300) {
      rep.final_residual = rnorm / bnorm;
      rep.status = SolveStatus::kBreakdown;
      return rep;
    }
    Vec v = apply(p);
    const double rhat_v = dot(rhat, v);
    if (std::abs(rhat_v) < 1e-300) {
      rep.final_residual = rnorm / bnorm;
      rep.status = SolveStatus::kBreakdown;
      return rep;
    }
    const double alpha = rho / rhat_v;
    Vec s = r - alpha * v;
    const double snorm = std::sqrt(dot(s, s));
    if (snorm <= tol * bnorm) {
      x += alpha * p;
      rep.final_residual = snorm / bnorm;
      return rep;
    }
    Vec t = apply(s);
    const double tt = dot(t, t);
    if (tt < 1e-300) {
      rep.final_residual = snorm / bnorm;
      rep.status = SolveStatus::kBreakdown;
      return rep;
    }
    const double omega = dot(t, s) / tt;
    x += alpha * p;
    x += omega * s;
    r = s - omega * t;
    rnorm = std::sqrt(dot(r, r));
    if (rnorm <= tol * bnorm) {
      rep.final_residual = rnorm / bnorm;
      return rep;
    }
    const double rho_new = dot(rhat, r);
    const double beta = (rho_new / rho) * (alpha / omega);
    rho = rho_new;
    p = r + beta * (p - omega * v);
    if (std::abs(omega) < 1e-300) {
      rep.final_residual = rnorm / bnorm;
      rep.status = SolveStatus::kBreakdown;
      return rep;
    }
  }
  rep.final_residual = rnorm / bnorm;
  rep.status = SolveStatus::kMaxIter;
  return rep;
}

// Exact diagonal of a cell operator with stencil radius <= 1, recovered from
// nine coset probes: spikes three cells apart never share a stencil.
template <typename Op>
CellField<double> extract_diagonal(const Op& apply, Eigen::Index nx,
                                   Eigen::Index ny) {
  CellField<double> diag(nx, ny);
  CellField<double> probe(nx, ny);
  for (int oi = 0; oi < 3; ++oi) {
    for (int oj = 0; oj < 3; ++oj) {
      probe.setZero();
      for (Eigen::Index j = oj; j < ny; j += 3)
        for (Eigen::Index i = oi; i < nx; i += 3) probe(i, j) = 1.0;
      const CellField<double> ap = apply(probe);
      for (Eigen::Index j = oj; j < ny; j += 3)
        for (Eigen::Index i = oi; i < nx; i += 3) diag(i, j) = ap(i, j);
    }
  }
  return diag;
}

struct SolveOptions {
  double tol = 1e-12;
  int max_iter = 0;  // 0: use 10*sqrt(N)
  bool symmetric = true;
  bool jacobi = true;
};

inline int default_max_iter(Eigen::Index n) {
  return 10 * static_cast<int>(std::sqrt(static_cast<double>(n))) + 50;
}

// Driver for the per-step cell solves: CG with Jacobi preconditioning when
// the operator is hinted symmetric, BiCGStab otherwise or after a CG
// breakdown.
template <typename Op>
std::pair<CellField<double>, SolveReport> solve_cells(
    const Op& apply, const CellField<double>& rhs, const CellField<double>& x0,
    const SolveOptions& opts) {
  CellField<double> x = x0;
  const int max_iter =
      opts.max_iter > 0 ? opts.max_iter : default_max_iter(rhs.size());
  SolveReport rep;
  if (opts.symmetric) {
    if (opts.jacobi) {
      // Magnitudes only: the preconditioner must stay positive definite even
      // if the layer correction makes a few diagonal entries negative.
      CellField<double> d = extract_diagonal(apply, rhs.rows(), rhs.cols()).abs();
      const double dmax = d.maxCoeff();
      const double floor = dmax > 0.0 ? 1e-14 * dmax : 1.0;
      CellField<double> inv_diag = d.max(floor).inverse();
      auto precond = [&inv_diag](const CellField<double>& r) {
        return CellField<double>(inv_diag * r);
      };
      rep = conjugate_gradient(apply, rhs, x, opts.tol, max_iter, precond);
    } else {
      auto identity = [](const CellField<double>& r) { return r; };
      rep = conjugate_gradient(apply, rhs, x, opts.tol, max_iter, identity);
    }
    if (rep.status == SolveStatus::kBreakdown) {
      rep = bicgstab(apply, rhs, x, opts.tol, max_iter);
    }
  } else {
    rep = bicgstab(apply, rhs, x, opts.tol, max_iter);
  }
  return {std::move(x), rep};
}

}  // namespace wavescat
