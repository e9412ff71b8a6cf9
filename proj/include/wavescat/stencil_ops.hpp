// Staggered difference operators, weighted divergence/Laplacian, and the
// discrete inner products they are paired with.
//
// All operators use the homogeneous outer closure: values on boundary edges
// of the box are identically zero. Under that closure the weighted
// divergence and the forward gradient satisfy an exact summation-by-parts
// identity, which is what every discrete energy law below relies on.
#pragma once

#include <optional>

#include "wavescat/field.hpp"
#include "wavescat/grid.hpp"

namespace wavescat {

// Forward differences of a cell field onto the interior edges.
template <typename Scalar>
EdgeField<Scalar> grad_plus(const StaggeredGrid& g, const CellField<Scalar>& u) {
  const Eigen::Index nx = u.rows(), ny = u.cols();
  EdgeField<Scalar> e(nx, ny);
  e.x = (u.block(1, 0, nx - 1, ny) - u.block(0, 0, nx - 1, ny)) / Scalar(g.hx);
  e.y = (u.block(0, 1, nx, ny - 1) - u.block(0, 0, nx, ny - 1)) / Scalar(g.hy);
  return e;
}

// Backward divergence of the edgewise-weighted vector omega*v back onto
// cells, with zero contributions from the (unstored) boundary edges.
template <typename Scalar>
CellField<Scalar> div_minus_weighted(const StaggeredGrid& g,
                                     const EdgeField<Scalar>& omega,
                                     const EdgeField<Scalar>& v) {
  const Eigen::Index nx = v.y.rows(), ny = v.x.cols();
  CellField<Scalar> wx = omega.x * v.x;
  CellField<Scalar> wy = omega.y * v.y;
  CellField<Scalar> d = CellField<Scalar>::Zero(nx, ny);
  d.block(0, 0, nx - 1, ny) += wx / Scalar(g.hx);
  d.block(1, 0, nx - 1, ny) -= wx / Scalar(g.hx);
  d.block(0, 0, nx, ny - 1) += wy / Scalar(g.hy);
  d.block(0, 1, nx, ny - 1) -= wy / Scalar(g.hy);
  return d;
}

template <typename Scalar>
CellField<Scalar> div_minus(const StaggeredGrid& g, const EdgeField<Scalar>& v) {
  EdgeField<Scalar> ones(v.y.rows(), v.x.cols());
  ones.x.setOnes();
  ones.y.setOnes();
  return div_minus_weighted(g, ones, v);
}

// Weighted five-point Laplacian: div_minus_weighted(omega, grad_plus(u)).
template <typename Scalar>
CellField<Scalar> laplace_weighted(const StaggeredGrid& g,
                                   const EdgeField<Scalar>& omega,
                                   const CellField<Scalar>& u) {
  return div_minus_weighted(g, omega, grad_plus(g, u));
}

// Discrete L2 pairings. The optional weight is a pointwise nonnegative
// multiplier (cells) or a per-family diagonal (edges).
template <typename Scalar>
Scalar inner_cell(const StaggeredGrid& g, const CellField<Scalar>& u,
                  const CellField<Scalar>& v) {
  return Scalar(g.hx * g.hy) * dot(u, v);
}

template <typename Scalar>
Scalar inner_cell(const StaggeredGrid& g, const CellField<Scalar>& u,
                  const CellField<Scalar>& v, const CellField<Scalar>& w) {
  CellField<Scalar> uw = u * w;
  return Scalar(g.hx * g.hy) * dot(uw, v);
}

template <typename Scalar>
Scalar inner_edge(const StaggeredGrid& g, const EdgeField<Scalar>& v,
                  const EdgeField<Scalar>& w) {
  return Scalar(g.hx * g.hy) * dot(v, w);
}

template <typename Scalar>
Scalar inner_edge(const StaggeredGrid& g, const EdgeField<Scalar>& v,
                  const EdgeField<Scalar>& w, const EdgeField<Scalar>& weight) {
  return Scalar(g.hx * g.hy) * dot(cwise(weight, v), w);
}

template <typename Scalar>
Scalar norm2_cell(const StaggeredGrid& g, const CellField<Scalar>& u) {
  return inner_cell(g, u, u);
}

template <typename Scalar>
Scalar norm2_cell(const StaggeredGrid& g, const CellField<Scalar>& u,
                  const CellField<Scalar>& w) {
  return inner_cell(g, u, u, w);
}

template <typename Scalar>
Scalar norm2_edge(const StaggeredGrid& g, const EdgeField<Scalar>& v,
                  const EdgeField<Scalar>& weight) {
  return inner_edge(g, v, v, weight);
}

// (D_h^w v, u)_h + (v, grad+ u)_{w,e}; exactly zero up to roundoff.
template <typename Scalar>
Scalar sbp_residual(const StaggeredGrid& g, const EdgeField<Scalar>& omega,
                    const CellField<Scalar>& u, const EdgeField<Scalar>& v) {
  const Scalar lhs = inner_cell(g, div_minus_weighted(g, omega, v), u);
  const Scalar rhs = inner_edge(g, v, grad_plus(g, u), omega);
  return lhs + rhs;
}

}  // namespace wavescat
