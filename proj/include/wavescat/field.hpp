// Dense staggered-grid field types and deterministic reductions.
//
// Pressure-like quantities live at cell centers as an Nx x Ny Eigen array
// indexed (i, j) with i the x index; the two components of edge vectors live
// on the interior x-edge grid ((Nx-1) x Ny) and y-edge grid (Nx x (Ny-1)).
// Edge values on the outer boundary are identically zero and never stored.
#pragma once

#include <Eigen/Core>

#include <cassert>
#include <cstddef>

namespace wavescat {

template <typename Scalar>
using CellField = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
struct EdgeField {
  CellField<Scalar> x;  // (Nx-1) x Ny, component 1 at x-edges
  CellField<Scalar> y;  // Nx x (Ny-1), component 2 at y-edges

  EdgeField() = default;
  EdgeField(Eigen::Index nx, Eigen::Index ny) : x(nx - 1, ny), y(nx, ny - 1) {}

  static EdgeField zero(Eigen::Index nx, Eigen::Index ny) {
    EdgeField e(nx, ny);
    e.x.setZero();
    e.y.setZero();
    return e;
  }

  void setZero() {
    x.setZero();
    y.setZero();
  }

  EdgeField& operator+=(const EdgeField& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  EdgeField& operator-=(const EdgeField& o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  EdgeField& operator*=(Scalar s) {
    x *= s;
    y *= s;
    return *this;
  }

  friend EdgeField operator+(EdgeField a, const EdgeField& b) { return a += b; }
  friend EdgeField operator-(EdgeField a, const EdgeField& b) { return a -= b; }
  friend EdgeField operator*(Scalar s, EdgeField a) { return a *= s; }
};

// Componentwise product of two edge fields (used for edge weights).
template <typename Scalar>
EdgeField<Scalar> cwise(const EdgeField<Scalar>& a, const EdgeField<Scalar>& b) {
  EdgeField<Scalar> r;
  r.x = a.x * b.x;
  r.y = a.y * b.y;
  return r;
}

// Fixed-order pairwise summation over a contiguous buffer. The recursion
// splits on element count only, so the result does not depend on how callers
// tile their loops, and repeated runs are bit-identical.
template <typename Scalar>
Scalar pairwise_sum(const Scalar* data, std::ptrdiff_t n) {
  if (n <= 16) {
    Scalar s = Scalar(0);
    for (std::ptrdiff_t i = 0; i < n; ++i) s += data[i];
    return s;
  }
  const std::ptrdiff_t half = n / 2;
  return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

template <typename Scalar>
Scalar pairwise_sum(const CellField<Scalar>& a) {
  return pairwise_sum(a.data(), static_cast<std::ptrdiff_t>(a.size()));
}

// Raw (unscaled) dot products; the hx*hy metric factors live in the
// inner-product wrappers of stencil_ops.hpp.
template <typename Scalar>
Scalar dot(const CellField<Scalar>& a, const CellField<Scalar>& b) {
  assert(a.rows() == b.rows() && a.cols() == b.cols());
  CellField<Scalar> prod = a * b;
  return pairwise_sum(prod);
}

template <typename Scalar>
Scalar dot(const EdgeField<Scalar>& a, const EdgeField<Scalar>& b) {
  return dot(a.x, b.x) + dot(a.y, b.y);
}

}  // namespace wavescat
