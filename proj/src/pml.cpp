#include "wavescat/pml.hpp"

#include <cmath>
#include <string>

#include "wavescat/errors.hpp"

namespace wavescat {

double pml_xi(double coord, double half_width, double thickness, double peak) {
  const double r = std::abs(coord);
  if (r > half_width + thickness * (1.0 + 1e-12)) {
    throw OutOfDomain("pml_xi: coordinate " + std::to_string(coord) +
                      " outside the computational box");
  }
  if (r < half_width) return 0.0;
  const double s = std::min((r - half_width) / thickness, 1.0);
  return peak * (s - std::sin(2.0 * M_PI * s) / (2.0 * M_PI));
}

double default_xibar(double c, double thickness, double reflection_target) {
  // Integral of the ramp over the layer is xibar*L/2, traversed twice.
  return c * std::log(1.0 / reflection_target) / thickness;
}

namespace {

double ratio0(double num, double den) { return den > 0.0 ? num / den : 0.0; }

}  // namespace

PmlCoefficients sample_pml(const PmlLayout& layout, const StaggeredGrid& grid) {
  const int nx = grid.nx, ny = grid.ny;
  PmlCoefficients k;
  k.xi1_c.resize(nx, ny);
  k.xi2_c.resize(nx, ny);
  for (int j = 0; j < ny; ++j) {
    const double xi2 = pml_xi(grid.cell_y(j), layout.a2, layout.L2, layout.xibar2);
    for (int i = 0; i < nx; ++i) {
      k.xi1_c(i, j) = pml_xi(grid.cell_x(i), layout.a1, layout.L1, layout.xibar1);
      k.xi2_c(i, j) = xi2;
    }
  }
  k.a_c = k.xi1_c + k.xi2_c;
  k.b_c = k.xi1_c * k.xi2_c;
  k.ab_c = k.a_c * k.b_c;

  k.xi1_e = EdgeField<double>(nx, ny);
  k.xi2_e = EdgeField<double>(nx, ny);
  for (int j = 0; j < ny; ++j) {
    const double xi2 = pml_xi(grid.cell_y(j), layout.a2, layout.L2, layout.xibar2);
    for (int i = 0; i < nx - 1; ++i) {
      k.xi1_e.x(i, j) = pml_xi(grid.xedge_x(i), layout.a1, layout.L1, layout.xibar1);
      k.xi2_e.x(i, j) = xi2;
    }
  }
  for (int j = 0; j < ny - 1; ++j) {
    const double xi2 = pml_xi(grid.yedge_y(j), layout.a2, layout.L2, layout.xibar2);
    for (int i = 0; i < nx; ++i) {
      k.xi1_e.y(i, j) = pml_xi(grid.cell_x(i), layout.a1, layout.L1, layout.xibar1);
      k.xi2_e.y(i, j) = xi2;
    }
  }

  // Component 1 lives on x-edges, component 2 on y-edges.
  k.gamma1_e.x = k.xi1_e.x;
  k.gamma1_e.y = k.xi2_e.y;
  k.gamma2_e.x = k.xi2_e.x - k.xi1_e.x;
  k.gamma2_e.y = k.xi1_e.y - k.xi2_e.y;
  k.gamma1t_e.x = k.xi2_e.x;
  k.gamma1t_e.y = k.xi1_e.y;
  k.a_e.x = k.xi1_e.x + k.xi2_e.x;
  k.a_e.y = k.xi1_e.y + k.xi2_e.y;

  auto fill_ratios = [](const CellField<double>& num, const CellField<double>& den,
                        CellField<double>& out) {
    out.resize(num.rows(), num.cols());
    for (Eigen::Index j = 0; j < num.cols(); ++j)
      for (Eigen::Index i = 0; i < num.rows(); ++i)
        out(i, j) = ratio0(num(i, j), den(i, j));
  };
  CellField<double> tmp;
  fill_ratios(k.gamma1_e.x, k.a_e.x, k.ainv_gamma1_e.x);
  fill_ratios(k.gamma1_e.y, k.a_e.y, k.ainv_gamma1_e.y);
  tmp = k.xi1_e.x * k.xi2_e.x;
  fill_ratios(tmp, k.a_e.x, k.ainv_b_e.x);
  tmp = k.xi1_e.y * k.xi2_e.y;
  fill_ratios(tmp, k.a_e.y, k.ainv_b_e.y);
  tmp = k.gamma1_e.x * k.gamma1_e.x;
  fill_ratios(tmp, k.a_e.x, k.diss_weight_e.x);
  k.diss_weight_e.x += k.gamma1_e.x;
  tmp = k.gamma1_e.y * k.gamma1_e.y;
  fill_ratios(tmp, k.a_e.y, k.diss_weight_e.y);
  k.diss_weight_e.y += k.gamma1_e.y;
  return k;
}

}  // namespace wavescat
