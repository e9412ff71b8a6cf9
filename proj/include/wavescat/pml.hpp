// Direction-split absorbing-layer damping profiles and the diagonal
// coefficient fields derived from them.
//
// The physical box (-a1,a1)x(-a2,a2) is surrounded by a collar of
// thickness L1/L2 where the damping ramps from 0 to the peak value with a
// C^2 profile; xi_i depends on coordinate i only. Writing G1 = diag(xi1,xi2),
// G2 = diag(xi2-xi1, xi1-xi2), G1t = G1 + G2 = diag(xi2,xi1), a = xi1+xi2
// and b = xi1*xi2, the fields satisfy nodewise
//   G1*G1t = b I,  G1^2 - a G1 + b I = 0,  2 G1 + G2 = a I,  G1 + G1t = a I,
// which is what the dissipation algebra of the time steppers consumes.
// The regularized ratios G1/a and b/a are defined as 0 where a = 0: the
// energy weights they appear in have zero integrand wherever the damping
// vanishes, and the ratio stays in [0,1] along any limit path.
#pragma once

#include "wavescat/field.hpp"
#include "wavescat/grid.hpp"

namespace wavescat {

struct PmlLayout {
  double a1 = 0, a2 = 0;    // half-widths of the physical box
  double L1 = 0, L2 = 0;    // layer thicknesses
  double xibar1 = 0, xibar2 = 0;  // peak damping strengths

  double xl() const { return -(a1 + L1); }
  double xr() const { return a1 + L1; }
  double yl() const { return -(a2 + L2); }
  double yr() const { return a2 + L2; }
};

// Ramp profile: 0 in the interior, xibar*(s - sin(2*pi*s)/(2*pi)) with
// s = (|coord|-a)/L in the layer. Throws OutOfDomain outside the box.
double pml_xi(double coord, double half_width, double thickness, double peak);

// Peak strength giving a prescribed analytic round-trip reflection factor
// exp(-xibar*L/c) for normal incidence.
double default_xibar(double c, double thickness, double reflection_target);

struct PmlCoefficients {
  // Cell-centered samples.
  CellField<double> xi1_c, xi2_c;
  CellField<double> a_c, b_c, ab_c;

  // Per-edge-family samples of both profiles.
  EdgeField<double> xi1_e, xi2_e;

  // Diagonal matrix entries restricted to the component each edge family
  // stores: gamma1_e.x = xi1 at x-edges, gamma1_e.y = xi2 at y-edges, etc.
  EdgeField<double> gamma1_e;    // entry of G1
  EdgeField<double> gamma2_e;    // entry of G2
  EdgeField<double> gamma1t_e;   // entry of G1t
  EdgeField<double> a_e;         // xi1 + xi2 at the edge
  EdgeField<double> ainv_gamma1_e;  // gamma1/a, 0 where a = 0
  EdgeField<double> ainv_b_e;       // xi1*xi2/a, 0 where a = 0
  EdgeField<double> diss_weight_e;  // gamma1 + gamma1^2/a  (dissipation weight)
};

PmlCoefficients sample_pml(const PmlLayout& layout, const StaggeredGrid& grid);

}  // namespace wavescat
