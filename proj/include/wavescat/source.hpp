// Separable acoustic source f(x,t) = c^2 * g(x) * gamma(t) with a Gaussian
// spatial envelope g and a windowed sine gamma(t) = sin(w(t-t0)) exp(-sigma (t-t0)^2).
#pragma once

#include <cmath>

#include "wavescat/field.hpp"
#include "wavescat/grid.hpp"

namespace wavescat {

struct SourceSpec {
  double x0 = 0, y0 = 0;  // center
  double eta = 1;         // spatial variance parameter
  double w = 0;           // angular frequency
  double sigma = 1;       // temporal decay
  double t0 = 0;          // onset time
};

inline double source_space(const SourceSpec& s, double x, double y) {
  const double r2 = (x - s.x0) * (x - s.x0) + (y - s.y0) * (y - s.y0);
  return std::exp(-r2 / (2.0 * s.eta)) / (std::sqrt(2.0 * M_PI) * s.eta);
}

inline double source_time(const SourceSpec& s, double t) {
  const double u = t - s.t0;
  return std::sin(s.w * u) * std::exp(-s.sigma * u * u);
}

inline CellField<double> eval_source(const SourceSpec& s, const StaggeredGrid& g,
                                     double c, double t) {
  CellField<double> f(g.nx, g.ny);
  const double amp = c * c * source_time(s, t);
  if (amp == 0.0) {
    f.setZero();
    return f;
  }
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      f(i, j) = amp * source_space(s, g.cell_x(i), g.cell_y(j));
  return f;
}

}  // namespace wavescat
