// Staggered Cartesian grid covering the computational box exactly.
#pragma once

#include <cassert>

namespace wavescat {

struct StaggeredGrid {
  int nx = 0, ny = 0;
  double hx = 0, hy = 0;
  double x0 = 0, y0 = 0;  // lower-left corner of the box

  StaggeredGrid() = default;
  StaggeredGrid(int nx_, int ny_, double xl, double xr, double yl, double yr)
      : nx(nx_), ny(ny_), hx((xr - xl) / nx_), hy((yr - yl) / ny_), x0(xl), y0(yl) {
    assert(nx >= 4 && ny >= 4);
  }

  double cell_x(int i) const { return x0 + (i + 0.5) * hx; }
  double cell_y(int j) const { return y0 + (j + 0.5) * hy; }
  // Interior x-edge i sits between cells i and i+1; likewise for y-edges.
  double xedge_x(int i) const { return x0 + (i + 1.0) * hx; }
  double yedge_y(int j) const { return y0 + (j + 1.0) * hy; }

  double xr() const { return x0 + nx * hx; }
  double yr() const { return y0 + ny * hy; }

  StaggeredGrid refined(int ratio) const {
    StaggeredGrid g;
    g.nx = nx * ratio;
    g.ny = ny * ratio;
    g.hx = hx / ratio;
    g.hy = hy / ratio;
    g.x0 = x0;
    g.y0 = y0;
    return g;
  }

  bool same_layout(const StaggeredGrid& o) const {
    return nx == o.nx && ny == o.ny && hx == o.hx && hy == o.hy && x0 == o.x0 &&
           y0 == o.y0;
  }
};

}  // namespace wavescat
