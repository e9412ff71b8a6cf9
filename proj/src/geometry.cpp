#include "wavescat/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "wavescat/errors.hpp"

namespace wavescat {

namespace {

double sq(double v) { return v * v; }

double circle_sdist(const Circle& c, double x, double y) {
  // Positive inside, negative on the wave side.
  return c.radius - std::hypot(x - c.center.x, y - c.center.y);
}

// Level value phi = rho - r(theta) normalized by |grad phi|, computed from
// the analytic polar gradient. Only the sign matters deep inside, where the
// radius is clamped to keep the gradient bounded.
double star_sdist(const Star& s, double x, double y) {
  const double dx = x - s.center.x, dy = y - s.center.y;
  const double rho = std::hypot(dx, dy);
  const double theta = std::atan2(dy, dx);
  const double rb = s.r0 + s.r1 * std::cos(s.lobes * theta);
  const double drb = -s.r1 * s.lobes * std::sin(s.lobes * theta);
  const double rho_safe = std::max(rho, 0.3 * s.r0);
  const double grad = std::sqrt(1.0 + sq(drb / rho_safe));
  return (rb - rho) / grad;
}

double point_segment_dist(double px, double py, const Vec2& a, const Vec2& b) {
  const double vx = b.x - a.x, vy = b.y - a.y;
  const double len2 = vx * vx + vy * vy;
  double t = len2 > 0 ? ((px - a.x) * vx + (py - a.y) * vy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(px - (a.x + t * vx), py - (a.y + t * vy));
}

bool point_in_polygon(const Polygon& poly, double x, double y) {
  // Even-odd crossing test.
  bool inside = false;
  const auto& v = poly.vertices;
  for (size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    if ((v[i].y > y) != (v[j].y > y)) {
      const double xi =
          v[j].x + (y - v[j].y) / (v[i].y - v[j].y) * (v[i].x - v[j].x);
      if (x < xi) inside = !inside;
    }
  }
  return inside;
}

double polygon_sdist(const Polygon& poly, double x, double y) {
  double d = std::numeric_limits<double>::infinity();
  const auto& v = poly.vertices;
  for (size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    d = std::min(d, point_segment_dist(x, y, v[j], v[i]));
  }
  return point_in_polygon(poly, x, y) ? d : -d;
}

}  // namespace

double signed_distance(const Shape& shape, const RigidMotion& motion, double x,
                       double y, double t) {
  const Vec2 d = motion.displacement(t);
  const double xs = x - d.x;
  const double ys = y - d.y;
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Circle>) return circle_sdist(s, xs, ys);
        if constexpr (std::is_same_v<T, Star>) return star_sdist(s, xs, ys);
        if constexpr (std::is_same_v<T, Polygon>)
          return polygon_sdist(s, xs, ys);
      },
      shape);
}

std::array<double, 4> shape_bbox(const Shape& shape, const RigidMotion& motion,
                                 double t) {
  std::array<double, 4> bb{};
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Circle>) {
          bb = {s.center.x - s.radius, s.center.x + s.radius,
                s.center.y - s.radius, s.center.y + s.radius};
        } else if constexpr (std::is_same_v<T, Star>) {
          const double r = s.r0 + s.r1;
          bb = {s.center.x - r, s.center.x + r, s.center.y - r, s.center.y + r};
        } else if constexpr (std::is_same_v<T, Polygon>) {
          bb = {std::numeric_limits<double>::infinity(),
                -std::numeric_limits<double>::infinity(),
                std::numeric_limits<double>::infinity(),
                -std::numeric_limits<double>::infinity()};
          for (const auto& v : s.vertices) {
            bb[0] = std::min(bb[0], v.x);
            bb[1] = std::max(bb[1], v.x);
            bb[2] = std::min(bb[2], v.y);
            bb[3] = std::max(bb[3], v.y);
          }
        }
      },
      shape);
  const Vec2 d = motion.displacement(t);
  bb[0] += d.x;
  bb[1] += d.x;
  bb[2] += d.y;
  bb[3] += d.y;
  return bb;
}

double psi_eps(double r, double eps) {
  const double z = 6.0 * r / eps;
  if (z > 600.0) return 0.0;
  if (z < -600.0) return 1.0;
  // Saturating branches; no overflow for either sign.
  if (z >= 0.0) {
    const double e = std::exp(-z);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(z));
}

double w_eps(double r, double eps) {
  const double p = psi_eps(r, eps);
  return (6.0 / eps) * p * (1.0 - p);
}

double support_margin(double eps) {
  // 1 - psi rounds to exactly zero once exp(6r/eps) < eps_machine/2,
  // i.e. |r| > ~6.2*eps; use a wider band for safety.
  return 8.0 * eps;
}

EmbeddingField sample_embedding(const Shape& shape, const RigidMotion& motion,
                                const StaggeredGrid& grid, double t, double eps,
                                double phys_half_width_x,
                                double phys_half_width_y) {
  const auto bb = shape_bbox(shape, motion, t);
  const double m = support_margin(eps);
  if (bb[0] - m < -phys_half_width_x || bb[1] + m > phys_half_width_x ||
      bb[2] - m < -phys_half_width_y || bb[3] + m > phys_half_width_y) {
    std::ostringstream os;
    os << "sample_embedding: object halo reaches the damping collar at t=" << t
       << " (bbox [" << bb[0] << "," << bb[1] << "]x[" << bb[2] << "," << bb[3]
       << "], margin " << m << ")";
    throw GeometryEscape(os.str());
  }

  EmbeddingField f;
  f.eps = eps;
  f.time = t;
  f.psi_c.resize(grid.nx, grid.ny);
  f.w_c.resize(grid.nx, grid.ny);
  f.psi_e = EdgeField<double>(grid.nx, grid.ny);
  for (int j = 0; j < grid.ny; ++j) {
    const double y = grid.cell_y(j);
    for (int i = 0; i < grid.nx; ++i) {
      const double r = signed_distance(shape, motion, grid.cell_x(i), y, t);
      f.psi_c(i, j) = psi_eps(r, eps);
      f.w_c(i, j) = w_eps(r, eps);
    }
  }
  for (int j = 0; j < grid.ny; ++j) {
    const double y = grid.cell_y(j);
    for (int i = 0; i < grid.nx - 1; ++i) {
      f.psi_e.x(i, j) =
          psi_eps(signed_distance(shape, motion, grid.xedge_x(i), y, t), eps);
    }
  }
  for (int j = 0; j < grid.ny - 1; ++j) {
    const double y = grid.yedge_y(j);
    for (int i = 0; i < grid.nx; ++i) {
      f.psi_e.y(i, j) =
          psi_eps(signed_distance(shape, motion, grid.cell_x(i), y, t), eps);
    }
  }
  return f;
}

EmbeddingField uniform_embedding(const StaggeredGrid& grid, double eps) {
  EmbeddingField f;
  f.eps = eps;
  f.psi_c = CellField<double>::Ones(grid.nx, grid.ny);
  f.w_c = CellField<double>::Zero(grid.nx, grid.ny);
  f.psi_e = EdgeField<double>(grid.nx, grid.ny);
  f.psi_e.x.setOnes();
  f.psi_e.y.setOnes();
  return f;
}

}  // namespace wavescat
