// Moving-object geometry: signed distance, the smooth indicator profile
// psi_eps, and its sampling on the staggered grid.
//
// Sign convention: r < 0 on the wave side, r > 0 inside the object, so
// psi_eps(r) = 1/(exp(6 r/eps)+1) tends to 1 in the wave region and to 0
// inside. The interface weight W_eps = |grad psi_eps| is evaluated from the
// closed form (6/eps) psi (1-psi), exact for a signed distance (|grad r|=1).
#pragma once

#include <array>
#include <variant>
#include <vector>

#include "wavescat/field.hpp"
#include "wavescat/grid.hpp"

namespace wavescat {

struct Vec2 {
  double x = 0, y = 0;
};

struct Circle {
  Vec2 center;
  double radius = 0;
};

// Radial profile rho(theta) = r0 + r1*cos(lobes*theta) about the center.
struct Star {
  Vec2 center;
  double r0 = 0;
  double r1 = 0;
  int lobes = 0;
};

// Simple (non-self-intersecting) polygon, vertices in order.
struct Polygon {
  std::vector<Vec2> vertices;
};

using Shape = std::variant<Circle, Star, Polygon>;

struct RigidMotion {
  Vec2 velocity;      // translation velocity at t = 0
  Vec2 acceleration;  // constant acceleration; must be zero for sound-hard runs

  Vec2 displacement(double t) const {
    return {velocity.x * t + 0.5 * acceleration.x * t * t,
            velocity.y * t + 0.5 * acceleration.y * t * t};
  }
};

// Signed distance to the shape boundary at time t (exact for circle and
// polygon, a normalized radial level-set value for the star).
double signed_distance(const Shape& shape, const RigidMotion& motion, double x,
                       double y, double t);

// Axis-aligned bounding box of the shape at time t.
std::array<double, 4> shape_bbox(const Shape& shape, const RigidMotion& motion,
                                 double t);  // {xmin, xmax, ymin, ymax}

// Logistic indicator profile and its radial derivative magnitude. The
// exponent is clamped at |6r/eps| = 600; past the clamp the profile is an
// exact 0 or 1.
double psi_eps(double r, double eps);
double w_eps(double r, double eps);

struct EmbeddingField {
  CellField<double> psi_c;   // indicator at cell centers
  EdgeField<double> psi_e;   // indicator at both edge families
  CellField<double> w_c;     // interface weight at cell centers
  double eps = 0;
  double time = 0;
};

// Samples psi at cells and edges and W at cells at time t. Throws
// GeometryEscape when the shape's diffuse halo reaches the damping collar
// (the disjoint-support requirement between embedding and layer).
EmbeddingField sample_embedding(const Shape& shape, const RigidMotion& motion,
                                const StaggeredGrid& grid, double t, double eps,
                                double phys_half_width_x,
                                double phys_half_width_y);

// A trivial embedding with psi == 1 and W == 0 (no object).
EmbeddingField uniform_embedding(const StaggeredGrid& grid, double eps = 1.0);

// Half-width of the halo inside which psi is allowed to differ from 1 in
// double precision; used by the support-condition check.
double support_margin(double eps);

}  // namespace wavescat
