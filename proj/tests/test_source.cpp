#include <doctest.h>

#include <cmath>

#include "wavescat/source.hpp"

using namespace wavescat;

TEST_CASE("source spatial peak and temporal zeros") {
  SourceSpec s;
  s.x0 = -3.0;
  s.y0 = 0.0;
  s.eta = 0.25;
  s.w = 10.0 * M_PI;
  s.sigma = 2.0 / 25.0;
  s.t0 = 0.0;

  // Peak of g at the center is 1/(sqrt(2*pi)*eta).
  CHECK(source_space(s, -3.0, 0.0) ==
        doctest::Approx(1.0 / (std::sqrt(2.0 * M_PI) * s.eta)).epsilon(1e-14));

  // sin(0) = 0 at onset.
  CHECK(source_time(s, 0.0) == 0.0);

  StaggeredGrid g(8, 8, -7.0, 7.0, -7.0, 7.0);
  auto f = eval_source(s, g, 10.0, s.t0);
  CHECK(f.abs().maxCoeff() == 0.0);

  // t - t0 = pi/w kills sin regardless of sigma.
  const double t = s.t0 + M_PI / s.w;
  CHECK(std::abs(source_time(s, t)) < 1e-15);

  // Scaling: f = c^2 g gamma.
  const double tv = 0.033;
  auto f2 = eval_source(s, g, 10.0, tv);
  const double expect =
      100.0 * source_space(s, g.cell_x(2), g.cell_y(5)) * source_time(s, tv);
  CHECK(f2(2, 5) == doctest::Approx(expect).epsilon(1e-14));
}
