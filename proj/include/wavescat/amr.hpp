// Block-structured local refinement on full-level index spaces.
//
// Each level keeps level-wide arrays plus a validity mask (the union of its
// patches); level 0 covers the box. A step fills a two-cell ghost band of
// every fine level from the next-coarser data, advances level 0, 1, ...
// (each level solves its own implicit system on the valid cells, with
// already-updated coarse values frozen in the ghosts), then averages fine
// solutions down onto covered coarse cells and edges and rotates the time
// levels. Refinement ratio is fixed at 2 and every level uses the same
// time step.
#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "wavescat/energy.hpp"
#include "wavescat/field.hpp"
#include "wavescat/geometry.hpp"
#include "wavescat/grid.hpp"
#include "wavescat/integrators.hpp"
#include "wavescat/model.hpp"
#include "wavescat/pml.hpp"
#include "wavescat/source.hpp"
#include "wavescat/state.hpp"

namespace wavescat {

struct PatchRect {
  int i0 = 0, j0 = 0, ni = 0, nj = 0;  // cell rectangle in its level's index space
};

struct SensorThresholds {
  double tau_emb = 0.5;
  double tau_pml = 0.5;
  double tau_sol = 0.02;
  int buffer_cells = 2;
  int regrid_interval = 10;
  int tile_size = 1;
};

// --- transfer operators (ratio 2) ------------------------------------------

CellField<double> prolong_cells(const CellField<double>& coarse);
EdgeField<double> prolong_edges(const EdgeField<double>& coarse);
CellField<double> restrict_cells(const CellField<double>& fine);
EdgeField<double> restrict_edges(const EdgeField<double>& fine);

// --- sensors and clustering --------------------------------------------------

struct SensorFields {
  CellField<double> emb, pml, sol;
};

SensorFields compute_sensors(const StaggeredGrid& g, const CellField<double>& psi,
                             const CellField<double>& pml_a,
                             const CellField<double>& p, int smooth_sweeps = 2);

Mask tag_cells(const SensorFields& s, const SensorThresholds& thr);

// Buffered, clustered rectangles covering every tagged cell. When `allowed`
// is given, every returned rectangle lies inside it (proper-nesting clip).
std::vector<PatchRect> tag_and_cluster(const Mask& tags,
                                       const SensorThresholds& thr,
                                       const Mask* allowed = nullptr);

Mask dilate(const Mask& m, int radius);
Mask erode(const Mask& m, int radius);
Mask rects_to_mask(const std::vector<PatchRect>& rects, int nx, int ny);

// --- hierarchy ---------------------------------------------------------------

struct AmrLevel {
  StaggeredGrid grid;
  PmlCoefficients coeffs;
  WaveState state;
  Mask valid;    // cells inside the union of patches
  Mask covered;  // cells covered by the next-finer level
  std::vector<PatchRect> patches;
};

struct AmrContext {
  ModelParams model;
  std::optional<Shape> shape;
  RigidMotion motion;
  double eps = 0.05;
  std::optional<SourceSpec> source;
  StepperOptions solver;
  SensorThresholds thresholds;
  double ax = 0, ay = 0;  // physical half-widths (for escape checks / energy)
};

class LevelHierarchy {
 public:
  LevelHierarchy(const StaggeredGrid& base, const PmlLayout& layout,
                 int max_levels);

  // Bootstraps every level from analytic initial data, then performs the
  // initial regrid so fine patches exist wherever the sensors fire at t = tau.
  void initialize(const AmrContext& ctx, const CellField<double>& p0_base,
                  const CellField<double>& v0_base,
                  const std::function<CellField<double>(const StaggeredGrid&)>&
                      eval_p0,
                  const std::function<CellField<double>(const StaggeredGrid&)>&
                      eval_v0);

  // Algorithm step 1: rebuild the patch layout from the current sensors.
  // Persistent cells keep their values; new cells are prolonged.
  void regrid(const AmrContext& ctx);

  // Algorithm steps 3-6 for one time step (no regridding).
  void advance(const AmrContext& ctx);

  int max_levels() const { return static_cast<int>(levels_.size()) - 1; }
  const AmrLevel& level(int l) const { return levels_[l]; }
  AmrLevel& level(int l) { return levels_[l]; }
  long step_index() const { return levels_[0].state.n; }
  double time() const { return levels_[0].state.t; }
  int last_solver_iters() const { return last_iters_; }

  // Finest-available physical energy: per level, cells/edges not covered by
  // a finer level. Level 0 alone is the coarse-grid value.
  double energy_physical_level0(const AmrContext& ctx) const;
  double energy_physical_all(const AmrContext& ctx) const;

  bool properly_nested(int buffer) const;

  // Installs a patch layout for level l (rectangles given in the parent
  // level's index space). Persistent cells keep their values; newly valid
  // cells and edges are prolonged from the parent.
  void apply_patch_layout(int l, const std::vector<PatchRect>& parent_rects);

 private:
  EmbeddingField embedding_at(const AmrContext& ctx, int l, double t) const;
  void fill_ghost_band(int l);
  void solve_level(int l, const AmrContext& ctx);
  void average_down();

  std::vector<AmrLevel> levels_;
  std::vector<EmbeddingField> emb_next_;  // per level, at t^{n+1} during advance
  std::vector<CellField<double>> pending_pp_;
  std::vector<EdgeField<double>> pending_lam_;
  int last_iters_ = 0;
};

}  // namespace wavescat
