#include "wavescat/amr.hpp"

#include <algorithm>
#include <cmath>

#include "wavescat/errors.hpp"
#include "wavescat/stencil_ops.hpp"

namespace wavescat {

namespace {

// Value with linear extrapolation outside the array, axis by axis; keeps the
// transfer operators exact on (bi)linear data up to the domain boundary.
double extrap(const CellField<double>& u, Eigen::Index i, Eigen::Index j) {
  const Eigen::Index nx = u.rows(), ny = u.cols();
  if (i < 0) return 2.0 * extrap(u, 0, j) - extrap(u, 1, j);
  if (i >= nx) return 2.0 * extrap(u, nx - 1, j) - extrap(u, nx - 2, j);
  if (j < 0) return 2.0 * u(i, 0) - u(i, 1);
  if (j >= ny) return 2.0 * u(i, ny - 1) - u(i, ny - 2);
  return u(i, j);
}

// Bilinear sample at lattice coordinates (sx, sy) of the array's own index
// space.
double bilinear(const CellField<double>& u, double sx, double sy) {
  const double fx = std::floor(sx), fy = std::floor(sy);
  const auto i0 = static_cast<Eigen::Index>(fx);
  const auto j0 = static_cast<Eigen::Index>(fy);
  const double wx = sx - fx, wy = sy - fy;
  return (1.0 - wx) * (1.0 - wy) * extrap(u, i0, j0) +
         wx * (1.0 - wy) * extrap(u, i0 + 1, j0) +
         (1.0 - wx) * wy * extrap(u, i0, j0 + 1) +
         wx * wy * extrap(u, i0 + 1, j0 + 1);
}

}  // namespace

CellField<double> prolong_cells(const CellField<double>& coarse) {
  const Eigen::Index nx = coarse.rows(), ny = coarse.cols();
  CellField<double> fine(2 * nx, 2 * ny);
  for (Eigen::Index jf = 0; jf < 2 * ny; ++jf)
    for (Eigen::Index if_ = 0; if_ < 2 * nx; ++if_)
      fine(if_, jf) = bilinear(coarse, 0.5 * if_ - 0.25, 0.5 * jf - 0.25);
  return fine;
}

EdgeField<double> prolong_edges(const EdgeField<double>& coarse) {
  const Eigen::Index nx = coarse.y.rows(), ny = coarse.x.cols();
  EdgeField<double> fine(2 * nx, 2 * ny);
  // x-edges: lattice aligned with coarse x-edges along x, cell-like along y.
  for (Eigen::Index jf = 0; jf < 2 * ny; ++jf)
    for (Eigen::Index if_ = 0; if_ < 2 * nx - 1; ++if_)
      fine.x(if_, jf) = bilinear(coarse.x, 0.5 * if_ - 0.5, 0.5 * jf - 0.25);
  for (Eigen::Index jf = 0; jf < 2 * ny - 1; ++jf)
    for (Eigen::Index if_ = 0; if_ < 2 * nx; ++if_)
      fine.y(if_, jf) = bilinear(coarse.y, 0.5 * if_ - 0.25, 0.5 * jf - 0.5);
  return fine;
}

CellField<double> restrict_cells(const CellField<double>& fine) {
  const Eigen::Index nx = fine.rows() / 2, ny = fine.cols() / 2;
  CellField<double> coarse(nx, ny);
  for (Eigen::Index j = 0; j < ny; ++j)
    for (Eigen::Index i = 0; i < nx; ++i)
      coarse(i, j) = 0.25 * (fine(2 * i, 2 * j) + fine(2 * i + 1, 2 * j) +
                             fine(2 * i, 2 * j + 1) + fine(2 * i + 1, 2 * j + 1));
  return coarse;
}

EdgeField<double> restrict_edges(const EdgeField<double>& fine) {
  const Eigen::Index nx = fine.y.rows() / 2, ny = fine.x.cols() / 2;
  EdgeField<double> coarse(nx, ny);
  for (Eigen::Index j = 0; j < ny; ++j)
    for (Eigen::Index i = 0; i < nx - 1; ++i)
      coarse.x(i, j) =
          0.5 * (fine.x(2 * i + 1, 2 * j) + fine.x(2 * i + 1, 2 * j + 1));
  for (Eigen::Index j = 0; j < ny - 1; ++j)
    for (Eigen::Index i = 0; i < nx; ++i)
      coarse.y(i, j) =
          0.5 * (fine.y(2 * i, 2 * j + 1) + fine.y(2 * i + 1, 2 * j + 1));
  return coarse;
}

namespace {

void smooth_sweep(CellField<double>& u) {
  const Eigen::Index nx = u.rows(), ny = u.cols();
  CellField<double> out(nx, ny);
  auto at = [&](Eigen::Index i, Eigen::Index j) {
    i = std::clamp<Eigen::Index>(i, 0, nx - 1);
    j = std::clamp<Eigen::Index>(j, 0, ny - 1);
    return u(i, j);
  };
  for (Eigen::Index j = 0; j < ny; ++j)
    for (Eigen::Index i = 0; i < nx; ++i)
      out(i, j) = 0.5 * u(i, j) + 0.125 * (at(i - 1, j) + at(i + 1, j) +
                                           at(i, j - 1) + at(i, j + 1));
  u = std::move(out);
}

}  // namespace

SensorFields compute_sensors(const StaggeredGrid& g, const CellField<double>& psi,
                             const CellField<double>& pml_a,
                             const CellField<double>& p, int smooth_sweeps) {
  const Eigen::Index nx = g.nx, ny = g.ny;
  SensorFields s;
  s.emb.resize(nx, ny);
  s.pml.resize(nx, ny);
  s.sol.resize(nx, ny);
  auto cl = [&](const CellField<double>& u, Eigen::Index i, Eigen::Index j) {
    i = std::clamp<Eigen::Index>(i, 0, nx - 1);
    j = std::clamp<Eigen::Index>(j, 0, ny - 1);
    return u(i, j);
  };
  for (Eigen::Index j = 0; j < ny; ++j)
    for (Eigen::Index i = 0; i < nx; ++i) {
      const double gx = (cl(psi, i + 1, j) - cl(psi, i - 1, j)) / (2.0 * g.hx);
      const double gy = (cl(psi, i, j + 1) - cl(psi, i, j - 1)) / (2.0 * g.hy);
      s.emb(i, j) = std::hypot(gx, gy);
      s.pml(i, j) = pml_a(i, j) > 0.0 ? 1.0 : 0.0;
      const double ux = 0.5 * (cl(p, i + 1, j) - cl(p, i - 1, j));
      const double uy = 0.5 * (cl(p, i, j + 1) - cl(p, i, j - 1));
      s.sol(i, j) = std::hypot(ux, uy);
    }
  for (int k = 0; k < smooth_sweeps; ++k) {
    smooth_sweep(s.emb);
    smooth_sweep(s.pml);
    smooth_sweep(s.sol);
  }
  return s;
}

Mask tag_cells(const SensorFields& s, const SensorThresholds& thr) {
  Mask tags(s.emb.rows(), s.emb.cols());
  for (Eigen::Index j = 0; j < tags.cols(); ++j)
    for (Eigen::Index i = 0; i < tags.rows(); ++i)
      tags(i, j) = s.emb(i, j) > thr.tau_emb || s.pml(i, j) > thr.tau_pml ||
                   s.sol(i, j) > thr.tau_sol;
  return tags;
}

Mask dilate(const Mask& m, int radius) {
  const Eigen::Index nx = m.rows(), ny = m.cols();
  Mask out = Mask::Constant(nx, ny, false);
  for (Eigen::Index j = 0; j < ny; ++j)
    for (Eigen::Index i = 0; i < nx; ++i) {
      if (!m(i, j)) continue;
      for (Eigen::Index dj = -radius; dj <= radius; ++dj)
        for (Eigen::Index di = -radius; di <= radius; ++di) {
          const Eigen::Index ii = i + di, jj = j + dj;
          if (ii >= 0 && ii < nx && jj >= 0 && jj < ny) out(ii, jj) = true;
        }
    }
  return out;
}

Mask erode(const Mask& m, int radius) {
  const Eigen::Index nx = m.rows(), ny = m.cols();
  Mask out = Mask::Constant(nx, ny, true);
  for (Eigen::Index j = 0; j < ny; ++j)
    for (Eigen::Index i = 0; i < nx; ++i) {
      bool keep = true;
      for (Eigen::Index dj = -radius; dj <= radius && keep; ++dj)
        for (Eigen::Index di = -radius; di <= radius && keep; ++di) {
          const Eigen::Index ii = i + di, jj = j + dj;
          // Cells outside the domain do not count against erosion.
          if (ii >= 0 && ii < nx && jj >= 0 && jj < ny && !m(ii, jj)) keep = false;
        }
      out(i, j) = keep && m(i, j);
    }
  return out;
}

Mask rects_to_mask(const std::vector<PatchRect>& rects, int nx, int ny) {
  Mask m = Mask::Constant(nx, ny, false);
  for (const auto& r : rects)
    for (int j = r.j0; j < r.j0 + r.nj; ++j)
      for (int i = r.i0; i < r.i0 + r.ni; ++i)
        if (i >= 0 && i < nx && j >= 0 && j < ny) m(i, j) = true;
  return m;
}

namespace {

struct ClusterState {
  const Mask* cells;
  const Mask* allowed;
  int tile;
  std::vector<PatchRect>* out;
};

long count_in(const Mask& m, const PatchRect& r) {
  long c = 0;
  for (int j = r.j0; j < r.j0 + r.nj; ++j)
    for (int i = r.i0; i < r.i0 + r.ni; ++i)
      if (m(i, j)) ++c;
  return c;
}

bool inside_allowed(const Mask* allowed, const PatchRect& r) {
  if (!allowed) return true;
  for (int j = r.j0; j < r.j0 + r.nj; ++j)
    for (int i = r.i0; i < r.i0 + r.ni; ++i)
      if (!(*allowed)(i, j)) return false;
  return true;
}

PatchRect trimmed(const Mask& m, const PatchRect& r) {
  int i0 = r.i0 + r.ni, i1 = r.i0 - 1, j0 = r.j0 + r.nj, j1 = r.j0 - 1;
  for (int j = r.j0; j < r.j0 + r.nj; ++j)
    for (int i = r.i0; i < r.i0 + r.ni; ++i)
      if (m(i, j)) {
        i0 = std::min(i0, i);
        i1 = std::max(i1, i);
        j0 = std::min(j0, j);
        j1 = std::max(j1, j);
      }
  if (i1 < i0) return PatchRect{0, 0, 0, 0};
  return PatchRect{i0, j0, i1 - i0 + 1, j1 - j0 + 1};
}

PatchRect align_to_tile(const ClusterState& st, PatchRect r) {
  if (st.tile <= 1) return r;
  const int nx = static_cast<int>(st.cells->rows());
  const int ny = static_cast<int>(st.cells->cols());
  int i0 = (r.i0 / st.tile) * st.tile;
  int j0 = (r.j0 / st.tile) * st.tile;
  int i1 = ((r.i0 + r.ni + st.tile - 1) / st.tile) * st.tile;
  int j1 = ((r.j0 + r.nj + st.tile - 1) / st.tile) * st.tile;
  i1 = std::min(i1, nx);
  j1 = std::min(j1, ny);
  PatchRect aligned{i0, j0, i1 - i0, j1 - j0};
  // Alignment must not push a patch outside the nesting region.
  return inside_allowed(st.allowed, aligned) ? aligned : r;
}

// Berger-Rigoutsos-style recursive splitting on the tag signature.
void split_recurse(const ClusterState& st, PatchRect r) {
  r = trimmed(*st.cells, r);
  if (r.ni == 0) return;
  const long cnt = count_in(*st.cells, r);
  const double fill = static_cast<double>(cnt) / (double(r.ni) * double(r.nj));
  const bool ok_here = inside_allowed(st.allowed, r);
  if (ok_here && (fill >= 0.65 || (r.ni * r.nj) <= 16)) {
    st.out->push_back(align_to_tile(st, r));
    return;
  }
  // Signature along the longer dimension; prefer an interior zero gap.
  const bool split_x = r.ni >= r.nj;
  const int len = split_x ? r.ni : r.nj;
  if (len < 2) {
    if (ok_here) st.out->push_back(align_to_tile(st, r));
    return;
  }
  std::vector<long> sig(len, 0);
  for (int j = r.j0; j < r.j0 + r.nj; ++j)
    for (int i = r.i0; i < r.i0 + r.ni; ++i)
      if ((*st.cells)(i, j)) ++sig[split_x ? i - r.i0 : j - r.j0];
  int cut = len / 2;
  int best_gap = -1;
  for (int k = 1; k < len - 1; ++k) {
    if (sig[k] == 0 &&
        (best_gap < 0 || std::abs(k - len / 2) < std::abs(best_gap - len / 2)))
      best_gap = k;
  }
  if (best_gap > 0) cut = best_gap;
  PatchRect a = r, b = r;
  if (split_x) {
    a.ni = cut;
    b.i0 = r.i0 + cut;
    b.ni = r.ni - cut;
  } else {
    a.nj = cut;
    b.j0 = r.j0 + cut;
    b.nj = r.nj - cut;
  }
  split_recurse(st, a);
  split_recurse(st, b);
}

}  // namespace

std::vector<PatchRect> tag_and_cluster(const Mask& tags,
                                       const SensorThresholds& thr,
                                       const Mask* allowed) {
  Mask buffered = dilate(tags, thr.buffer_cells);
  if (allowed) buffered = buffered && *allowed;
  if (!buffered.any()) return {};
  std::vector<PatchRect> out;
  ClusterState st{&buffered, allowed, thr.tile_size, &out};
  split_recurse(st, PatchRect{0, 0, static_cast<int>(tags.rows()),
                              static_cast<int>(tags.cols())});
  return out;
}

// --- hierarchy ---------------------------------------------------------------

LevelHierarchy::LevelHierarchy(const StaggeredGrid& base,
                               const PmlLayout& layout, int max_levels) {
  levels_.resize(max_levels + 1);
  for (int l = 0; l <= max_levels; ++l) {
    auto& L = levels_[l];
    L.grid = l == 0 ? base : levels_[l - 1].grid.refined(2);
    L.coeffs = sample_pml(layout, L.grid);
    L.valid = Mask::Constant(L.grid.nx, L.grid.ny, l == 0);
    L.covered = Mask::Constant(L.grid.nx, L.grid.ny, false);
    if (l == 0) L.patches.push_back(PatchRect{0, 0, L.grid.nx, L.grid.ny});
    L.state.p_prev = CellField<double>::Zero(L.grid.nx, L.grid.ny);
    L.state.p_curr = CellField<double>::Zero(L.grid.nx, L.grid.ny);
    L.state.lam_prev = EdgeField<double>::zero(L.grid.nx, L.grid.ny);
    L.state.lam = EdgeField<double>::zero(L.grid.nx, L.grid.ny);
  }
}

EmbeddingField LevelHierarchy::embedding_at(const AmrContext& ctx, int l,
                                            double t) const {
  if (ctx.shape)
    return sample_embedding(*ctx.shape, ctx.motion, levels_[l].grid, t, ctx.eps,
                            ctx.ax, ctx.ay);
  return uniform_embedding(levels_[l].grid, ctx.eps);
}

void LevelHierarchy::initialize(
    const AmrContext& ctx, const CellField<double>& p0_base,
    const CellField<double>& v0_base,
    const std::function<CellField<double>(const StaggeredGrid&)>& eval_p0,
    const std::function<CellField<double>(const StaggeredGrid&)>& eval_v0) {
  const auto& m = ctx.model;
  auto boot = [&](int l, const CellField<double>& p0, const CellField<double>& v0) {
    const auto emb0 = embedding_at(ctx, l, 0.0);
    CellField<double> f0;
    const CellField<double>* f0p = nullptr;
    if (ctx.source) {
      f0 = eval_source(*ctx.source, levels_[l].grid, m.c, 0.0);
      f0p = &f0;
    }
    levels_[l].state = bootstrap_first_step(p0, v0, levels_[l].grid,
                                            levels_[l].coeffs, emb0, m.c, m.tau,
                                            f0p);
  };
  boot(0, p0_base, v0_base);
  regrid(ctx);
  for (int l = 1; l <= max_levels(); ++l)
    boot(l, eval_p0(levels_[l].grid), eval_v0(levels_[l].grid));
}

void LevelHierarchy::apply_patch_layout(int l,
                                        const std::vector<PatchRect>& parent_rects) {
  auto& parent = levels_[l - 1];
  auto& L = levels_[l];
  std::vector<PatchRect> fine_rects;
  fine_rects.reserve(parent_rects.size());
  for (const auto& r : parent_rects)
    fine_rects.push_back(PatchRect{2 * r.i0, 2 * r.j0, 2 * r.ni, 2 * r.nj});

  const Mask new_valid = rects_to_mask(fine_rects, L.grid.nx, L.grid.ny);
  const Mask& old_valid = L.valid;

  // Persistent cells keep their values; newly valid data is prolonged.
  const CellField<double> pp = prolong_cells(parent.state.p_curr);
  const CellField<double> pm = prolong_cells(parent.state.p_prev);
  for (Eigen::Index j = 0; j < new_valid.cols(); ++j)
    for (Eigen::Index i = 0; i < new_valid.rows(); ++i)
      if (new_valid(i, j) && !old_valid(i, j)) {
        L.state.p_curr(i, j) = pp(i, j);
        L.state.p_prev(i, j) = pm(i, j);
      }
  const EdgeField<double> lamp = prolong_edges(parent.state.lam);
  const EdgeField<double> lamm = prolong_edges(parent.state.lam_prev);
  for (Eigen::Index j = 0; j < L.state.lam.x.cols(); ++j)
    for (Eigen::Index i = 0; i < L.state.lam.x.rows(); ++i) {
      const bool had = old_valid(i, j) || old_valid(i + 1, j);
      const bool needed = new_valid(i, j) || new_valid(i + 1, j);
      if (needed && !had) {
        L.state.lam.x(i, j) = lamp.x(i, j);
        L.state.lam_prev.x(i, j) = lamm.x(i, j);
      }
    }
  for (Eigen::Index j = 0; j < L.state.lam.y.cols(); ++j)
    for (Eigen::Index i = 0; i < L.state.lam.y.rows(); ++i) {
      const bool had = old_valid(i, j) || old_valid(i, j + 1);
      const bool needed = new_valid(i, j) || new_valid(i, j + 1);
      if (needed && !had) {
        L.state.lam.y(i, j) = lamp.y(i, j);
        L.state.lam_prev.y(i, j) = lamm.y(i, j);
      }
    }
  L.state.t = parent.state.t;
  L.state.n = parent.state.n;
  L.valid = new_valid;
  L.patches = std::move(fine_rects);
  parent.covered = rects_to_mask(parent_rects, parent.grid.nx, parent.grid.ny);
}

void LevelHierarchy::regrid(const AmrContext& ctx) {
  for (int l = 0; l < max_levels(); ++l) {
    auto& L = levels_[l];
    const auto emb_now = embedding_at(ctx, l, L.state.t);
    const auto sensors =
        compute_sensors(L.grid, emb_now.psi_c, L.coeffs.a_c, L.state.p_curr);
    Mask tags = tag_cells(sensors, ctx.thresholds) && L.valid;
    std::vector<PatchRect> rects;
    if (l == 0) {
      rects = tag_and_cluster(tags, ctx.thresholds, nullptr);
    } else {
      const Mask allowed = erode(L.valid, ctx.thresholds.buffer_cells);
      tags = tags && allowed;
      rects = tag_and_cluster(tags, ctx.thresholds, &allowed);
    }
    apply_patch_layout(l + 1, rects);
  }
}

void LevelHierarchy::solve_level(int l, const AmrContext& ctx) {
  auto& L = levels_[l];
  const auto& m = ctx.model;
  const LambdaFactors lf = lambda_factors(L.coeffs, m.c, m.tau);

  CellField<double> f_avg;
  const CellField<double>* f_avg_p = nullptr;
  if (ctx.source) {
    const double t = L.state.t;
    f_avg = 0.25 * (eval_source(*ctx.source, L.grid, m.c, t + m.tau) +
                    2.0 * eval_source(*ctx.source, L.grid, m.c, t) +
                    eval_source(*ctx.source, L.grid, m.c, t - m.tau));
    f_avg_p = &f_avg;
  }

  TwoFieldParts parts;
  if (!ctx.shape) {
    parts = assemble_fixed_parts(L.state, L.grid, L.coeffs, m.c, m.tau, lf,
                                 f_avg_p);
  } else if (m.bc == BoundaryModel::kSoft) {
    parts = assemble_soft_parts(L.state, L.grid, L.coeffs, m, emb_next_[l], lf,
                                f_avg_p);
  } else {
    parts = assemble_hard_parts(L.state, L.grid, L.coeffs, m, emb_next_[l], lf,
                                f_avg_p);
  }

  SolveOptions sopts;
  sopts.tol = ctx.solver.tol;
  sopts.max_iter = ctx.solver.max_iter;
  sopts.symmetric = !parts.has_penalty;

  CellField<double> pp_full;
  SolveReport rep;
  if (l == 0) {
    auto apply = [&](const CellField<double>& p) {
      return apply_two_field(L.grid, parts, m.tau, p);
    };
    CellField<double> guess = L.state.p_curr;
    auto [x, r] = solve_cells(apply, parts.rhs, guess, sopts);
    pp_full = std::move(x);
    rep = r;
  } else {
    // Frozen ghosts: the already-updated parent solution, prolonged into
    // every invalid cell; the Krylov unknowns live on the valid cells only.
    CellField<double> mask(L.grid.nx, L.grid.ny);
    for (Eigen::Index j = 0; j < mask.cols(); ++j)
      for (Eigen::Index i = 0; i < mask.rows(); ++i)
        mask(i, j) = L.valid(i, j) ? 1.0 : 0.0;
    const CellField<double> parent_pp = prolong_cells(pending_pp_[l - 1]);
    CellField<double> gext = (1.0 - mask) * parent_pp;
    auto apply = [&](const CellField<double>& p) {
      return CellField<double>(mask *
                               apply_two_field(L.grid, parts, m.tau,
                                               CellField<double>(mask * p)));
    };
    const CellField<double> rhs_eff =
        mask * (parts.rhs - apply_two_field(L.grid, parts, m.tau, gext));
    CellField<double> guess = mask * L.state.p_curr;
    auto [x, r] = solve_cells(apply, rhs_eff, guess, sopts);
    pp_full = x + gext;
    rep = r;
  }
  if (rep.status != SolveStatus::kConverged)
    throw SolverDivergence("hierarchy level solve failed");
  last_iters_ += rep.iterations;

  const EdgeField<double> gsum =
      grad_plus(L.grid, CellField<double>(L.state.p_curr + pp_full));
  pending_lam_[l] = advance_lambda(lf, L.state.lam, gsum);
  pending_pp_[l] = std::move(pp_full);
}

void LevelHierarchy::average_down() {
  for (int l = max_levels(); l >= 1; --l) {
    const auto& L = levels_[l];
    auto& P = levels_[l - 1];
    const CellField<double> rc = restrict_cells(pending_pp_[l]);
    for (Eigen::Index j = 0; j < P.covered.cols(); ++j)
      for (Eigen::Index i = 0; i < P.covered.rows(); ++i)
        if (P.covered(i, j)) pending_pp_[l - 1](i, j) = rc(i, j);
    const EdgeField<double> re = restrict_edges(pending_lam_[l]);
    for (Eigen::Index j = 0; j < pending_lam_[l - 1].x.cols(); ++j)
      for (Eigen::Index i = 0; i < pending_lam_[l - 1].x.rows(); ++i)
        if (P.covered(i, j) && P.covered(i + 1, j))
          pending_lam_[l - 1].x(i, j) = re.x(i, j);
    for (Eigen::Index j = 0; j < pending_lam_[l - 1].y.cols(); ++j)
      for (Eigen::Index i = 0; i < pending_lam_[l - 1].y.rows(); ++i)
        if (P.covered(i, j) && P.covered(i, j + 1))
          pending_lam_[l - 1].y(i, j) = re.y(i, j);
  }
}

void LevelHierarchy::advance(const AmrContext& ctx) {
  const int L = max_levels();
  emb_next_.resize(L + 1);
  pending_pp_.resize(L + 1);
  pending_lam_.resize(L + 1);
  last_iters_ = 0;
  const double t_next = levels_[0].state.t + ctx.model.tau;
  for (int l = 0; l <= L; ++l) emb_next_[l] = embedding_at(ctx, l, t_next);
  for (int l = 0; l <= L; ++l) solve_level(l, ctx);
  average_down();
  for (int l = 0; l <= L; ++l) {
    auto& st = levels_[l].state;
    st.p_prev = std::move(st.p_curr);
    st.p_curr = std::move(pending_pp_[l]);
    st.lam_prev = std::move(st.lam);
    st.lam = std::move(pending_lam_[l]);
    st.t = t_next;
    st.n += 1;
  }
}

namespace {

double masked_energy_physical(const StaggeredGrid& g, const EmbeddingField& emb,
                              double c, double tau, double ax, double ay,
                              const CellField<double>& p_n,
                              const CellField<double>& p_np1, const Mask& valid,
                              const Mask& covered) {
  CellField<double> mask_c = CellField<double>::Zero(g.nx, g.ny);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (valid(i, j) && !covered(i, j) && emb.psi_c(i, j) >= 0.5 &&
          std::abs(g.cell_x(i)) <= ax && std::abs(g.cell_y(j)) <= ay)
        mask_c(i, j) = 1.0;
  EdgeField<double> mask_e = EdgeField<double>::zero(g.nx, g.ny);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx - 1; ++i) {
      const bool inc = valid(i, j) && valid(i + 1, j) &&
                       !(covered(i, j) && covered(i + 1, j));
      if (inc && emb.psi_e.x(i, j) >= 0.5 && std::abs(g.xedge_x(i)) <= ax &&
          std::abs(g.cell_y(j)) <= ay)
        mask_e.x(i, j) = 1.0;
    }
  for (int j = 0; j < g.ny - 1; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const bool inc = valid(i, j) && valid(i, j + 1) &&
                       !(covered(i, j) && covered(i, j + 1));
      if (inc && emb.psi_e.y(i, j) >= 0.5 && std::abs(g.cell_x(i)) <= ax &&
          std::abs(g.yedge_y(j)) <= ay)
        mask_e.y(i, j) = 1.0;
    }
  const CellField<double> rate = (p_np1 - p_n) / tau;
  const EdgeField<double> gmid =
      grad_plus(g, CellField<double>(0.5 * (p_n + p_np1)));
  return 0.5 * norm2_cell(g, rate, mask_c) +
         0.5 * c * c * norm2_edge(g, gmid, mask_e);
}

}  // namespace

double LevelHierarchy::energy_physical_level0(const AmrContext& ctx) const {
  const auto& L = levels_[0];
  const auto emb = embedding_at(ctx, 0, L.state.t);
  const Mask none = Mask::Constant(L.grid.nx, L.grid.ny, false);
  return masked_energy_physical(L.grid, emb, ctx.model.c, ctx.model.tau, ctx.ax,
                                ctx.ay, L.state.p_prev, L.state.p_curr, L.valid,
                                none);
}

double LevelHierarchy::energy_physical_all(const AmrContext& ctx) const {
  double total = 0.0;
  for (int l = 0; l <= max_levels(); ++l) {
    const auto& L = levels_[l];
    const auto emb = embedding_at(ctx, l, L.state.t);
    total += masked_energy_physical(L.grid, emb, ctx.model.c, ctx.model.tau,
                                    ctx.ax, ctx.ay, L.state.p_prev,
                                    L.state.p_curr, L.valid, L.covered);
  }
  return total;
}

bool LevelHierarchy::properly_nested(int buffer) const {
  for (int l = 1; l <= max_levels(); ++l) {
    const Mask grown = dilate(levels_[l].valid, buffer);
    const Mask& parent = levels_[l - 1].valid;
    for (Eigen::Index j = 0; j < grown.cols(); ++j)
      for (Eigen::Index i = 0; i < grown.rows(); ++i)
        if (grown(i, j) && !parent(i / 2, j / 2)) return false;
  }
  return true;
}

}  // namespace wavescat
