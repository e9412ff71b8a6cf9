// Time steppers.
//
// All two-field schemes share the same auxiliary update
//   (lam^{n+1}-lam^n)/tau + G1 (lam^{n+1}+lam^n)/2 = c G2 grad+ (p^n+p^{n+1})/2,
// which is a scalar trapezoidal relation per edge. It is eliminated in
// closed form, so each step costs one Krylov solve acting on the pressure
// alone; after the solve lambda is reconstructed from the same relation and
// therefore satisfies its equation to roundoff.
//
// The pressure operator of the soft scheme folds the three-level averages
// into   A(p) = md.*p - div( w_A .* grad+ p ),
// where md collects mass, damping, trace-penalty and interior-damping
// diagonals and w_A = psi_e.*(c^2 tau^2/4 + (c tau^2/4) t_lam) absorbs the
// weighted Laplacian and the lambda substitution. w_A can be sign-indefinite
// inside the layer, so the solver falls back to BiCGStab on CG breakdown.
#pragma once

#include <optional>

#include "wavescat/field.hpp"
#include "wavescat/geometry.hpp"
#include "wavescat/grid.hpp"
#include "wavescat/linear_solver.hpp"
#include "wavescat/model.hpp"
#include "wavescat/pml.hpp"
#include "wavescat/state.hpp"

namespace wavescat {

struct StepperOptions {
  double tol = 1e-12;
  int max_iter = 0;  // 0: solver default
};

// Per-edge factors of the closed-form trapezoidal update
// lam^{n+1} = s .* lam^n + t .* (grad+ p^n + grad+ p^{n+1}).
struct LambdaFactors {
  EdgeField<double> s, t;
};

LambdaFactors lambda_factors(const PmlCoefficients& k, double c, double tau);

struct StepResult {
  WaveState state;
  SolveReport report;
};

// Assembled pieces of one implicit two-field step: the operator is
// A(p) = md.*p - div(w_lap.*grad+ p) - (tau^2/4) pen_c.*avg(gpsi.*grad+ p),
// the right-hand side collects all explicit levels. Shared between the
// single-grid steppers and the per-level patch solves of the hierarchy.
struct TwoFieldParts {
  CellField<double> md;
  EdgeField<double> w_lap;
  CellField<double> rhs;
  bool has_penalty = false;
  CellField<double> pen_c;
  EdgeField<double> gpsi;
};

TwoFieldParts assemble_fixed_parts(const WaveState& state,
                                   const StaggeredGrid& g,
                                   const PmlCoefficients& k, double c,
                                   double tau, const LambdaFactors& lf,
                                   const CellField<double>* f_avg);

TwoFieldParts assemble_soft_parts(const WaveState& state, const StaggeredGrid& g,
                                  const PmlCoefficients& k, const ModelParams& m,
                                  const EmbeddingField& emb_next,
                                  const LambdaFactors& lf,
                                  const CellField<double>* f_avg);

TwoFieldParts assemble_hard_parts(const WaveState& state, const StaggeredGrid& g,
                                  const PmlCoefficients& k, const ModelParams& m,
                                  const EmbeddingField& emb_next,
                                  const LambdaFactors& lf,
                                  const CellField<double>* f_avg);

CellField<double> apply_two_field(const StaggeredGrid& g,
                                  const TwoFieldParts& parts, double tau,
                                  const CellField<double>& p);

// Closed-form trapezoidal auxiliary update given p^n + p^{n+1}.
EdgeField<double> advance_lambda(const LambdaFactors& lf,
                                 const EdgeField<double>& lam,
                                 const EdgeField<double>& grad_p_sum);

// Midpoint four-field step solved monolithically (BiCGStab on the coupled
// (p,q,chi,lambda) vector). f_mid, when present, is added to the q-equation.
FourFieldState cn_step_fourfield(const FourFieldState& state,
                                 const StaggeredGrid& g,
                                 const PmlCoefficients& k, double c, double tau,
                                 const CellField<double>* f_mid,
                                 const StepperOptions& opts,
                                 SolveReport* report = nullptr);

// Generator G of the first-order system, used by the CN step and by tests.
FourField fourfield_generator(const FourField& phi, const StaggeredGrid& g,
                              const PmlCoefficients& k, double c);

// Fixed-geometry two-field leapfrog. f_avg, when present, is the three-level
// average (f^{n+1} + 2 f^n + f^{n-1})/4.
StepResult leapfrog_step_fixed(const WaveState& state, const StaggeredGrid& g,
                               const PmlCoefficients& k, double c, double tau,
                               const CellField<double>* f_avg,
                               const StepperOptions& opts);

// Embedded sound-soft step; emb_next is the embedding sampled at t^{n+1}.
StepResult pml_de_step_soft(const WaveState& state, const StaggeredGrid& g,
                            const PmlCoefficients& k, const ModelParams& m,
                            const EmbeddingField& emb_next,
                            const CellField<double>* f_avg,
                            const StepperOptions& opts);

// Embedded sound-hard step (zero normal acceleration only).
StepResult pml_de_step_hard(const WaveState& state, const StaggeredGrid& g,
                            const PmlCoefficients& k, const ModelParams& m,
                            const EmbeddingField& emb_next,
                            const RigidMotion& motion,
                            const CellField<double>* f_avg,
                            const StepperOptions& opts);

// Taylor start: builds (p^0, p^1, lam^0=0, lam^1) from initial pressure and
// velocity, second-order consistent with the three-level schemes.
WaveState bootstrap_first_step(const CellField<double>& p0,
                               const CellField<double>& v0,
                               const StaggeredGrid& g, const PmlCoefficients& k,
                               const EmbeddingField& emb, double c, double tau,
                               const CellField<double>* f0);

// Recovers the eliminated four-field variables from two consecutive
// two-field levels.
struct Reconstruction {
  CellField<double> q_n, q_np1;
  EdgeField<double> chi_n, chi_np1;
};

Reconstruction reconstruct_q_chi(const StaggeredGrid& g,
                                 const PmlCoefficients& k, double c, double tau,
                                 const CellField<double>& p_n,
                                 const CellField<double>& p_np1,
                                 const EdgeField<double>& lam_n,
                                 const EdgeField<double>& lam_np1);

// Cellwise average of the edge dot product a_e .* b_e (both families);
// boundary edges contribute zero.
CellField<double> cell_average_edge_product(const StaggeredGrid& g,
                                            const EdgeField<double>& a,
                                            const EdgeField<double>& b);

}  // namespace wavescat
