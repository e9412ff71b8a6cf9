#include "wavescat/integrators.hpp"

#include <cmath>
#include <string>

#include "wavescat/errors.hpp"
#include "wavescat/stencil_ops.hpp"

namespace wavescat {

namespace {

void check_converged(const SolveReport& rep, const char* where) {
  if (rep.status != SolveStatus::kConverged) {
    throw SolverDivergence(std::string(where) +
                           ": implicit solve failed (residual " +
                           std::to_string(rep.final_residual) + " after " +
                           std::to_string(rep.iterations) + " iterations)");
  }
}

EdgeField<double> ones_edges(const StaggeredGrid& g) {
  EdgeField<double> e(g.nx, g.ny);
  e.x.setOnes();
  e.y.setOnes();
  return e;
}

}  // namespace

LambdaFactors lambda_factors(const PmlCoefficients& k, double c, double tau) {
  LambdaFactors f;
  auto fill = [&](const CellField<double>& g1, const CellField<double>& g2,
                  CellField<double>& s, CellField<double>& t) {
    CellField<double> den = 1.0 + 0.5 * tau * g1;
    s = (1.0 - 0.5 * tau * g1) / den;
    t = 0.5 * c * tau * g2 / den;
  };
  fill(k.gamma1_e.x, k.gamma2_e.x, f.s.x, f.t.x);
  fill(k.gamma1_e.y, k.gamma2_e.y, f.s.y, f.t.y);
  return f;
}

FourField fourfield_generator(const FourField& phi, const StaggeredGrid& g,
                              const PmlCoefficients& k, double c) {
  FourField out;
  out.p = phi.q - k.a_c * phi.p;
  out.q = -(k.b_c * phi.p) + c * div_minus(g, phi.chi);
  const EdgeField<double> gq = grad_plus(g, phi.q);
  out.chi.x = c * gq.x - 2.0 * k.gamma1_e.x * phi.chi.x + k.gamma1_e.x * phi.lam.x;
  out.chi.y = c * gq.y - 2.0 * k.gamma1_e.y * phi.chi.y + k.gamma1_e.y * phi.lam.y;
  out.lam.x = k.gamma2_e.x * phi.chi.x - k.gamma1t_e.x * phi.lam.x;
  out.lam.y = k.gamma2_e.y * phi.chi.y - k.gamma1t_e.y * phi.lam.y;
  return out;
}

FourFieldState cn_step_fourfield(const FourFieldState& state,
                                 const StaggeredGrid& g,
                                 const PmlCoefficients& k, double c, double tau,
                                 const CellField<double>* f_mid,
                                 const StepperOptions& opts,
                                 SolveReport* report) {
  auto apply = [&](const FourField& phi) {
    FourField gphi = fourfield_generator(phi, g, k, c);
    gphi *= -0.5 * tau;
    gphi += phi;
    return gphi;  // (I - tau/2 G) phi
  };
  FourField rhs = fourfield_generator(state.phi, g, k, c);
  rhs *= 0.5 * tau;
  rhs += state.phi;
  if (f_mid) rhs.q += tau * (*f_mid);

  FourField next = state.phi;  // warm start
  const int max_iter =
      opts.max_iter > 0 ? opts.max_iter : default_max_iter(4 * state.phi.p.size());
  SolveReport rep = bicgstab(apply, rhs, next, opts.tol, max_iter);
  check_converged(rep, "cn_step_fourfield");
  if (report) *report = rep;
  return FourFieldState{std::move(next), state.t + tau, state.n + 1};
}

CellField<double> apply_two_field(const StaggeredGrid& g,
                                  const TwoFieldParts& parts, double tau,
                                  const CellField<double>& p) {
  CellField<double> out = parts.md * p - laplace_weighted(g, parts.w_lap, p);
  if (parts.has_penalty) {
    out -= (tau * tau / 4.0) * parts.pen_c *
           cell_average_edge_product(g, parts.gpsi, grad_plus(g, p));
  }
  return out;
}

EdgeField<double> advance_lambda(const LambdaFactors& lf,
                                 const EdgeField<double>& lam,
                                 const EdgeField<double>& grad_p_sum) {
  EdgeField<double> next;
  next.x = lf.s.x * lam.x + lf.t.x * grad_p_sum.x;
  next.y = lf.s.y * lam.y + lf.t.y * grad_p_sum.y;
  return next;
}

namespace {

StepResult advance_two_field(const WaveState& state, const StaggeredGrid& g,
                             double tau, const LambdaFactors& lf,
                             TwoFieldParts parts, const StepperOptions& opts) {
  auto apply = [&](const CellField<double>& p) {
    return apply_two_field(g, parts, tau, p);
  };
  SolveOptions sopts;
  sopts.tol = opts.tol;
  sopts.max_iter = opts.max_iter;
  sopts.symmetric = !parts.has_penalty;
  CellField<double> guess = state.p_curr;
  auto [pp, rep] = solve_cells(apply, parts.rhs, guess, sopts);
  check_converged(rep, "two-field step");

  const EdgeField<double> gsum = grad_plus(g, CellField<double>(state.p_curr + pp));

  WaveState next;
  next.p_prev = state.p_curr;
  next.p_curr = std::move(pp);
  next.lam_prev = state.lam;
  next.lam = advance_lambda(lf, state.lam, gsum);
  next.t = state.t + tau;
  next.n = state.n + 1;
  return {std::move(next), rep};
}

// Common explicit part of the right-hand side: the PML/lambda contribution
// c tau^2/4 * div(psi_e .* [(2+s) lam^n + lam^{n-1} + t grad+ p^n])
// plus c^2 tau^2/4 * L^psi(2 p^n + p^{n-1}).
CellField<double> lambda_and_wave_rhs(const WaveState& st,
                                      const StaggeredGrid& g, double c,
                                      double tau, const LambdaFactors& lf,
                                      const EdgeField<double>& psi_e,
                                      const CellField<double>& p_hist) {
  const EdgeField<double> gp0 = grad_plus(g, st.p_curr);
  EdgeField<double> bundle;
  bundle.x = (2.0 + lf.s.x) * st.lam.x + st.lam_prev.x + lf.t.x * gp0.x;
  bundle.y = (2.0 + lf.s.y) * st.lam.y + st.lam_prev.y + lf.t.y * gp0.y;
  CellField<double> rhs =
      (c * tau * tau / 4.0) * div_minus_weighted(g, psi_e, bundle);
  rhs += (c * c * tau * tau / 4.0) * laplace_weighted(g, psi_e, p_hist);
  return rhs;
}

EdgeField<double> folded_lap_weight(const EdgeField<double>& psi_e,
                                    const LambdaFactors& lf, double c,
                                    double tau) {
  const double cl = c * c * tau * tau / 4.0;
  const double cc = c * tau * tau / 4.0;
  EdgeField<double> w;
  w.x = psi_e.x * (cl + cc * lf.t.x);
  w.y = psi_e.y * (cl + cc * lf.t.y);
  return w;
}

}  // namespace

TwoFieldParts assemble_fixed_parts(const WaveState& state,
                                   const StaggeredGrid& g,
                                   const PmlCoefficients& k, double c,
                                   double tau, const LambdaFactors& lf,
                                   const CellField<double>* f_avg) {
  const EdgeField<double> psi1 = ones_edges(g);
  const CellField<double> p_hist = 2.0 * state.p_curr + state.p_prev;
  TwoFieldParts parts;
  parts.md = 1.0 + 0.5 * tau * k.a_c + 0.25 * tau * tau * k.b_c;
  parts.w_lap = folded_lap_weight(psi1, lf, c, tau);
  parts.rhs = 2.0 * state.p_curr - state.p_prev + 0.5 * tau * k.a_c * state.p_prev -
              0.25 * tau * tau * k.b_c * p_hist +
              lambda_and_wave_rhs(state, g, c, tau, lf, psi1, p_hist);
  if (f_avg) parts.rhs += tau * tau * (*f_avg);
  return parts;
}

TwoFieldParts assemble_soft_parts(const WaveState& state, const StaggeredGrid& g,
                                  const PmlCoefficients& k, const ModelParams& m,
                                  const EmbeddingField& emb_next,
                                  const LambdaFactors& lf,
                                  const CellField<double>* f_avg) {
  const double c = m.c, tau = m.tau;
  const CellField<double>& psi = emb_next.psi_c;
  const CellField<double> theta = k.b_c * psi + emb_next.w_c / m.eta_d;
  const CellField<double> one_minus = 1.0 - psi;
  const CellField<double> p_hist = 2.0 * state.p_curr + state.p_prev;

  TwoFieldParts parts;
  parts.md = psi * (1.0 + 0.5 * tau * k.a_c) + 0.25 * tau * tau * theta +
             one_minus * (0.5 * tau * m.alpha + tau * tau * m.beta);
  parts.w_lap = folded_lap_weight(emb_next.psi_e, lf, c, tau);
  parts.rhs = psi * (2.0 * state.p_curr - state.p_prev) +
              0.5 * tau * k.a_c * psi * state.p_prev -
              0.25 * tau * tau * theta * p_hist +
              0.5 * tau * m.alpha * one_minus * state.p_prev +
              lambda_and_wave_rhs(state, g, c, tau, lf, emb_next.psi_e, p_hist);
  if (f_avg) parts.rhs += tau * tau * psi * (*f_avg);
  return parts;
}

TwoFieldParts assemble_hard_parts(const WaveState& state, const StaggeredGrid& g,
                                  const PmlCoefficients& k, const ModelParams& m,
                                  const EmbeddingField& emb_next,
                                  const LambdaFactors& lf,
                                  const CellField<double>* f_avg) {
  const double c = m.c, tau = m.tau;
  const CellField<double>& psi = emb_next.psi_c;
  const CellField<double> hmask =
      (psi < m.psi_hat).select(CellField<double>::Ones(g.nx, g.ny),
                               CellField<double>::Zero(g.nx, g.ny));
  const CellField<double> p_hist = 2.0 * state.p_curr + state.p_prev;

  TwoFieldParts parts;
  parts.md = psi * (1.0 + 0.5 * tau * k.a_c) + 0.25 * tau * tau * k.b_c * psi +
             hmask * (0.5 * tau * m.alpha + tau * tau * m.beta);
  parts.w_lap = folded_lap_weight(emb_next.psi_e, lf, c, tau);
  parts.has_penalty = true;
  parts.pen_c = (1.0 - psi) / m.eta_n;
  parts.gpsi = grad_plus(g, psi);
  parts.rhs = psi * (2.0 * state.p_curr - state.p_prev) +
              0.5 * tau * k.a_c * psi * state.p_prev -
              0.25 * tau * tau * k.b_c * psi * p_hist +
              0.25 * tau * tau * parts.pen_c *
                  cell_average_edge_product(g, parts.gpsi, grad_plus(g, p_hist)) +
              0.5 * tau * m.alpha * hmask * state.p_prev +
              lambda_and_wave_rhs(state, g, c, tau, lf, emb_next.psi_e, p_hist);
  if (f_avg) parts.rhs += tau * tau * psi * (*f_avg);
  return parts;
}

StepResult leapfrog_step_fixed(const WaveState& state, const StaggeredGrid& g,
                               const PmlCoefficients& k, double c, double tau,
                               const CellField<double>* f_avg,
                               const StepperOptions& opts) {
  const LambdaFactors lf = lambda_factors(k, c, tau);
  return advance_two_field(state, g, tau, lf,
                           assemble_fixed_parts(state, g, k, c, tau, lf, f_avg),
                           opts);
}

StepResult pml_de_step_soft(const WaveState& state, const StaggeredGrid& g,
                            const PmlCoefficients& k, const ModelParams& m,
                            const EmbeddingField& emb_next,
                            const CellField<double>* f_avg,
                            const StepperOptions& opts) {
  const LambdaFactors lf = lambda_factors(k, m.c, m.tau);
  return advance_two_field(
      state, g, m.tau, lf,
      assemble_soft_parts(state, g, k, m, emb_next, lf, f_avg), opts);
}

StepResult pml_de_step_hard(const WaveState& state, const StaggeredGrid& g,
                            const PmlCoefficients& k, const ModelParams& m,
                            const EmbeddingField& emb_next,
                            const RigidMotion& motion,
                            const CellField<double>* f_avg,
                            const StepperOptions& opts) {
  if (motion.acceleration.x != 0.0 || motion.acceleration.y != 0.0) {
    throw UnsupportedMotion(
        "pml_de_step_hard: nonzero normal acceleration is not supported; "
        "use uniform translation");
  }
  const LambdaFactors lf = lambda_factors(k, m.c, m.tau);
  return advance_two_field(
      state, g, m.tau, lf,
      assemble_hard_parts(state, g, k, m, emb_next, lf, f_avg), opts);
}

WaveState bootstrap_first_step(const CellField<double>& p0,
                               const CellField<double>& v0,
                               const StaggeredGrid& g, const PmlCoefficients& k,
                               const EmbeddingField& emb, double c, double tau,
                               const CellField<double>* f0) {
  const EdgeField<double> ones = ones_edges(g);
  CellField<double> accel =
      c * c * div_minus_weighted(g, ones, grad_plus(g, p0)) - k.a_c * v0 -
      k.b_c * p0;
  if (f0) accel += *f0;
  CellField<double> p1 = p0 + tau * v0 + 0.5 * tau * tau * emb.psi_c * accel;

  const LambdaFactors lf = lambda_factors(k, c, tau);
  const EdgeField<double> gsum = grad_plus(g, CellField<double>(p0 + p1));
  WaveState st;
  st.p_prev = p0;
  st.p_curr = std::move(p1);
  st.lam_prev = EdgeField<double>::zero(g.nx, g.ny);
  st.lam.x = lf.t.x * gsum.x;
  st.lam.y = lf.t.y * gsum.y;
  st.t = tau;
  st.n = 1;
  return st;
}

Reconstruction reconstruct_q_chi(const StaggeredGrid& g,
                                 const PmlCoefficients& k, double c, double tau,
                                 const CellField<double>& p_n,
                                 const CellField<double>& p_np1,
                                 const EdgeField<double>& lam_n,
                                 const EdgeField<double>& lam_np1) {
  const CellField<double> p_mid = 0.5 * (p_n + p_np1);
  const CellField<double> q_mid = (p_np1 - p_n) / tau + k.a_c * p_mid;

  EdgeField<double> lam_mid;
  lam_mid.x = 0.5 * (lam_n.x + lam_np1.x);
  lam_mid.y = 0.5 * (lam_n.y + lam_np1.y);
  const EdgeField<double> ones = ones_edges(g);
  const CellField<double> flux =
      -(k.b_c * p_mid) +
      c * c * div_minus_weighted(g, ones, grad_plus(g, p_mid)) +
      c * div_minus_weighted(g, ones, lam_mid);

  Reconstruction r;
  r.q_n = q_mid - 0.5 * tau * flux;
  r.q_np1 = q_mid + 0.5 * tau * flux;
  const EdgeField<double> gp_n = grad_plus(g, p_n);
  const EdgeField<double> gp_np1 = grad_plus(g, p_np1);
  r.chi_n.x = c * gp_n.x + lam_n.x;
  r.chi_n.y = c * gp_n.y + lam_n.y;
  r.chi_np1.x = c * gp_np1.x + lam_np1.x;
  r.chi_np1.y = c * gp_np1.y + lam_np1.y;
  return r;
}

CellField<double> cell_average_edge_product(const StaggeredGrid& g,
                                            const EdgeField<double>& a,
                                            const EdgeField<double>& b) {
  const Eigen::Index nx = g.nx, ny = g.ny;
  CellField<double> px = a.x * b.x;
  CellField<double> py = a.y * b.y;
  CellField<double> out = CellField<double>::Zero(nx, ny);
  out.block(0, 0, nx - 1, ny) += 0.5 * px;
  out.block(1, 0, nx - 1, ny) += 0.5 * px;
  out.block(0, 0, nx, ny - 1) += 0.5 * py;
  out.block(0, 1, nx, ny - 1) += 0.5 * py;
  return out;
}

}  // namespace wavescat
