#include "wavescat/energy.hpp"

#include <algorithm>
#include <cmath>

#include "wavescat/stencil_ops.hpp"

namespace wavescat {

namespace {

EdgeField<double> edge_mid(const EdgeField<double>& a, const EdgeField<double>& b) {
  EdgeField<double> m;
  m.x = 0.5 * (a.x + b.x);
  m.y = 0.5 * (a.y + b.y);
  return m;
}

EdgeField<double> edge_avg3(const EdgeField<double>& a, const EdgeField<double>& b,
                            const EdgeField<double>& c) {
  EdgeField<double> m;
  m.x = 0.25 * (a.x + 2.0 * b.x + c.x);
  m.y = 0.25 * (a.y + 2.0 * b.y + c.y);
  return m;
}

EdgeField<double> chi_of(const StaggeredGrid& g, double c,
                         const CellField<double>& p, const EdgeField<double>& lam) {
  EdgeField<double> chi = grad_plus(g, p);
  chi.x = c * chi.x + lam.x;
  chi.y = c * chi.y + lam.y;
  return chi;
}

}  // namespace

double energy_fourfield(const StaggeredGrid& g, const PmlCoefficients& k,
                        const FourField& phi) {
  EdgeField<double> ones(g.nx, g.ny);
  ones.x.setOnes();
  ones.y.setOnes();
  return 0.5 * (norm2_cell(g, phi.q) + norm2_edge(g, phi.chi, ones) +
                norm2_cell(g, phi.p, k.b_c) +
                norm2_edge(g, phi.lam, k.ainv_gamma1_e));
}

double dissipation_fourfield(const StaggeredGrid& g, const PmlCoefficients& k,
                             const FourField& mid) {
  EdgeField<double> diff = mid.chi;
  diff -= mid.lam;
  return norm2_cell(g, mid.p, k.ab_c) +
         norm2_edge(g, mid.chi, k.diss_weight_e) +
         norm2_edge(g, diff, k.ainv_b_e);
}

double energy_leapfrog_staggered(const StaggeredGrid& g,
                                 const PmlCoefficients& k, double c, double tau,
                                 const CellField<double>& p_n,
                                 const CellField<double>& p_np1,
                                 const EdgeField<double>& lam_n,
                                 const EdgeField<double>& lam_np1) {
  const CellField<double> p_mid = 0.5 * (p_n + p_np1);
  const CellField<double> q_half = (p_np1 - p_n) / tau + k.a_c * p_mid;
  const EdgeField<double> lam_mid = edge_mid(lam_n, lam_np1);
  const EdgeField<double> chi_mid = chi_of(g, c, p_mid, lam_mid);
  EdgeField<double> ones(g.nx, g.ny);
  ones.x.setOnes();
  ones.y.setOnes();
  return 0.5 * (norm2_cell(g, q_half) + norm2_edge(g, chi_mid, ones) +
                norm2_cell(g, p_mid, k.b_c) +
                norm2_edge(g, lam_mid, k.ainv_gamma1_e));
}

double dissipation_leapfrog(const StaggeredGrid& g, const PmlCoefficients& k,
                            double c, const CellField<double>& p_nm1,
                            const CellField<double>& p_n,
                            const CellField<double>& p_np1,
                            const EdgeField<double>& lam_nm1,
                            const EdgeField<double>& lam_n,
                            const EdgeField<double>& lam_np1) {
  const CellField<double> p_avg = 0.25 * (p_np1 + 2.0 * p_n + p_nm1);
  const EdgeField<double> lam_avg = edge_avg3(lam_nm1, lam_n, lam_np1);
  const EdgeField<double> gp_avg = grad_plus(g, p_avg);
  EdgeField<double> chi_avg;
  chi_avg.x = c * gp_avg.x + lam_avg.x;
  chi_avg.y = c * gp_avg.y + lam_avg.y;
  EdgeField<double> cgp;
  cgp.x = c * gp_avg.x;
  cgp.y = c * gp_avg.y;
  return norm2_cell(g, p_avg, k.ab_c) + norm2_edge(g, chi_avg, k.diss_weight_e) +
         norm2_edge(g, cgp, k.ainv_b_e);
}

double energy_embedded(const StaggeredGrid& g, const PmlCoefficients& k,
                       const ModelParams& m, const EmbeddingField& emb_np1,
                       const CellField<double>& p_n,
                       const CellField<double>& p_np1,
                       const EdgeField<double>& lam_n,
                       const EdgeField<double>& lam_np1) {
  const CellField<double> p_mid = 0.5 * (p_n + p_np1);
  const CellField<double> q_half = (p_np1 - p_n) / m.tau + k.a_c * p_mid;
  const EdgeField<double> lam_mid = edge_mid(lam_n, lam_np1);
  const EdgeField<double> chi_mid = chi_of(g, m.c, p_mid, lam_mid);
  const CellField<double> theta = k.b_c * emb_np1.psi_c + emb_np1.w_c / m.eta_d;
  const CellField<double> avg_p2 = 0.5 * (p_n * p_n + p_np1 * p_np1);
  const CellField<double> beta_w = m.beta * (1.0 - emb_np1.psi_c);
  return 0.5 * (norm2_cell(g, q_half, emb_np1.psi_c) +
                norm2_edge(g, chi_mid, emb_np1.psi_e) +
                norm2_edge(g, lam_mid, k.ainv_gamma1_e) +
                norm2_cell(g, p_mid, theta) +
                inner_cell(g, beta_w, avg_p2));
}

double dissipation_embedded(const StaggeredGrid& g, const PmlCoefficients& k,
                            const ModelParams& m, const EmbeddingField& emb_np1,
                            const CellField<double>& p_nm1,
                            const CellField<double>& p_n,
                            const CellField<double>& p_np1,
                            const EdgeField<double>& lam_nm1,
                            const EdgeField<double>& lam_n,
                            const EdgeField<double>& lam_np1) {
  const CellField<double> p_avg = 0.25 * (p_np1 + 2.0 * p_n + p_nm1);
  const CellField<double> p_rate = (p_np1 - p_nm1) / (2.0 * m.tau);
  const EdgeField<double> lam_avg = edge_avg3(lam_nm1, lam_n, lam_np1);
  const EdgeField<double> gp_avg = grad_plus(g, p_avg);
  EdgeField<double> chi_avg;
  chi_avg.x = m.c * gp_avg.x + lam_avg.x;
  chi_avg.y = m.c * gp_avg.y + lam_avg.y;
  EdgeField<double> cgp;
  cgp.x = m.c * gp_avg.x;
  cgp.y = m.c * gp_avg.y;
  const CellField<double> damp_w =
      (m.alpha + m.tau * m.beta) * (1.0 - emb_np1.psi_c);
  return norm2_cell(g, p_avg, k.ab_c) + norm2_cell(g, p_rate, damp_w) +
         norm2_edge(g, chi_avg, k.diss_weight_e) + norm2_edge(g, cgp, k.ainv_b_e);
}

double remainder_embedded(const StaggeredGrid& g, const PmlCoefficients& k,
                          const ModelParams& m, const EmbeddingField& emb_n,
                          const EmbeddingField& emb_np1,
                          const CellField<double>& p_nm1,
                          const CellField<double>& p_n,
                          const EdgeField<double>& lam_nm1,
                          const EdgeField<double>& lam_n) {
  const CellField<double> dpsi_c = (emb_np1.psi_c - emb_n.psi_c) / m.tau;
  EdgeField<double> dpsi_e;
  dpsi_e.x = (emb_np1.psi_e.x - emb_n.psi_e.x) / m.tau;
  dpsi_e.y = (emb_np1.psi_e.y - emb_n.psi_e.y) / m.tau;
  const CellField<double> dw_c = (emb_np1.w_c - emb_n.w_c) / m.tau;
  const CellField<double> theta_rate = k.b_c * dpsi_c + dw_c / m.eta_d;

  // Step n-1 history quantities.
  const CellField<double> p_mid = 0.5 * (p_nm1 + p_n);
  const CellField<double> q_prev = (p_n - p_nm1) / m.tau + k.a_c * p_mid;
  const EdgeField<double> lam_mid = edge_mid(lam_nm1, lam_n);
  const EdgeField<double> chi_mid = chi_of(g, m.c, p_mid, lam_mid);
  const CellField<double> avg_p2 = 0.5 * (p_nm1 * p_nm1 + p_n * p_n);

  EdgeField<double> weight_lam;  // dpsi .* gamma1/a per family
  weight_lam.x = dpsi_e.x * k.ainv_gamma1_e.x;
  weight_lam.y = dpsi_e.y * k.ainv_gamma1_e.y;

  return 0.5 * (norm2_cell(g, q_prev, dpsi_c) +
                norm2_edge(g, chi_mid, dpsi_e) +
                norm2_edge(g, lam_mid, weight_lam) +
                norm2_cell(g, p_mid, theta_rate) +
                inner_cell(g, CellField<double>(m.beta * dpsi_c), avg_p2));
}

double energy_physical(const StaggeredGrid& g, const EmbeddingField& emb,
                       double c, double tau, double ax, double ay,
                       const CellField<double>& p_n,
                       const CellField<double>& p_np1) {
  CellField<double> mask_c(g.nx, g.ny);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      mask_c(i, j) = (emb.psi_c(i, j) >= 0.5 && std::abs(g.cell_x(i)) <= ax &&
                      std::abs(g.cell_y(j)) <= ay)
                         ? 1.0
                         : 0.0;
  EdgeField<double> mask_e(g.nx, g.ny);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx - 1; ++i)
      mask_e.x(i, j) = (emb.psi_e.x(i, j) >= 0.5 &&
                        std::abs(g.xedge_x(i)) <= ax && std::abs(g.cell_y(j)) <= ay)
                           ? 1.0
                           : 0.0;
  for (int j = 0; j < g.ny - 1; ++j)
    for (int i = 0; i < g.nx; ++i)
      mask_e.y(i, j) = (emb.psi_e.y(i, j) >= 0.5 &&
                        std::abs(g.cell_x(i)) <= ax && std::abs(g.yedge_y(j)) <= ay)
                           ? 1.0
                           : 0.0;

  const CellField<double> rate = (p_np1 - p_n) / tau;
  const EdgeField<double> gmid = grad_plus(g, CellField<double>(0.5 * (p_n + p_np1)));
  return 0.5 * norm2_cell(g, rate, mask_c) +
         0.5 * c * c * norm2_edge(g, gmid, mask_e);
}

double energy_identity_residual(double e_prev, double e_new, double tau,
                                double dissipation, double remainder) {
  const double abs_res =
      std::abs(e_new - e_prev + tau * (dissipation - remainder));
  const double scale =
      std::max({e_new, e_prev, tau * std::abs(dissipation),
                tau * std::abs(remainder)});
  return scale > 0.0 ? abs_res / scale : abs_res;
}

void EnergyTracker::prime(const WaveState& st, const EmbeddingField& emb_n) {
  if (mode_ == TrackerMode::kEmbedded) {
    e_prev_ = energy_embedded(*g_, *k_, m_, emb_n, st.p_prev, st.p_curr,
                              st.lam_prev, st.lam);
  } else {
    e_prev_ = energy_leapfrog_staggered(*g_, *k_, m_.c, m_.tau, st.p_prev,
                                        st.p_curr, st.lam_prev, st.lam);
  }
}

LedgerRow EnergyTracker::update(const WaveState& before, const WaveState& after,
                                const EmbeddingField& emb_n,
                                const EmbeddingField& emb_np1,
                                int solver_iters) {
  LedgerRow row;
  row.n = after.n;
  row.t = after.t;
  if (mode_ == TrackerMode::kEmbedded) {
    row.energy = energy_embedded(*g_, *k_, m_, emb_np1, after.p_prev,
                                 after.p_curr, after.lam_prev, after.lam);
    row.dissipation = dissipation_embedded(
        *g_, *k_, m_, emb_np1, before.p_prev, before.p_curr, after.p_curr,
        before.lam_prev, before.lam, after.lam);
    row.remainder =
        remainder_embedded(*g_, *k_, m_, emb_n, emb_np1, before.p_prev,
                           before.p_curr, before.lam_prev, before.lam);
  } else {
    row.energy = energy_leapfrog_staggered(*g_, *k_, m_.c, m_.tau, after.p_prev,
                                           after.p_curr, after.lam_prev,
                                           after.lam);
    row.dissipation = dissipation_leapfrog(
        *g_, *k_, m_.c, before.p_prev, before.p_curr, after.p_curr,
        before.lam_prev, before.lam, after.lam);
    row.remainder = 0.0;
  }
  row.residual = energy_identity_residual(e_prev_, row.energy, m_.tau,
                                          row.dissipation, row.remainder);
  row.e_phys_level0 = energy_physical(*g_, emb_np1, m_.c, m_.tau, ax_, ay_,
                                      after.p_prev, after.p_curr);
  row.e_phys_all = row.e_phys_level0;
  row.solver_iters = solver_iters;
  e_prev_ = row.energy;
  rows_.push_back(row);
  return row;
}

}  // namespace wavescat
