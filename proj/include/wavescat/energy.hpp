// Discrete energy, dissipation, and remainder functionals, and the per-step
// ledger that evaluates the corresponding balance identities as residuals.
//
// Conventions: the staggered energy at half level n+1/2 is built from levels
// (n, n+1); the dissipation and remainder at step n additionally read level
// n-1. The balance reads  (E^{n+1/2}-E^{n-1/2})/tau + D^n - R^n = 0,  with
// R == 0 for a static embedding. Weighted norms pair cell quantities with
// cell weights and edge quantities with edge-family weights throughout.
#pragma once

#include <optional>
#include <vector>

#include "wavescat/field.hpp"
#include "wavescat/geometry.hpp"
#include "wavescat/grid.hpp"
#include "wavescat/model.hpp"
#include "wavescat/pml.hpp"
#include "wavescat/state.hpp"

namespace wavescat {

// --- Four-field midpoint scheme ------------------------------------------

double energy_fourfield(const StaggeredGrid& g, const PmlCoefficients& k,
                        const FourField& phi);

// Dissipation evaluated at the midpoint value (phi^{n+1}+phi^n)/2.
double dissipation_fourfield(const StaggeredGrid& g, const PmlCoefficients& k,
                             const FourField& mid);

// --- Fixed-geometry leapfrog ----------------------------------------------

double energy_leapfrog_staggered(const StaggeredGrid& g,
                                 const PmlCoefficients& k, double c, double tau,
                                 const CellField<double>& p_n,
                                 const CellField<double>& p_np1,
                                 const EdgeField<double>& lam_n,
                                 const EdgeField<double>& lam_np1);

double dissipation_leapfrog(const StaggeredGrid& g, const PmlCoefficients& k,
                            double c, const CellField<double>& p_nm1,
                            const CellField<double>& p_n,
                            const CellField<double>& p_np1,
                            const EdgeField<double>& lam_nm1,
                            const EdgeField<double>& lam_n,
                            const EdgeField<double>& lam_np1);

// --- Embedded scheme -------------------------------------------------------

double energy_embedded(const StaggeredGrid& g, const PmlCoefficients& k,
                       const ModelParams& m, const EmbeddingField& emb_np1,
                       const CellField<double>& p_n,
                       const CellField<double>& p_np1,
                       const EdgeField<double>& lam_n,
                       const EdgeField<double>& lam_np1);

double dissipation_embedded(const StaggeredGrid& g, const PmlCoefficients& k,
                            const ModelParams& m, const EmbeddingField& emb_np1,
                            const CellField<double>& p_nm1,
                            const CellField<double>& p_n,
                            const CellField<double>& p_np1,
                            const EdgeField<double>& lam_nm1,
                            const EdgeField<double>& lam_n,
                            const EdgeField<double>& lam_np1);

// Remainder generated by the moving profile; reads the step n-1 history and
// the embedding at t^n and t^{n+1}. Identically zero when emb_n == emb_np1.
double remainder_embedded(const StaggeredGrid& g, const PmlCoefficients& k,
                          const ModelParams& m, const EmbeddingField& emb_n,
                          const EmbeddingField& emb_np1,
                          const CellField<double>& p_nm1,
                          const CellField<double>& p_n,
                          const EdgeField<double>& lam_nm1,
                          const EdgeField<double>& lam_n);

// --- Physical energy -------------------------------------------------------

// Kinetic plus gradient energy of the pressure over the region where
// psi >= 1/2 intersected with the physical box |x|<=ax, |y|<=ay.
double energy_physical(const StaggeredGrid& g, const EmbeddingField& emb,
                       double c, double tau, double ax, double ay,
                       const CellField<double>& p_n,
                       const CellField<double>& p_np1);

// --- Ledger ----------------------------------------------------------------

struct LedgerRow {
  long n = 0;
  double t = 0;
  double energy = 0;      // E^{n+1/2}
  double dissipation = 0; // D^n
  double remainder = 0;   // R^n
  double residual = 0;    // relative balance residual
  double e_phys_level0 = 0;
  double e_phys_all = 0;
  int solver_iters = 0;
};

// Relative residual of  dE + tau*(D - R) = 0  with dE = E_new - E_prev.
double energy_identity_residual(double e_prev, double e_new, double tau,
                                double dissipation, double remainder);

enum class TrackerMode { kFixed, kEmbedded };

// Streams ledger rows for a two-field run. prime() must see the state at
// n = 1 before the first update().
class EnergyTracker {
 public:
  EnergyTracker(const StaggeredGrid& g, const PmlCoefficients& k,
                const ModelParams& m, double ax, double ay, TrackerMode mode)
      : g_(&g), k_(&k), m_(m), ax_(ax), ay_(ay), mode_(mode) {}

  void prime(const WaveState& st, const EmbeddingField& emb_n);

  // Called after advancing from `before` (levels n-1, n) to `after`
  // (levels n, n+1); emb_n / emb_np1 sampled at t^n and t^{n+1}.
  LedgerRow update(const WaveState& before, const WaveState& after,
                   const EmbeddingField& emb_n, const EmbeddingField& emb_np1,
                   int solver_iters);

  const std::vector<LedgerRow>& rows() const { return rows_; }
  double prev_energy() const { return e_prev_; }
  void set_prev_energy(double e) { e_prev_ = e; }

 private:
  const StaggeredGrid* g_;
  const PmlCoefficients* k_;
  ModelParams m_;
  double ax_, ay_;
  TrackerMode mode_;
  double e_prev_ = 0;
  std::vector<LedgerRow> rows_;
};

}  // namespace wavescat
