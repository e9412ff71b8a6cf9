#pragma once

namespace wavescat {

enum class BoundaryModel { kSoft, kHard };

struct ModelParams {
  double c = 1;        // wave speed
  double tau = 0;      // time step
  double eta_d = 0;    // interfacial trace penalty (soft)
  double eta_n = 0;    // normal-derivative penalty (hard)
  double alpha = 0;    // interior damping on p_t
  double beta = 0;     // interior damping on p
  double psi_hat = 0;  // Heaviside threshold masking the hard-case damping
  BoundaryModel bc = BoundaryModel::kSoft;
};

}  // namespace wavescat
