#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "polaron/functional.hpp"

namespace polaron {

enum class InitKind { GaussianCloud, SeparatedCopies, FromFile };

struct SolveConfig {
  int max_iters = 2000;
  double step = 0.5;            // initial step; halved on energy increase
  double tol_residual = 1e-6;   // L2 norm of the projected gradient
  double tol_energy = 1e-10;    // per-step decrease
  std::uint64_t seed = 0;
  InitKind init = InitKind::GaussianCloud;
  double separation = 8.0;      // for SeparatedCopies
  std::string init_file;        // for FromFile (state binary dump)

  void validate() const;
};

struct SolveResult {
  EnergyReport energy;
  HartreeState state;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
  std::vector<double> energy_trace;
  /// Set when alpha = 0 and nu = 0: the functional has no coupling and the
  /// infimum (0) is approached by spreading, not attained.
  bool no_binding_without_coupling = false;
};

/// h_j phi_j with h_j = D_A^2 + V - 2 alpha (rho * G) + U sum_{i != j} (|phi_i|^2 * G),
/// the Euler-Lagrange operator of the energy with respect to conj(phi_j).
GridFunction effective_hamiltonian_apply(int j, const HartreeState& state,
                                         const PolaronParams& params,
                                         const FieldSpec& fields,
                                         CoulombKernel kernel = kEnergyKernel);

/// Preconditioned projected gradient descent with per-orbital renormalization
/// and a monotone line search. Deterministic for a fixed seed.
SolveResult minimize(const PolaronParams& params, const FieldSpec& fields,
                     const Grid3D& grid, const SolveConfig& config,
                     CoulombKernel kernel = kEnergyKernel);

/// Max relative discrepancy between the analytic directional derivative of
/// pekar_energy and central finite differences over n_dirs random tangent
/// directions (step 1e-5).
double gradient_check(const HartreeState& state, const PolaronParams& params,
                      const FieldSpec& fields, int n_dirs = 10,
                      std::uint64_t seed = 0,
                      CoulombKernel kernel = kEnergyKernel);

struct BindingSplit {
  int k = 0;
  double energy_k = 0.0;
  double energy_rest = 0.0;
  bool converged = false;
};

struct BindingReport {
  double margin = 0.0;  // min_k (C_k + C_{N-k}) - C_N; positive => binding
  bool reliable = true; // all sub-solves converged
  double energy_N = 0.0;
  std::vector<BindingSplit> splits;
};

/// Solves for all 1 <= k <= N at identical (alpha, nu, fields) and reports
/// the Hartree-surrogate binding margin.
BindingReport binding_margin(const PolaronParams& params, const FieldSpec& fields,
                             const Grid3D& grid, const SolveConfig& config,
                             CoulombKernel kernel = kEnergyKernel);

void save_state(const std::string& path, const HartreeState& state);
HartreeState load_state(const std::string& path);

}  // namespace polaron
