#pragma once

#include <vector>

#include "polaron/fields.hpp"
#include "polaron/grid.hpp"

namespace polaron {

/// Coupling parameters in natural units (hbar = 1, 2m = 1).
/// U is derived as alpha * nu.
struct PolaronParams {
  int N = 1;
  double alpha = 1.0;
  double nu = 0.0;

  double U() const { return alpha * nu; }
  void validate() const;
};

/// N single-particle orbitals on one shared grid; the Hartree product trial
/// state. Each orbital must be L2-normalized (checked to 1e-9).
struct HartreeState {
  std::vector<GridFunction> orbitals;

  const Grid3D& grid() const { return orbitals.front().grid; }
  int N() const { return int(orbitals.size()); }
  void validate() const;
  void normalize();
};

struct EnergyReport {
  double kinetic = 0.0;           // sum_j int |D_A phi_j|^2
  double external = 0.0;          // sum_j int V |phi_j|^2
  double repulsion = 0.0;         // sum_{i<j} int int |phi_i|^2 |phi_j|^2 / |x-y|
  double self_interaction = 0.0;  // D(rho)
  double total = 0.0;             // kinetic + external + U*repulsion - alpha*self_interaction
  std::vector<double> per_orbital_kinetic;
  std::vector<double> per_orbital_external;
};

/// Optimal coherent phonon displacement on the discrete momentum lattice,
/// f(k) = sqrt(alpha G^(k) / Vol) rho^(k); then |f|^2 summed over modes equals
/// alpha D(rho) exactly, which is what makes the completion of squares exact.
struct PhononDisplacement {
  Grid3D grid;  // momentum lattice of this grid
  std::vector<std::complex<double>> values;

  double norm_squared() const;
};

/// Kernel used for every Coulomb-type term in the energy. SphereTruncated
/// reproduces free-space Coulomb for half-box-supported densities; the
/// MeanFree periodic surrogate is biased by an O(mass^2/L) image term,
/// reported by coulomb_image_bias().
inline constexpr CoulombKernel kEnergyKernel = CoulombKernel::SphereTruncated;

/// rho = sum_j |phi_j|^2; total mass N.
DensityGrid density(const HartreeState& state);

EnergyReport pekar_energy(const HartreeState& state, const PolaronParams& params,
                          const FieldSpec& fields,
                          CoulombKernel kernel = kEnergyKernel);

PhononDisplacement optimal_displacement(const HartreeState& state,
                                        const PolaronParams& params,
                                        CoulombKernel kernel = kEnergyKernel);

/// <phi x eta_f | H | phi x eta_f> in closed form: particle terms + |f|^2
/// minus the linear phonon-density coupling. Minimizing over f returns
/// exactly pekar_energy(state).total.
double coherent_state_energy(const HartreeState& state,
                             const PhononDisplacement& f,
                             const PolaronParams& params,
                             const FieldSpec& fields,
                             CoulombKernel kernel = kEnergyKernel);

struct SubadditivityGap {
  double min_gap = 0.0;
  struct Pair {
    int n = 0, m = 0;
    double gap = 0.0;  // C_n + C_m - C_{n+m}
  };
  std::vector<Pair> pairs;
};

/// Gaps C_n + C_m - C_{n+m} for all n+m <= N from a complete list of
/// minimized energies indexed 1..N (energies[0] = C_1).
SubadditivityGap subadditivity_gap(const std::vector<double>& energies);

/// Scale of the mean-free kernel's periodic-image bias on D(rho):
/// mass^2 * 2.837297 / L (the cubic Wigner constant). Zero for the
/// truncated kernel up to density-tail overflow.
double coulomb_image_bias(const Grid3D& grid, double mass, CoulombKernel kernel);

}  // namespace polaron
