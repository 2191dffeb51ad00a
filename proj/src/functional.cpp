#include "polaron/functional.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace polaron {

void PolaronParams::validate() const {
  if (N < 1) throw std::invalid_argument("N must be >= 1");
  // alpha = 0 is the coupling-off case; the solver flags it.
  if (alpha < 0.0) throw std::invalid_argument("alpha must be nonnegative");
  if (nu < 0.0) throw std::invalid_argument("nu must be nonnegative");
}

void HartreeState::validate() const {
  if (orbitals.empty()) throw std::invalid_argument("state has no orbitals");
  const Grid3D& g = orbitals.front().grid;
  for (const auto& phi : orbitals) {
    if (!(phi.grid == g)) throw std::invalid_argument("grid mismatch in state");
    if (std::abs(l2_norm(phi) - 1.0) > 1e-9)
      throw std::invalid_argument("orbital is not L2-normalized");
  }
}

void HartreeState::normalize() {
  for (auto& phi : orbitals) {
    double nrm = l2_norm(phi);
    if (!(nrm > 0.0)) throw std::invalid_argument("cannot normalize zero orbital");
    for (auto& v : phi.values) v /= nrm;
  }
}

double PhononDisplacement::norm_squared() const {
  double acc = 0.0;
  for (const auto& v : values) acc += std::norm(v);
  return acc;
}

DensityGrid density(const HartreeState& state) {
  state.validate();
  DensityGrid rho(state.grid());
  // per-point sorted accumulation keeps the result bitwise independent of
  // orbital labeling
  std::vector<double> buf(state.orbitals.size());
  for (std::size_t i = 0; i < rho.values.size(); ++i) {
    for (std::size_t j = 0; j < state.orbitals.size(); ++j)
      buf[j] = std::norm(state.orbitals[j].values[i]);
    std::sort(buf.begin(), buf.end());
    double acc = 0.0;
    for (double v : buf) acc += v;
    rho.values[i] = acc;
  }
  rho.finalize();
  return rho;
}

namespace {

DensityGrid orbital_density(const GridFunction& phi) {
  DensityGrid rho(phi.grid);
  for (std::size_t i = 0; i < rho.values.size(); ++i)
    rho.values[i] = std::norm(phi.values[i]);
  rho.finalize();
  return rho;
}

double real_overlap(const DensityGrid& rho, const GridFunction& pot) {
  double acc = 0.0;
  for (std::size_t i = 0; i < rho.values.size(); ++i)
    acc += rho.values[i] * pot.values[i].real();
  return acc * rho.grid.cell_volume();
}

// label-order-independent reduction
double sorted_sum(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc;
}

}  // namespace

EnergyReport pekar_energy(const HartreeState& state, const PolaronParams& params,
                          const FieldSpec& fields, CoulombKernel kernel) {
  state.validate();
  params.validate();
  if (state.N() != params.N)
    throw std::invalid_argument("orbital count does not match params.N");
  const Grid3D& g = state.grid();

  EnergyReport rep;
  for (const auto& phi : state.orbitals) {
    auto dphi = covariant_gradient(phi, fields);
    double kin = 0.0;
    for (const auto& comp : dphi)
      for (const auto& v : comp.values) kin += std::norm(v);
    kin *= g.cell_volume();
    rep.per_orbital_kinetic.push_back(kin);

    double ext = 0.0;
    for (int ix = 0; ix < g.n[0]; ++ix)
      for (int iy = 0; iy < g.n[1]; ++iy)
        for (int iz = 0; iz < g.n[2]; ++iz)
          ext += evaluate_V(fields, g.coord(ix, iy, iz)) *
                 std::norm(phi.values[g.index(ix, iy, iz)]);
    ext *= g.cell_volume();
    rep.per_orbital_external.push_back(ext);
  }
  rep.kinetic = sorted_sum(rep.per_orbital_kinetic);
  rep.external = sorted_sum(rep.per_orbital_external);

  // Pair repulsion via per-orbital potentials; the symmetrized pair term and
  // sorted reduction make the total bitwise independent of orbital labels.
  if (state.N() > 1) {
    std::vector<DensityGrid> densities;
    std::vector<GridFunction> potentials;
    for (const auto& phi : state.orbitals) {
      densities.push_back(orbital_density(phi));
      potentials.push_back(coulomb_potential(densities.back(), kernel));
    }
    std::vector<double> pair_terms;
    for (int i = 0; i < state.N(); ++i)
      for (int j = i + 1; j < state.N(); ++j)
        pair_terms.push_back(0.5 * (real_overlap(densities[i], potentials[j]) +
                                    real_overlap(densities[j], potentials[i])));
    rep.repulsion = sorted_sum(std::move(pair_terms));
  }

  rep.self_interaction = coulomb_self_energy(density(state), kernel);
  rep.total = rep.kinetic + rep.external + params.U() * rep.repulsion -
              params.alpha * rep.self_interaction;
  return rep;
}

PhononDisplacement optimal_displacement(const HartreeState& state,
                                        const PolaronParams& params,
                                        CoulombKernel kernel) {
  DensityGrid rho = density(state);
  const Grid3D& g = rho.grid;
  std::vector<std::complex<double>> work(g.size()), hat(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) work[i] = rho.values[i];
  fft_forward(g, work.data(), hat.data());

  PhononDisplacement f;
  f.grid = g;
  f.values.resize(g.size());
  double h3 = g.cell_volume();
  double inv_vol = 1.0 / g.volume();
  for (int ix = 0; ix < g.n[0]; ++ix)
    for (int iy = 0; iy < g.n[1]; ++iy)
      for (int iz = 0; iz < g.n[2]; ++iz) {
        Vec3 k{g.wavenumber(ix, 0), g.wavenumber(iy, 1), g.wavenumber(iz, 2)};
        std::size_t id = g.index(ix, iy, iz);
        double mult = coulomb_multiplier(g, kernel, k);
        if (dot(k, k) == 0.0 && kernel == CoulombKernel::MeanFree) mult = 0.0;
        f.values[id] =
            std::sqrt(params.alpha * mult * inv_vol) * (h3 * hat[id]);
      }
  return f;
}

double coherent_state_energy(const HartreeState& state,
                             const PhononDisplacement& f,
                             const PolaronParams& params,
                             const FieldSpec& fields, CoulombKernel kernel) {
  if (!(f.grid == state.grid()))
    throw std::invalid_argument("displacement grid mismatch");
  EnergyReport rep = pekar_energy(state, params, fields, kernel);
  double particle = rep.kinetic + rep.external + params.U() * rep.repulsion;

  // Linear phonon-density coupling -2 Re sum_k conj(f_opt(k)) f(k), written
  // out through the density so the completion of squares is an algebraic
  // identity: E(f) = particle + |f - f_opt|^2 - alpha D(rho).
  PhononDisplacement fopt = optimal_displacement(state, params, kernel);
  double coupling = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i)
    coupling += std::real(std::conj(fopt.values[i]) * f.values[i]);
  return particle + f.norm_squared() - 2.0 * coupling;
}

SubadditivityGap subadditivity_gap(const std::vector<double>& energies) {
  if (energies.empty())
    throw std::invalid_argument("need energies for 1..N");
  int N = int(energies.size());
  SubadditivityGap out;
  out.min_gap = std::numeric_limits<double>::infinity();
  for (int n = 1; n <= N; ++n)
    for (int m = n; n + m <= N; ++m) {
      double gap = energies[n - 1] + energies[m - 1] - energies[n + m - 1];
      out.pairs.push_back({n, m, gap});
      out.min_gap = std::min(out.min_gap, gap);
    }
  if (out.pairs.empty())
    throw std::invalid_argument("need N >= 2 for subadditivity gaps");
  return out;
}

double coulomb_image_bias(const Grid3D& grid, double mass, CoulombKernel kernel) {
  if (kernel == CoulombKernel::SphereTruncated) return 0.0;
  double L = std::min({grid.box[0], grid.box[1], grid.box[2]});
  return mass * mass * 2.837297 / L;
}

}  // namespace polaron
