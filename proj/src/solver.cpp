#include "polaron/solver.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <cmath>
#include <random>
#include <stdexcept>

namespace polaron {

namespace {

GridFunction gaussian_orbital(const Grid3D& g, Vec3 center, double width) {
  GridFunction phi(g);
  for (int ix = 0; ix < g.n[0]; ++ix)
    for (int iy = 0; iy < g.n[1]; ++iy)
      for (int iz = 0; iz < g.n[2]; ++iz) {
        Vec3 r = g.coord(ix, iy, iz) - center;
        phi.values[g.index(ix, iy, iz)] =
            std::exp(-dot(r, r) / (2.0 * width * width));
      }
  double nrm = l2_norm(phi);
  for (auto& v : phi.values) v /= nrm;
  return phi;
}

HartreeState initial_state(const PolaronParams& params, const Grid3D& grid,
                           const SolveConfig& config) {
  HartreeState state;
  std::mt19937_64 rng(config.seed);
  double L = std::min({grid.box[0], grid.box[1], grid.box[2]});
  Vec3 box_center = grid.origin + Vec3{grid.box[0] / 2, grid.box[1] / 2,
                                       grid.box[2] / 2};
  switch (config.init) {
    case InitKind::GaussianCloud: {
      std::uniform_real_distribution<double> jitter(-L / 16, L / 16);
      for (int j = 0; j < params.N; ++j) {
        Vec3 c = box_center + Vec3{jitter(rng), jitter(rng), jitter(rng)};
        state.orbitals.push_back(gaussian_orbital(grid, c, L / 8));
      }
      break;
    }
    case InitKind::SeparatedCopies: {
      // Copies spread along the body diagonal, the direction of maximal
      // pairwise torus distance.
      Vec3 dir{1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0)};
      for (int j = 0; j < params.N; ++j) {
        double t = params.N == 1 ? 0.0 : (j - (params.N - 1) / 2.0);
        Vec3 c = box_center + (t * config.separation) * dir;
        state.orbitals.push_back(gaussian_orbital(grid, c, L / 10));
      }
      break;
    }
    case InitKind::FromFile:
      state = load_state(config.init_file);
      if (!(state.grid() == grid) || state.N() != params.N)
        throw std::invalid_argument("initial state file does not match run");
      break;
  }
  state.normalize();
  return state;
}

void spectral_multiply(const Grid3D& g, std::vector<std::complex<double>>& hat,
                       const std::function<double(double)>& mult_of_k2) {
  for (int ix = 0; ix < g.n[0]; ++ix)
    for (int iy = 0; iy < g.n[1]; ++iy)
      for (int iz = 0; iz < g.n[2]; ++iz) {
        Vec3 k{g.wavenumber(ix, 0), g.wavenumber(iy, 1), g.wavenumber(iz, 2)};
        hat[g.index(ix, iy, iz)] *= mult_of_k2(dot(k, k));
      }
}

GridFunction precondition(const GridFunction& gvec) {
  const Grid3D& g = gvec.grid;
  std::vector<std::complex<double>> hat(g.size());
  fft_forward(g, gvec.values.data(), hat.data());
  spectral_multiply(g, hat, [](double k2) { return 1.0 / (1.0 + k2); });
  GridFunction out(g);
  fft_backward(g, hat.data(), out.values.data());
  return out;
}

// Removes the phi component so the direction stays tangent to the sphere.
void project_tangent(GridFunction& dir, const GridFunction& phi) {
  std::complex<double> overlap = inner_product(phi, dir);
  for (std::size_t i = 0; i < dir.values.size(); ++i)
    dir.values[i] -= overlap * phi.values[i];
}

}  // namespace

void SolveConfig::validate() const {
  if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
  if (!(tol_residual > 0.0) || !(tol_energy > 0.0))
    throw std::invalid_argument("tolerances must be positive");
  if (!(step > 0.0)) throw std::invalid_argument("step must be positive");
}

GridFunction effective_hamiltonian_apply(int j, const HartreeState& state,
                                         const PolaronParams& params,
                                         const FieldSpec& fields,
                                         CoulombKernel kernel) {
  state.validate();
  if (j < 0 || j >= state.N()) throw std::invalid_argument("orbital index");
  const Grid3D& g = state.grid();
  const GridFunction& phi = state.orbitals[j];

  // Kinetic part D_A^2 phi: apply (-i d_l + A_l) twice per component.
  GridFunction out(g);
  auto first = covariant_gradient(phi, fields);
  for (int axis = 0; axis < 3; ++axis) {
    auto second = covariant_gradient(first[axis], fields);
    for (std::size_t i = 0; i < out.values.size(); ++i)
      out.values[i] += second[axis].values[i];
  }

  // Local potential: V - 2 alpha (rho * G) + U sum_{i != j} (|phi_i|^2 * G).
  std::vector<double> local(g.size(), 0.0);
  for (int ix = 0; ix < g.n[0]; ++ix)
    for (int iy = 0; iy < g.n[1]; ++iy)
      for (int iz = 0; iz < g.n[2]; ++iz)
        local[g.index(ix, iy, iz)] = evaluate_V(fields, g.coord(ix, iy, iz));

  if (params.alpha > 0.0) {
    GridFunction vc = coulomb_potential(density(state), kernel);
    for (std::size_t i = 0; i < local.size(); ++i)
      local[i] -= 2.0 * params.alpha * vc.values[i].real();
  }
  if (params.U() > 0.0 && state.N() > 1) {
    DensityGrid others(g);
    for (int i = 0; i < state.N(); ++i) {
      if (i == j) continue;
      for (std::size_t id = 0; id < others.values.size(); ++id)
        others.values[id] += std::norm(state.orbitals[i].values[id]);
    }
    others.finalize();
    GridFunction vu = coulomb_potential(others, kernel);
    for (std::size_t i = 0; i < local.size(); ++i)
      local[i] += params.U() * vu.values[i].real();
  }
  for (std::size_t i = 0; i < out.values.size(); ++i)
    out.values[i] += local[i] * phi.values[i];
  return out;
}

SolveResult minimize(const PolaronParams& params, const FieldSpec& fields,
                     const Grid3D& grid, const SolveConfig& config,
                     CoulombKernel kernel) {
  params.validate();
  config.validate();
  grid.validate();

  SolveResult res;
  res.no_binding_without_coupling = (params.alpha == 0.0 && params.U() == 0.0);
  HartreeState state = initial_state(params, grid, config);
  EnergyReport energy = pekar_energy(state, params, fields, kernel);
  if (!std::isfinite(energy.total))
    throw std::runtime_error("non-finite energy at the initial state");
  res.energy_trace.push_back(energy.total);

  double step = config.step;
  int quiet_streak = 0;
  for (int iter = 0; iter < config.max_iters; ++iter) {
    // Projected gradients and residual.
    std::vector<GridFunction> dirs;
    double residual = 0.0;
    for (int j = 0; j < state.N(); ++j) {
      GridFunction hphi = effective_hamiltonian_apply(j, state, params, fields,
                                                      kernel);
      double mu = std::real(inner_product(state.orbitals[j], hphi));
      for (std::size_t i = 0; i < hphi.values.size(); ++i)
        hphi.values[i] -= mu * state.orbitals[j].values[i];
      residual = std::max(residual, l2_norm(hphi));
      GridFunction d = precondition(hphi);
      project_tangent(d, state.orbitals[j]);
      dirs.push_back(std::move(d));
    }
    res.residual = residual;
    res.iterations = iter + 1;

    // Monotone line search.
    bool accepted = false;
    double decrease = 0.0;
    while (step > 1e-14) {
      HartreeState cand = state;
      for (int j = 0; j < state.N(); ++j)
        for (std::size_t i = 0; i < cand.orbitals[j].values.size(); ++i)
          cand.orbitals[j].values[i] -= step * dirs[j].values[i];
      cand.normalize();
      EnergyReport ecand = pekar_energy(cand, params, fields, kernel);
      if (!std::isfinite(ecand.total))
        throw std::runtime_error("non-finite energy during descent");
      if (ecand.total <= energy.total) {
        decrease = energy.total - ecand.total;
        state = std::move(cand);
        energy = ecand;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (accepted) {
      res.energy_trace.push_back(energy.total);
      step = std::min(step * 1.3, 4.0 * config.step);
    }

    bool quiet = residual <= config.tol_residual &&
                 (!accepted || decrease <= config.tol_energy);
    quiet_streak = quiet ? quiet_streak + 1 : 0;
    // Flat basins near unbinding thresholds: require 5 consecutive quiet
    // iterations before declaring convergence.
    if (quiet_streak >= 5) {
      res.converged = true;
      break;
    }
    if (!accepted) break;  // line search exhausted
  }

  res.energy = energy;
  res.state = std::move(state);
  return res;
}

double gradient_check(const HartreeState& state, const PolaronParams& params,
                      const FieldSpec& fields, int n_dirs, std::uint64_t seed,
                      CoulombKernel kernel) {
  state.validate();
  const Grid3D& g = state.grid();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double h = 1e-5;
  double worst = 0.0;

  for (int d = 0; d < n_dirs; ++d) {
    // Random tangent direction, one perturbation per orbital.
    std::vector<GridFunction> delta;
    for (int j = 0; j < state.N(); ++j) {
      GridFunction dj(g);
      for (auto& v : dj.values) v = {gauss(rng), gauss(rng)};
      project_tangent(dj, state.orbitals[j]);
      double nrm = l2_norm(dj);
      for (auto& v : dj.values) v /= nrm;
      delta.push_back(std::move(dj));
    }

    double analytic = 0.0;
    for (int j = 0; j < state.N(); ++j) {
      GridFunction hphi =
          effective_hamiltonian_apply(j, state, params, fields, kernel);
      double mu = std::real(inner_product(state.orbitals[j], hphi));
      for (std::size_t i = 0; i < hphi.values.size(); ++i)
        hphi.values[i] -= mu * state.orbitals[j].values[i];
      analytic += 2.0 * std::real(inner_product(hphi, delta[j]));
    }

    auto shifted_energy = [&](double t) {
      HartreeState s = state;
      for (int j = 0; j < s.N(); ++j)
        for (std::size_t i = 0; i < s.orbitals[j].values.size(); ++i)
          s.orbitals[j].values[i] += t * delta[j].values[i];
      s.normalize();
      return pekar_energy(s, params, fields, kernel).total;
    };
    double fd = (shifted_energy(h) - shifted_energy(-h)) / (2.0 * h);
    double scale = std::max({std::abs(analytic), std::abs(fd), 1e-12});
    worst = std::max(worst, std::abs(analytic - fd) / scale);
  }
  return worst;
}

BindingReport binding_margin(const PolaronParams& params, const FieldSpec& fields,
                             const Grid3D& grid, const SolveConfig& config,
                             CoulombKernel kernel) {
  if (params.N < 2) throw std::invalid_argument("binding needs N >= 2");
  BindingReport rep;

  // C_n for n = 1..N; each n solved from both the compact and the separated
  // seeding, keeping the lower (both are variational upper bounds).
  std::vector<double> energy(params.N + 1, 0.0);
  std::vector<bool> ok(params.N + 1, true);
  for (int n = 1; n <= params.N; ++n) {
    PolaronParams p = params;
    p.N = n;
    double best = std::numeric_limits<double>::infinity();
    bool conv = false;
    for (InitKind init : {InitKind::GaussianCloud, InitKind::SeparatedCopies}) {
      if (n == 1 && init == InitKind::SeparatedCopies) continue;
      SolveConfig c = config;
      c.init = init;
      SolveResult r = minimize(p, fields, grid, c, kernel);
      if (r.energy.total < best) {
        best = r.energy.total;
        conv = r.converged;
      } else {
        conv = conv || r.converged;
      }
    }
    energy[n] = best;
    ok[n] = conv;
  }

  rep.energy_N = energy[params.N];
  rep.margin = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= params.N - 1; ++k) {
    BindingSplit split;
    split.k = k;
    split.energy_k = energy[k];
    split.energy_rest = energy[params.N - k];
    split.converged = ok[k] && ok[params.N - k];
    rep.margin = std::min(rep.margin,
                          split.energy_k + split.energy_rest - rep.energy_N);
    rep.reliable = rep.reliable && split.converged;
    rep.splits.push_back(split);
  }
  rep.reliable = rep.reliable && ok[params.N];
  return rep;
}

void save_state(const std::string& path, const HartreeState& state) {
  state.validate();
  std::vector<std::vector<double>> comps;
  for (const auto& phi : state.orbitals) {
    std::vector<double> re(phi.values.size()), im(phi.values.size());
    for (std::size_t i = 0; i < phi.values.size(); ++i) {
      re[i] = phi.values[i].real();
      im[i] = phi.values[i].imag();
    }
    comps.push_back(std::move(re));
    comps.push_back(std::move(im));
  }
  std::vector<const double*> ptrs;
  for (const auto& c : comps) ptrs.push_back(c.data());
  save_grid_data(path, state.grid(), ptrs);
}

HartreeState load_state(const std::string& path) {
  LoadedGridData raw = load_grid_data(path);
  if (raw.ncomp % 2 != 0)
    throw std::runtime_error("state file must hold re/im pairs");
  int N = raw.ncomp / 2;
  HartreeState state;
  const Grid3D& g = raw.grid;
  for (int j = 0; j < N; ++j) state.orbitals.emplace_back(g);
  std::size_t pos = 0;
  for (int iz = 0; iz < g.n[2]; ++iz)
    for (int iy = 0; iy < g.n[1]; ++iy)
      for (int ix = 0; ix < g.n[0]; ++ix) {
        std::size_t id = g.index(ix, iy, iz);
        for (int j = 0; j < N; ++j) {
          state.orbitals[j].values[id] = {raw.data[pos], raw.data[pos + 1]};
          pos += 2;
        }
      }
  return state;
}

}  // namespace polaron
