// Acceptance gate: one criterion per invocation, one PASS/FAIL line, exit 0/1.
// Usage: acceptance <criterion 1..13>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "polaron/certificates.hpp"
#include "polaron/solver.hpp"

using namespace polaron;
using std::numbers::pi;

namespace {

constexpr double kPekarOracle = -0.1085129;  // radial-oracle N=1 ground energy

double now_seconds() {
  using clock = std::chrono::steady_clock;
  static const clock::time_point t0 = clock::now();
  return std::chrono::duration<double>(clock::now() - t0).count();
}

// Smooth localized random state: Gaussian envelope times a smooth random
// phase, never near zero, supported well inside the box.
HartreeState random_localized_state(const Grid3D& grid, int N,
                                    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  double L = grid.box[0];
  HartreeState st;
  for (int j = 0; j < N; ++j) {
    GridFunction f(grid);
    Vec3 c{0.08 * L * gauss(rng), 0.08 * L * gauss(rng), 0.08 * L * gauss(rng)};
    double w = L / 10.0 * (1.0 + 0.3 * std::abs(gauss(rng)));
    Vec3 q{2 * pi / L * std::round(2 * gauss(rng)),
           2 * pi / L * std::round(2 * gauss(rng)),
           2 * pi / L * std::round(2 * gauss(rng))};
    for (int ix = 0; ix < grid.n[0]; ++ix)
      for (int iy = 0; iy < grid.n[1]; ++iy)
        for (int iz = 0; iz < grid.n[2]; ++iz) {
          Vec3 x = grid.coord(ix, iy, iz);
          f.values[grid.index(ix, iy, iz)] =
              std::exp(-dist2(x, c) / (2 * w * w)) *
              std::exp(std::complex<double>(0, dot(q, x)));
        }
    st.orbitals.push_back(std::move(f));
  }
  st.normalize();
  return st;
}

// Band-limited random state with a constant offset dominating the modes, so
// the modulus stays smooth (no zeros).
HartreeState random_band_limited_state(const Grid3D& grid, int N,
                                       std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_int_distribution<int> kd(-3, 3);
  HartreeState st;
  for (int j = 0; j < N; ++j) {
    GridFunction f(grid);
    std::vector<Vec3> ks;
    std::vector<std::complex<double>> amps;
    for (int m = 0; m < 8; ++m) {
      ks.push_back({2 * pi * kd(rng) / grid.box[0],
                    2 * pi * kd(rng) / grid.box[1],
                    2 * pi * kd(rng) / grid.box[2]});
      amps.push_back(0.1 * std::complex<double>(gauss(rng), gauss(rng)));
    }
    for (int ix = 0; ix < grid.n[0]; ++ix)
      for (int iy = 0; iy < grid.n[1]; ++iy)
        for (int iz = 0; iz < grid.n[2]; ++iz) {
          Vec3 x = grid.coord(ix, iy, iz);
          std::complex<double> v = 2.0;
          for (std::size_t m = 0; m < ks.size(); ++m)
            v += amps[m] * std::exp(std::complex<double>(0, dot(ks[m], x)));
          f.values[grid.index(ix, iy, iz)] = v;
        }
    st.orbitals.push_back(std::move(f));
  }
  st.normalize();
  return st;
}

SolveConfig solve_config(std::uint64_t seed, InitKind init = InitKind::GaussianCloud,
                         double tol_residual = 1e-6, int max_iters = 4000) {
  SolveConfig sc;
  sc.seed = seed;
  sc.init = init;
  sc.max_iters = max_iters;
  sc.tol_residual = tol_residual;
  return sc;
}

// minimum over both initializations (cloud and separated copies)
SolveResult best_solve(const PolaronParams& p, const FieldSpec& f,
                       const Grid3D& g, std::uint64_t seed,
                       double tol_residual, int max_iters) {
  SolveResult a = minimize(
      p, f, g, solve_config(seed, InitKind::GaussianCloud, tol_residual, max_iters));
  if (p.N < 2) return a;
  SolveResult b = minimize(
      p, f, g, solve_config(seed, InitKind::SeparatedCopies, tol_residual, max_iters));
  return a.energy.total <= b.energy.total ? a : b;
}

bool criterion1(std::string& msg) {
  Grid3D grid = Grid3D::cubic(64, 32.0);
  PolaronParams params{1, 1.0, 0.0};
  SolveResult r = minimize(params, make_zero_field(), grid, solve_config(1));
  double rel = std::abs(r.energy.total - kPekarOracle) / std::abs(kPekarOracle);
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "total %.7f vs oracle %.7f, rel err %.2e, %d iters, %.0f s",
                r.energy.total, kPekarOracle, rel, r.iterations, now_seconds());
  msg = buf;
  return r.converged && rel < 1e-3;
}

bool criterion2(std::string& msg) {
  double worst = 0.0;
  std::vector<FieldSpec> fields = {make_zero_field(),
                                   make_linear_A({0, 0, 0.5})};
  Grid3D small = Grid3D::cubic(16, 12.0);
  Grid3D solve_grid = Grid3D::cubic(24, 14.0);
  for (const FieldSpec& f : fields) {
    PolaronParams params{2, 1.0, 0.5};
    HartreeState rnd = random_localized_state(small, 2, 21);
    SolveResult min1 =
        minimize(PolaronParams{1, 1.0, 0.0}, f, solve_grid, solve_config(22));
    for (double a : {2.0, 3.0, 10.0}) {
      worst = std::max(worst, scaling_identity_check(f, params, rnd, a));
      worst = std::max(worst, scaling_identity_check(f, PolaronParams{1, 1.0, 0.0},
                                                     min1.state, a));
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "max component deviation %.3e", worst);
  msg = buf;
  return worst < 1e-12;
}

bool criterion3(std::string& msg) {
  std::vector<double> ratios;
  bool ok = true;
  for (double a : {1.0, 2.0, 4.0}) {
    Grid3D grid = Grid3D::cubic(48, 32.0 / a);
    PolaronParams params{1, a, 0.0};
    SolveResult r = minimize(params, make_zero_field(), grid, solve_config(3));
    ok = ok && r.converged;
    ratios.push_back(r.energy.total / (a * a));
  }
  double lo = *std::min_element(ratios.begin(), ratios.end());
  double hi = *std::max_element(ratios.begin(), ratios.end());
  double spread = (hi - lo) / std::abs(lo);
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "E/alpha^2 in [%.7f, %.7f], spread %.2e", lo, hi, spread);
  msg = buf;
  return ok && spread < 1e-3;
}

bool criterion4(std::string& msg) {
  Grid3D grid = Grid3D::cubic(20, 14.0);
  int violations = 0;
  double worst = -1e300;
  for (int N : {1, 2, 3})
    for (int t = 0; t < 100; ++t) {
      HartreeState st = random_localized_state(grid, N, 400 + 100 * N + t);
      DensityGrid rho = density(st);
      double D = coulomb_self_energy(rho, kEnergyKernel);
      EnergyReport rep =
          pekar_energy(st, PolaronParams{N, 0.0, 0.0}, make_zero_field(),
                       kEnergyKernel);
      double bound = 2.0 * std::pow(double(N), 1.5) * std::sqrt(rep.kinetic);
      worst = std::max(worst, D - bound);
      if (D > bound + 1e-8) ++violations;
    }
  char buf[96];
  std::snprintf(buf, sizeof buf, "%d violations, worst slack %.3e", violations,
                worst);
  msg = buf;
  return violations == 0;
}

bool criterion5(std::string& msg) {
  Grid3D grid = Grid3D::cubic(20, 14.0);
  std::vector<Vec3> Bs = {{0, 0, 0.5}, {0, 1.2, 1.6}};  // |B| = 0.5 and 2
  int violations = 0;
  double worst = -1e300;
  for (const Vec3& B : Bs) {
    FieldSpec f = make_linear_A(B);
    for (int t = 0; t < 100; ++t) {
      HartreeState st = random_band_limited_state(grid, 1, 500 + t);
      EnergyReport with_A =
          pekar_energy(st, PolaronParams{1, 0.0, 0.0}, f, kEnergyKernel);
      HartreeState mod = st;
      for (auto& v : mod.orbitals[0].values) v = std::abs(v);
      EnergyReport no_A = pekar_energy(mod, PolaronParams{1, 0.0, 0.0},
                                       make_zero_field(), kEnergyKernel);
      worst = std::max(worst, no_A.kinetic - with_A.kinetic);
      if (with_A.kinetic < no_A.kinetic - 1e-8) ++violations;
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "%d violations, worst excess %.3e", violations,
                worst);
  msg = buf;
  return violations == 0;
}

bool criterion6(std::string& msg) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> uni(-10.0, 10.0);
  std::uniform_int_distribution<int> nd(1, 12);
  std::uniform_real_distribution<double> rd(0.05, 2.0);
  int failures = 0;
  for (int t = 0; t < 1000; ++t) {
    BallLayout bl;
    bl.small_radius = rd(rng);
    int N = nd(rng);
    for (int k = 0; k < N; ++k)
      bl.centers.push_back({uni(rng), uni(rng), uni(rng)});
    try {
      ClusterLayout cl = regroup_balls(bl);
      cl.validate(bl);
    } catch (const std::exception&) {
      ++failures;
    }
  }
  double secs = now_seconds();
  char buf[96];
  std::snprintf(buf, sizeof buf, "%d/1000 failures, %.2f s", failures, secs);
  msg = buf;
  return failures == 0 && secs < 10.0;
}

bool criterion7(std::string& msg) {
  const std::int64_t n = 1000000;
  int passed = 0, total = 0;
  auto all = [](Vec3) { return true; };
  for (double d : {0.5, 1.0, 2.0, 5.0}) {
    auto f = [](Vec3 y) {
      double r2 = dot(y, y);
      return 1.0 / (r2 * r2);
    };
    auto region = [d](Vec3 y) { return dot(y, y) > d * d / 4.0; };
    McEstimate e = mc_integrate(f, region,
                                McSampler{HeavyTailSampler{{0, 0, 0}, d}}, n,
                                70 + total);
    ++total;
    if (std::abs(e.mean - 8 * pi / d) <= 3 * e.std_error) ++passed;
  }
  for (double d : {0.5, 1.0, 2.0, 5.0}) {
    Vec3 a{0, 0, 0}, b{d, 0, 0};
    auto f = [a, b](Vec3 y) { return 1.0 / (dist2(a, y) * dist2(b, y)); };
    McEstimate e = mc_integrate(f, all,
                                McSampler{SingularPointsSampler{{a, b}, d}}, n,
                                170 + total);
    ++total;
    if (std::abs(e.mean - pi * pi * pi / d) <= 3 * e.std_error) ++passed;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%d/%d identities within 3 sigma", passed,
                total);
  msg = buf;
  return passed == total;
}

bool criterion8(std::string& msg) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-6, 6);
  std::uniform_int_distribution<int> nd(2, 6);
  int passed = 0;
  const int instances = 50;
  for (int t = 0; t < instances; ++t) {
    BallLayout bl;
    bl.small_radius = 0.3;
    int N = nd(rng);
    while (int(bl.centers.size()) < N) {
      Vec3 c{u(rng), u(rng), u(rng)};
      bool ok = true;
      for (const Vec3& p : bl.centers)
        if (dist(p, c) < 4 * bl.small_radius) ok = false;
      if (ok) bl.centers.push_back(c);
    }
    ClusterLayout cl = regroup_balls(bl);
    ErrorTermCheck c1 = f1_check(1.0, cl, bl.centers, 1000000, 800 + t);
    ErrorTermCheck c2 = f2_check(1.0, cl, bl.centers, 1000000, 900 + t);
    if (c1.pass && c2.pass) ++passed;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%d/%d instances passed both bounds", passed,
                instances);
  msg = buf;
  return passed == instances;
}

bool criterion9(std::string& msg) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> ul(1.0, 8.0), up(0.3, 3.0);
  int count_ok = 0;
  for (int t = 0; t < 50; ++t) {
    double Lambda = ul(rng);
    double P = std::min(up(rng), Lambda / 2);
    if (block_modes(Lambda, P, 3).count_ok()) ++count_ok;
  }
  double worst_rel = 0.0;
  for (auto [Lambda, P] : {std::pair{1.0, 2.0}, {3.0, 1.0}, {5.0, 2.0},
                           {2.0, 0.7}}) {
    BlockModeSet s = block_modes(Lambda, P);
    worst_rel = std::max(worst_rel,
                         std::abs(s.sum_M2 - 4 * pi * Lambda) / (4 * pi * Lambda));
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "count ok %d/50, worst sum rel err %.2e",
                count_ok, worst_rel);
  msg = buf;
  return count_ok == 50 && worst_rel < 1e-3;
}

bool criterion10(std::string& msg) {
  Grid3D grid = Grid3D::cubic(16, 12.0);
  FieldSpec f = make_linear_A({0, 0, 0.5});
  double worst = 0.0;
  for (int N : {1, 2, 3}) {
    PolaronParams params{N, 1.0, 1.0};
    HartreeState st = random_localized_state(grid, N, 1000 + N);
    worst = std::max(worst, gradient_check(st, params, f, 10, 10 + N));
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "max relative error %.3e", worst);
  msg = buf;
  return worst < 1e-5;
}

bool criterion11(std::string& msg) {
  Grid3D grid = Grid3D::cubic(24, 18.0);
  FieldSpec f = make_zero_field();
  std::vector<double> energies;
  bool converged = true;
  for (int n = 1; n <= 3; ++n) {
    SolveResult r = best_solve(PolaronParams{n, 1.0, 0.1}, f, grid, 11,
                               3e-4, 2000);
    converged = converged && r.converged;
    energies.push_back(r.energy.total);
  }
  SubadditivityGap gap = subadditivity_gap(energies);
  const double tol = 1e-4;  // 2x the solver's energy resolution at this residual
  char buf[96];
  std::snprintf(buf, sizeof buf, "min gap %.3e (tolerance %.0e)", gap.min_gap,
                tol);
  msg = buf;
  return converged && gap.min_gap >= -tol;
}

bool criterion12(std::string& msg) {
  Grid3D grid = Grid3D::cubic(20, 16.0);
  FieldSpec f = make_zero_field();
  SolveConfig sc = solve_config(12, InitKind::GaussianCloud, 1e-4, 1500);

  auto margin_at = [&](double nu) {
    return binding_margin(PolaronParams{2, 1.0, nu}, f, grid, sc);
  };
  BindingReport weak = margin_at(0.1);
  BindingReport strong = margin_at(100.0);
  const double tol = 1e-3;

  // locate the sign change on a coarse nu grid
  std::vector<double> nus = {0.1, 1.0, 3.0, 100.0};
  std::vector<double> margins = {weak.margin};
  double lo = 0.0, hi = 0.0;
  for (std::size_t i = 1; i + 1 < nus.size(); ++i)
    margins.push_back(margin_at(nus[i]).margin);
  margins.push_back(strong.margin);
  for (std::size_t i = 1; i < margins.size(); ++i)
    if (margins[i - 1] > tol && margins[i] <= tol) {
      lo = nus[i - 1];
      hi = nus[i];
      break;
    }
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "margin(0.1) %.4f, margin(100) %.2e, binding lost in nu in "
                "(%g, %g]",
                weak.margin, strong.margin, lo, hi);
  msg = buf;
  return weak.reliable && strong.reliable && weak.margin > 0 &&
         strong.margin <= tol && hi > 0.0;
}

bool criterion13(std::string& msg) {
  double worst = 0.0;
  for (int N : {1, 3, 10}) {
    double lo = 1e300, hi = -1e300;
    for (double a : {1e3, 1e4, 1e5}) {
      ErrorBudget b = theorem1_budget(a, N, 1.0, 1.0);
      double shape = b.total / (std::pow(a, 42.0 / 23.0) * N * N * N);
      lo = std::min(lo, shape);
      hi = std::max(hi, shape);
    }
    worst = std::max(worst, (hi - lo) / lo);
  }
  char buf[128];
  std::snprintf(buf, sizeof buf,
                "max variation of total/(alpha^{42/23} N^3) is %.1f%% "
                "(requirement < 5%%)",
                100 * worst);
  msg = buf;
  return worst < 0.05;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: acceptance <criterion 1..13>\n");
    return 2;
  }
  int c = std::atoi(argv[1]);
  bool (*fns[])(std::string&) = {criterion1, criterion2,  criterion3,
                                 criterion4, criterion5,  criterion6,
                                 criterion7, criterion8,  criterion9,
                                 criterion10, criterion11, criterion12,
                                 criterion13};
  if (c < 1 || c > 13) {
    std::fprintf(stderr, "usage: acceptance <criterion 1..13>\n");
    return 2;
  }
  now_seconds();  // start the wall clock
  std::string msg;
  bool pass = false;
  try {
    pass = fns[c - 1](msg);
  } catch (const std::exception& e) {
    msg = std::string("exception: ") + e.what();
  }
  std::printf("criterion %d: %s — %s\n", c, pass ? "PASS" : "FAIL",
              msg.c_str());
  return pass ? 0 : 1;
}
