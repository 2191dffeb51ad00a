#include "polaron/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace polaron {

namespace {

constexpr double kPi = std::numbers::pi;

int nearest_group(const ClusterLayout& layout, const Vec3& y) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < layout.groups.size(); ++i) {
    double d = group_distance(layout, static_cast<int>(i), y);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

// group index of each particle position (membership in the layout's clusters)
std::vector<int> particle_groups(const ClusterLayout& layout,
                                 std::size_t n_particles) {
  std::vector<int> owner(n_particles, -1);
  for (std::size_t g = 0; g < layout.groups.size(); ++g)
    for (int m : layout.groups[g].members) {
      if (m < 0 || static_cast<std::size_t>(m) >= n_particles)
        throw std::invalid_argument("layout member index out of range");
      owner[m] = static_cast<int>(g);
    }
  for (int o : owner)
    if (o < 0) throw std::invalid_argument("particle not covered by layout");
  return owner;
}

Vec3 layout_centroid(const ClusterLayout& layout) {
  Vec3 c{0, 0, 0};
  for (const auto& g : layout.groups) c = c + g.center;
  return c * (1.0 / double(layout.groups.size()));
}

double layout_scale(const ClusterLayout& layout) {
  double s = 0.0;
  for (const auto& g : layout.groups) s = std::max(s, g.radius);
  Vec3 c = layout_centroid(layout);
  for (const auto& g : layout.groups) s = std::max(s, dist(g.center, c) + g.radius);
  return std::max(s, 1.0);
}

}  // namespace

double localization_penalty(int N, double R) {
  if (N < 1 || R <= 0.0) throw std::domain_error("localization_penalty: bad args");
  return 9.0 * N * kPi * kPi / (4.0 * R * R);
}

InterballPenalty interball_penalty(double alpha, int N,
                                   const ClusterLayout& layout) {
  InterballPenalty out;
  if (layout.groups.size() < 2) {
    out.single_group = true;
    return out;
  }
  double s = 0.0;
  for (const auto& g : layout.groups) {
    if (!(g.separation > 0.0))
      throw std::invalid_argument("interball_penalty: nonpositive separation");
    s += double(g.members.size()) / g.separation;
  }
  out.value = (8.0 * alpha * N / (kPi * kPi)) * s;
  return out;
}

ErrorTermCheck f1_check(double alpha, const ClusterLayout& layout,
                        const std::vector<Vec3>& positions,
                        std::int64_t mc_budget, std::uint64_t seed) {
  ErrorTermCheck out;
  layout.validate(BallLayout{positions, layout.small_radius});
  if (layout.groups.size() < 2) {  // no foreign balls, F1 = 0
    out.pass = true;
    return out;
  }
  const auto owner = particle_groups(layout, positions.size());

  double bound = 0.0;
  for (const auto& g : layout.groups)
    bound += double(g.members.size()) / g.separation;
  bound *= double(positions.size()) * 8.0 * alpha / (kPi * kPi);
  out.bound = bound;

  const double pref = alpha / (kPi * kPi * kPi);
  auto f = [&](const Vec3& y) {
    int i = nearest_group(layout, y);
    double g = 0.0;
    for (std::size_t l = 0; l < positions.size(); ++l)
      if (owner[l] != i) {
        double d2 = dist2(positions[l], y);
        g += 1.0 / d2;
      }
    return pref * g * g;
  };
  HeavyTailSampler sampler{layout_centroid(layout), layout_scale(layout)};
  auto all = [](Vec3) { return true; };
  out.estimate = mc_integrate(f, all, McSampler{sampler}, mc_budget, seed);
  out.pass = out.estimate.mean - 3.0 * out.estimate.std_error <= out.bound;
  return out;
}

ErrorTermCheck f2_check(double alpha, const ClusterLayout& layout,
                        const std::vector<Vec3>& positions,
                        std::int64_t mc_budget, std::uint64_t seed) {
  ErrorTermCheck out;
  layout.validate(BallLayout{positions, layout.small_radius});
  if (layout.groups.size() < 2) {
    out.pass = true;
    return out;
  }
  const auto owner = particle_groups(layout, positions.size());

  double bound = 0.0;
  for (std::size_t s = 0; s < positions.size(); ++s)
    for (std::size_t l = s + 1; l < positions.size(); ++l)
      if (owner[s] != owner[l]) bound += 1.0 / dist(positions[s], positions[l]);
  out.bound = 2.0 * alpha * bound;

  const double pref = 2.0 * alpha / (kPi * kPi * kPi);
  auto f = [&](const Vec3& y) {
    int i = nearest_group(layout, y);
    double own = 0.0, foreign = 0.0;
    for (std::size_t l = 0; l < positions.size(); ++l) {
      double d2 = dist2(positions[l], y);
      if (owner[l] == i)
        own += 1.0 / d2;
      else
        foreign += 1.0 / d2;
    }
    return pref * own * foreign;
  };
  SingularPointsSampler sampler{positions, layout_scale(layout)};
  auto all = [](Vec3) { return true; };
  out.estimate = mc_integrate(f, all, McSampler{sampler}, mc_budget, seed);
  out.pass = out.estimate.mean - 3.0 * out.estimate.std_error <= out.bound;
  return out;
}

CutoffParams CutoffParams::from(double alpha, int N, double Lambda, double P) {
  if (alpha <= 0.0 || N < 1 || Lambda <= 0.0 || P <= 0.0)
    throw std::domain_error("CutoffParams: bad args");
  CutoffParams p;
  p.Lambda = Lambda;
  p.P = P;
  p.beta = 1.0 - 8.0 * alpha * N / (kPi * Lambda);
  return p;
}

CutoffCertificates cutoff_certificates(double alpha, int N, double Lambda,
                                       double eps1, double eps2) {
  if (alpha <= 0.0 || Lambda <= 0.0 || eps1 <= 0.0 || eps2 <= 0.0)
    throw std::domain_error("cutoff_certificates: bad args");
  CutoffCertificates c;
  c.af_term = Lambda * alpha / (kPi * eps1);
  c.ag_number_term = 4.0 * alpha / (eps2 * kPi * Lambda);
  c.ag_const_term = 2.0 * alpha / (eps2 * kPi * Lambda);
  c.beta = 1.0 - 8.0 * alpha * N / (kPi * Lambda);
  c.valid = c.beta > 0.0;
  return c;
}

namespace {

// 4-point Gauss-Legendre on [-1, 1]
constexpr double kGlX[4] = {-0.8611363115940526, -0.3399810435848563,
                            0.3399810435848563, 0.8611363115940526};
constexpr double kGlW[4] = {0.3478548451374538, 0.6521451548625461,
                            0.6521451548625461, 0.3478548451374538};

double box_min_r2(const Vec3& lo, const Vec3& hi) {
  double r2 = 0.0;
  for (int a = 0; a < 3; ++a) {
    double t = std::max({lo[a], -hi[a], 0.0});
    r2 += t * t;
  }
  return r2;
}

double box_max_r2(const Vec3& lo, const Vec3& hi) {
  double r2 = 0.0;
  for (int a = 0; a < 3; ++a) {
    double t = std::max(std::abs(lo[a]), std::abs(hi[a]));
    r2 += t * t;
  }
  return r2;
}

double gl_box(const Vec3& lo, const Vec3& hi, double Lambda2, bool clip) {
  double hx = 0.5 * (hi[0] - lo[0]), cx = 0.5 * (hi[0] + lo[0]);
  double hy = 0.5 * (hi[1] - lo[1]), cy = 0.5 * (hi[1] + lo[1]);
  double hz = 0.5 * (hi[2] - lo[2]), cz = 0.5 * (hi[2] + lo[2]);
  double s = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) {
        double x = cx + hx * kGlX[i], y = cy + hy * kGlX[j],
               z = cz + hz * kGlX[k];
        double r2 = x * x + y * y + z * z;
        if (clip && r2 > Lambda2) continue;
        s += kGlW[i] * kGlW[j] * kGlW[k] / r2;
      }
  return s * hx * hy * hz;
}

// box away from the origin, cut to the ball; subdivides while it straddles
// the ball boundary, falling back to a clipped rule at the depth limit
double box_integral(const Vec3& lo, const Vec3& hi, double Lambda2, int depth) {
  if (box_min_r2(lo, hi) >= Lambda2) return 0.0;
  if (box_max_r2(lo, hi) <= Lambda2) return gl_box(lo, hi, Lambda2, false);
  if (depth == 0) return gl_box(lo, hi, Lambda2, true);
  Vec3 mid{0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1]), 0.5 * (lo[2] + hi[2])};
  double s = 0.0;
  for (int mask = 0; mask < 8; ++mask) {
    Vec3 slo = lo, shi = hi;
    for (int a = 0; a < 3; ++a) {
      if (mask & (1 << a))
        slo[a] = mid[a];
      else
        shi[a] = mid[a];
    }
    s += box_integral(slo, shi, Lambda2, depth - 1);
  }
  return s;
}

// box [0, hi] with the singularity at the origin corner; geometric refinement
// toward the corner, the innermost sliver (size ~ 2^-depth) is dropped
double origin_corner(const Vec3& hi, double Lambda2, int depth,
                     int boundary_depth) {
  if (depth == 0) return 0.0;
  Vec3 mid{0.5 * hi[0], 0.5 * hi[1], 0.5 * hi[2]};
  double s = origin_corner(mid, Lambda2, depth - 1, boundary_depth);
  for (int mask = 1; mask < 8; ++mask) {
    Vec3 blo{0, 0, 0}, bhi = hi;
    for (int a = 0; a < 3; ++a) {
      if (mask & (1 << a))
        blo[a] = mid[a];
      else
        bhi[a] = mid[a];
    }
    s += box_integral(blo, bhi, Lambda2, boundary_depth);
  }
  return s;
}

// integral of |k|^-2 over box cut to the ball of radius sqrt(Lambda2),
// recursive in both the ball boundary and the origin singularity
double cell_integral(const Vec3& lo, const Vec3& hi, double Lambda2,
                     int boundary_depth, int origin_depth) {
  double rmin2 = box_min_r2(lo, hi);
  if (rmin2 >= Lambda2) return 0.0;
  double rmax2 = box_max_r2(lo, hi);
  bool straddles = rmax2 > Lambda2;

  bool contains_origin = true;
  for (int a = 0; a < 3; ++a)
    if (lo[a] > 0.0 || hi[a] < 0.0) contains_origin = false;

  if (contains_origin) {
    // split at the origin; the integrand is reflection symmetric, so each
    // piece maps into the positive octant with the singularity at its corner
    double total = 0.0;
    for (int mask = 0; mask < 8; ++mask) {
      Vec3 ref_hi;
      bool empty = false;
      for (int a = 0; a < 3; ++a) {
        double ext = (mask & (1 << a)) ? hi[a] : -lo[a];
        if (ext <= 0.0) empty = true;
        ref_hi[a] = ext;
      }
      if (empty) continue;
      total += origin_corner(ref_hi, Lambda2, origin_depth, boundary_depth);
    }
    return total;
  }

  (void)straddles;
  return box_integral(lo, hi, Lambda2, boundary_depth);
}

}  // namespace

BlockModeSet block_modes(double Lambda, double P, int depth) {
  if (Lambda <= 0.0 || P <= 0.0 || P > 2.0 * Lambda)
    throw std::domain_error("block_modes: require 0 < P <= 2 Lambda");
  BlockModeSet out;
  double cb = 2.0 * Lambda / P + 1.0;
  out.count_bound = cb * cb * cb;
  const double Lambda2 = Lambda * Lambda;
  const int nmax = static_cast<int>(std::floor(Lambda / P + 0.5)) + 1;
  for (int nx = -nmax; nx <= nmax; ++nx)
    for (int ny = -nmax; ny <= nmax; ++ny)
      for (int nz = -nmax; nz <= nmax; ++nz) {
        Vec3 lo{(nx - 0.5) * P, (ny - 0.5) * P, (nz - 0.5) * P};
        Vec3 hi{(nx + 0.5) * P, (ny + 0.5) * P, (nz + 0.5) * P};
        if (box_min_r2(lo, hi) >= Lambda2) continue;
        double m2 = cell_integral(lo, hi, Lambda2, depth, 34);
        if (m2 <= 0.0) continue;
        BlockMode bm;
        bm.n = {nx, ny, nz};
        bm.M_n = std::sqrt(m2);
        bm.cell_lo = lo;
        bm.cell_hi = hi;
        out.sum_M2 += m2;
        out.modes.push_back(bm);
      }
  return out;
}

ErrorBudget theorem1_budget_at_R(double alpha, int N, double c_AV,
                                 double C_interball, double R) {
  if (alpha <= 0.0 || N < 1 || R <= 0.0)
    throw std::domain_error("theorem1_budget: bad args");
  ErrorBudget b;
  b.alpha = alpha;
  b.N = N;
  b.R = R;
  b.Lambda = N * std::pow(alpha, 27.0 / 23.0);
  b.P = std::pow(alpha, 13.0 / 23.0);
  b.beta = 1.0 - 8.0 * alpha * N / (kPi * b.Lambda);
  if (b.beta <= 0.0)
    throw std::domain_error("theorem1_budget: beta <= 0, cutoff too small");
  b.c_AV = c_AV;
  b.C_interball = C_interball;

  b.localization = localization_penalty(N, R);
  b.interball = C_interball * alpha * double(N) * double(N) / R;
  b.cutoff_half = 0.5;
  double cb = 2.0 * b.Lambda / b.P + 1.0;
  b.blockmode_count_term = cb * cb * cb;
  b.corollary_r2_term =
      3.0 * R * R * std::pow(alpha, 80.0 / 23.0) * std::pow(double(N), 5);
  b.corollary_c_term = c_AV * std::pow(alpha, 42.0 / 23.0) * std::pow(double(N), 3);
  b.total = b.localization + b.interball + b.cutoff_half +
            b.blockmode_count_term + b.corollary_r2_term + b.corollary_c_term;
  return b;
}

ErrorBudget theorem1_budget(double alpha, int N, double c_AV,
                            double C_interball,
                            bool include_block_intermediate) {
  double R = std::pow(alpha, -19.0 / 23.0) / double(N);
  ErrorBudget b = theorem1_budget_at_R(alpha, N, c_AV, C_interball, R);
  if (include_block_intermediate) {
    double r = 0.5 * (3.0 * N - 1.0) * R;
    b.block_intermediate = 6.0 * double(N) * double(N) * alpha * b.P * b.P * r *
                           r * b.Lambda / ((1.0 - b.beta) * kPi);
    b.total += b.block_intermediate;
  }
  return b;
}

double hardy_lower_bound(int N, double eps, double C_eps) {
  if (N < 1 || eps <= 0.0 || eps >= 1.0 || C_eps < 0.0)
    throw std::domain_error("hardy_lower_bound: bad args");
  double n = double(N);
  return -n * n * n / (1.0 - eps) - C_eps * n;
}

HartreeState rescale_state(const HartreeState& state, double alpha) {
  if (alpha <= 0.0) throw std::domain_error("rescale_state: alpha <= 0");
  HartreeState out;
  double amp = std::pow(alpha, 1.5);
  for (const auto& orb : state.orbitals) {
    GridFunction g;
    g.grid = orb.grid;
    for (int a = 0; a < 3; ++a) g.grid.box[a] = orb.grid.box[a] / alpha;
    for (int a = 0; a < 3; ++a) g.grid.origin[a] = orb.grid.origin[a] / alpha;
    g.values.resize(orb.values.size());
    for (std::size_t i = 0; i < orb.values.size(); ++i)
      g.values[i] = amp * orb.values[i];
    out.orbitals.push_back(std::move(g));
  }
  return out;
}

double scaling_identity_check(const FieldSpec& fields,
                              const PolaronParams& params,
                              const HartreeState& state, double alpha) {
  EnergyReport base = pekar_energy(state, params, fields, kEnergyKernel);

  FieldSpec scaled_fields = scale_fields(fields, alpha).fold();
  PolaronParams scaled = params;
  scaled.alpha = params.alpha * alpha;  // nu fixed, so U scales by alpha too
  HartreeState sstate = rescale_state(state, alpha);
  EnergyReport sc = pekar_energy(sstate, scaled, scaled_fields, kEnergyKernel);

  double a2 = alpha * alpha;
  auto rel = [&](double got, double want) {
    double scale = std::max({std::abs(want), std::abs(got), 1e-300});
    return std::abs(got - want) / scale;
  };
  double dev = 0.0;
  dev = std::max(dev, rel(sc.kinetic, a2 * base.kinetic));
  dev = std::max(dev, rel(sc.external, a2 * base.external));
  dev = std::max(dev, rel(params.N > 1 ? sc.repulsion * scaled.U()
                                       : 0.0,
                          params.N > 1 ? a2 * base.repulsion * params.U() : 0.0));
  dev = std::max(dev, rel(sc.self_interaction * scaled.alpha,
                          a2 * base.self_interaction * params.alpha));
  dev = std::max(dev, rel(sc.total, a2 * base.total));
  return dev;
}

}  // namespace polaron
