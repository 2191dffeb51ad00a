// polaron-cli: config-driven frontend for solves, scans, binding analyses,
// and certificate tables. See README for the config schema.

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include "polaron/certificates.hpp"
#include "polaron/serialize.hpp"
#include "polaron/solver.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace polaron;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr double kPi = 3.14159265358979323846;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void atomic_write(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw NumericFailure("cannot open " + tmp.string());
    os << content;
  }
  fs::rename(tmp, path);
}

void write_json(const fs::path& path, const json& j) {
  atomic_write(path, j.dump(2) + "\n");
}

std::string csv_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename T>
T get_or(const json& j, const char* key, T def) {
  if (!j.contains(key)) return def;
  return j.at(key).get<T>();
}

PolaronParams parse_params(const json& cfg) {
  if (!cfg.contains("params")) throw ConfigError("config: missing \"params\"");
  const json& p = cfg.at("params");
  PolaronParams out;
  out.N = get_or(p, "N", 1);
  out.alpha = get_or(p, "alpha", 1.0);
  out.nu = get_or(p, "nu", 0.0);
  try {
    out.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: params: ") + e.what());
  }
  return out;
}

Grid3D parse_grid(const json& cfg) {
  if (!cfg.contains("grid")) throw ConfigError("config: missing \"grid\"");
  const json& g = cfg.at("grid");
  Grid3D grid = Grid3D::cubic(get_or(g, "n", 32), get_or(g, "box", 16.0));
  try {
    grid.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: grid: ") + e.what());
  }
  return grid;
}

FieldSpec parse_field(const json& cfg) {
  if (!cfg.contains("field")) return make_zero_field();
  const json& f = cfg.at("field");
  std::string preset = get_or<std::string>(f, "preset", "zero");
  if (preset == "zero") return make_zero_field();
  if (preset == "linearA") {
    auto b = f.at("B").get<std::vector<double>>();
    if (b.size() != 3) throw ConfigError("config: field.B needs 3 components");
    return make_linear_A({b[0], b[1], b[2]});
  }
  if (preset == "periodicV") {
    auto w = f.at("period").get<std::vector<double>>();
    if (w.size() != 3) throw ConfigError("config: field.period needs 3 components");
    return make_periodic_V({w[0], w[1], w[2]}, f.at("amplitude").get<double>());
  }
  if (preset == "sampled") {
    std::string file = f.at("file").get<std::string>();
    if (!fs::exists(file)) throw ConfigError("config: field.file not found: " + file);
    LoadedGridData d = load_grid_data(file);
    if (d.ncomp != 4)
      throw ConfigError("config: sampled field file must hold 4 components (Ax,Ay,Az,V)");
    SampledField s;
    s.grid = d.grid;
    std::size_t npts = d.grid.size();
    for (int c = 0; c < 3; ++c) s.A[c].resize(npts);
    s.V.resize(npts);
    for (std::size_t i = 0; i < npts; ++i) {
      for (int c = 0; c < 3; ++c) s.A[c][i] = d.data[4 * i + c];
      s.V[i] = d.data[4 * i + 3];
    }
    FieldSpec spec;
    spec.kind = std::move(s);
    return spec;
  }
  throw ConfigError("config: unknown field preset \"" + preset + "\"");
}

SolveConfig parse_solver(const json& cfg, std::uint64_t seed) {
  SolveConfig sc;
  sc.seed = seed;
  if (cfg.contains("solver")) {
    const json& s = cfg.at("solver");
    sc.max_iters = get_or(s, "max_iters", sc.max_iters);
    sc.step = get_or(s, "step", sc.step);
    sc.tol_residual = get_or(s, "tol_residual", sc.tol_residual);
    sc.tol_energy = get_or(s, "tol_energy", sc.tol_energy);
    sc.separation = get_or(s, "separation", sc.separation);
    sc.init_file = get_or<std::string>(s, "init_file", "");
    std::string init = get_or<std::string>(s, "init", "gaussian");
    if (init == "gaussian")
      sc.init = InitKind::GaussianCloud;
    else if (init == "separated")
      sc.init = InitKind::SeparatedCopies;
    else if (init == "file")
      sc.init = InitKind::FromFile;
    else
      throw ConfigError("config: solver.init must be gaussian|separated|file");
    if (sc.init == InitKind::FromFile && !fs::exists(sc.init_file))
      throw ConfigError("config: solver.init_file not found: " + sc.init_file);
  }
  try {
    sc.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: solver: ") + e.what());
  }
  return sc;
}

json result_shell(const json& cfg, std::uint64_t seed) {
  return {{"version", kVersion}, {"seed", seed}, {"config", cfg}};
}

// density centroid of one orbital (for the inter-cluster distance report)
Vec3 orbital_centroid(const GridFunction& phi) {
  Vec3 c{0, 0, 0};
  double mass = 0;
  const Grid3D& g = phi.grid;
  for (int ix = 0; ix < g.n[0]; ++ix)
    for (int iy = 0; iy < g.n[1]; ++iy)
      for (int iz = 0; iz < g.n[2]; ++iz) {
        double w = std::norm(phi.values[g.index(ix, iy, iz)]);
        c = c + w * g.coord(ix, iy, iz);
        mass += w;
      }
  return c / mass;
}

// deterministic normalized random state, for the scaling check
HartreeState random_state(const Grid3D& grid, int N, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  HartreeState st;
  double L = std::min({grid.box[0], grid.box[1], grid.box[2]});
  for (int j = 0; j < N; ++j) {
    GridFunction f(grid);
    Vec3 c{0.1 * L * gauss(rng), 0.1 * L * gauss(rng), 0.1 * L * gauss(rng)};
    double w = L / 10.0 * (1.0 + 0.3 * std::abs(gauss(rng)));
    for (int ix = 0; ix < grid.n[0]; ++ix)
      for (int iy = 0; iy < grid.n[1]; ++iy)
        for (int iz = 0; iz < grid.n[2]; ++iz) {
          Vec3 x = grid.coord(ix, iy, iz);
          double r2 = dist2(x, c);
          f.values[grid.index(ix, iy, iz)] =
              std::exp(-r2 / (2 * w * w)) * (1.0 + 0.1 * std::cos(x.x));
        }
    st.orbitals.push_back(std::move(f));
  }
  st.normalize();
  return st;
}

// --- commands ---------------------------------------------------------------

int cmd_solve(const json& cfg, std::uint64_t seed, const fs::path& out) {
  PolaronParams params = parse_params(cfg);
  Grid3D grid = parse_grid(cfg);
  FieldSpec field = parse_field(cfg);
  SolveConfig sc = parse_solver(cfg, seed);

  SolveResult r = minimize(params, field, grid, sc);

  json j = result_shell(cfg, seed);
  j["result"] = solve_summary(r);
  j["coulomb_image_bias"] = coulomb_image_bias(grid, params.N, kEnergyKernel);
  write_json(out / "result.json", j);

  std::ostringstream csv;
  csv << "iter,energy\n";
  for (std::size_t i = 0; i < r.energy_trace.size(); ++i)
    csv << i << "," << csv_num(r.energy_trace[i]) << "\n";
  atomic_write(out / "trace.csv", csv.str());
  save_state((out / "state.bin").string(), r.state);

  if (!r.converged && !r.no_binding_without_coupling)
    throw NumericFailure("solver did not converge; artifacts written");
  return 0;
}

int cmd_scan_alpha(const json& cfg, std::uint64_t seed, const fs::path& out,
                   int threads) {
  PolaronParams params = parse_params(cfg);
  Grid3D grid = parse_grid(cfg);
  FieldSpec field = parse_field(cfg);
  SolveConfig sc = parse_solver(cfg, seed);
  auto alphas = get_or(cfg, "alpha_grid", std::vector<double>{1.0, 2.0, 4.0});
  if (alphas.empty()) throw ConfigError("config: alpha_grid is empty");

  struct Row {
    double alpha, total, ratio;
    bool converged;
    int iterations;
  };
  std::vector<Row> rows(alphas.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < alphas.size();) {
      PolaronParams p = params;
      p.alpha = alphas[i];
      SolveResult r = minimize(p, field, grid, sc);
      rows[i] = {alphas[i], r.energy.total, r.energy.total / (alphas[i] * alphas[i]),
                 r.converged, r.iterations};
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::ostringstream csv;
  csv << "alpha,total,total_over_alpha2,converged,iterations\n";
  json table = json::array();
  for (const Row& r : rows) {
    csv << csv_num(r.alpha) << "," << csv_num(r.total) << "," << csv_num(r.ratio)
        << "," << (r.converged ? 1 : 0) << "," << r.iterations << "\n";
    table.push_back({{"alpha", r.alpha},
                     {"total", r.total},
                     {"total_over_alpha2", r.ratio},
                     {"converged", r.converged},
                     {"iterations", r.iterations}});
  }
  atomic_write(out / "scan.csv", csv.str());
  json j = result_shell(cfg, seed);
  j["scan"] = table;
  write_json(out / "result.json", j);
  return 0;
}

int cmd_binding(const json& cfg, std::uint64_t seed, const fs::path& out,
                int threads) {
  PolaronParams params = parse_params(cfg);
  Grid3D grid = parse_grid(cfg);
  FieldSpec field = parse_field(cfg);
  SolveConfig sc = parse_solver(cfg, seed);
  auto nus =
      get_or(cfg, "nu_grid", std::vector<double>{0.0, 1.0, 2.0, 2.2, 3.0, 10.0});
  if (nus.empty()) throw ConfigError("config: nu_grid is empty");

  struct Row {
    double nu;
    BindingReport rep;
    double inter_cluster_term = 0.0;  // (U - 2 alpha) sum 1/d, only for nu < 2
  };
  std::vector<Row> rows(nus.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < nus.size();) {
      PolaronParams p = params;
      p.nu = nus[i];
      Row row;
      row.nu = nus[i];
      row.rep = binding_margin(p, field, grid, sc);
      if (p.nu < 2.0 && p.N > 1) {
        SolveResult full = minimize(p, field, grid, sc);
        std::vector<Vec3> cs;
        for (const auto& orb : full.state.orbitals)
          cs.push_back(orbital_centroid(orb));
        double s = 0.0;
        for (std::size_t a = 0; a < cs.size(); ++a)
          for (std::size_t b = a + 1; b < cs.size(); ++b) {
            double d = dist(cs[a], cs[b]);
            if (d > 1e-9) s += 1.0 / d;
          }
        row.inter_cluster_term = (p.U() - 2.0 * p.alpha) * s;
      }
      rows[i] = std::move(row);
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::ostringstream csv;
  csv << "nu,margin,reliable,energy_N,inter_cluster_term\n";
  json table = json::array();
  json sign_changes = json::array();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Row& r = rows[i];
    csv << csv_num(r.nu) << "," << csv_num(r.rep.margin) << ","
        << (r.rep.reliable ? 1 : 0) << "," << csv_num(r.rep.energy_N) << ","
        << csv_num(r.inter_cluster_term) << "\n";
    json e = {{"nu", r.nu}, {"report", r.rep}};
    if (r.nu < 2.0 && params.N > 1)
      e["inter_cluster_term"] = r.inter_cluster_term;
    table.push_back(e);
    if (i > 0 && (rows[i - 1].rep.margin > 0) != (r.rep.margin > 0))
      sign_changes.push_back({{"nu_lo", rows[i - 1].nu}, {"nu_hi", r.nu}});
  }
  atomic_write(out / "binding.csv", csv.str());
  json j = result_shell(cfg, seed);
  j["binding"] = table;
  j["sign_changes"] = sign_changes;
  write_json(out / "result.json", j);
  return 0;
}

int cmd_verify_scaling(const json& cfg, std::uint64_t seed, const fs::path& out) {
  PolaronParams params = parse_params(cfg);
  Grid3D grid = parse_grid(cfg);
  FieldSpec field = parse_field(cfg);
  if (field.is_sampled())
    throw ConfigError("config: verify-scaling needs an analytic field preset");
  auto alphas = get_or(cfg, "alpha_grid", std::vector<double>{2.0, 3.0, 10.0});
  double tol = get_or(cfg, "tolerance", 1e-12);

  HartreeState rnd = random_state(grid, params.N, seed);
  SolveConfig sc = parse_solver(cfg, seed);
  SolveResult minimized = minimize(params, field, grid, sc);

  json table = json::array();
  double worst = 0.0;
  for (double a : alphas) {
    double d_rand = scaling_identity_check(field, params, rnd, a);
    double d_min = scaling_identity_check(field, params, minimized.state, a);
    worst = std::max({worst, d_rand, d_min});
    table.push_back({{"alpha", a},
                     {"deviation_random_state", d_rand},
                     {"deviation_minimizer", d_min}});
  }
  json j = result_shell(cfg, seed);
  j["scaling"] = table;
  j["max_deviation"] = worst;
  j["tolerance"] = tol;
  j["pass"] = worst < tol;
  write_json(out / "result.json", j);
  if (worst >= tol)
    throw NumericFailure("scaling identity deviation " + std::to_string(worst));
  return 0;
}

int cmd_bounds_table(const json& cfg, std::uint64_t seed, const fs::path& out) {
  auto N_list = get_or(cfg, "N_list", std::vector<int>{1, 3, 10});
  auto alphas = get_or(cfg, "alpha_grid", std::vector<double>{1e3, 1e4, 1e5});
  double c_AV = get_or(cfg, "c_AV", 1.0);
  double C_ib = get_or(cfg, "C_interball", 1.0);
  bool block_item = get_or(cfg, "include_block_intermediate", false);

  std::ostringstream csv;
  csv << "N,alpha,R,Lambda,P,beta,localization,interball,cutoff_half,"
         "blockmode_count_term,corollary_r2_term,corollary_c_term,"
         "block_intermediate,total,total_over_shape\n";
  json table = json::array();
  for (int N : N_list)
    for (double a : alphas) {
      ErrorBudget b = theorem1_budget(a, N, c_AV, C_ib, block_item);
      double shape = std::pow(a, 42.0 / 23.0) * N * N * N;
      csv << N << "," << csv_num(a) << "," << csv_num(b.R) << ","
          << csv_num(b.Lambda) << "," << csv_num(b.P) << "," << csv_num(b.beta)
          << "," << csv_num(b.localization) << "," << csv_num(b.interball) << ","
          << csv_num(b.cutoff_half) << "," << csv_num(b.blockmode_count_term)
          << "," << csv_num(b.corollary_r2_term) << ","
          << csv_num(b.corollary_c_term) << "," << csv_num(b.block_intermediate)
          << "," << csv_num(b.total) << "," << csv_num(b.total / shape) << "\n";
      json e = b;
      e["total_over_shape"] = b.total / shape;
      table.push_back(e);
    }
  atomic_write(out / "bounds.csv", csv.str());
  json j = result_shell(cfg, seed);
  j["bounds"] = table;
  write_json(out / "result.json", j);
  return 0;
}

int cmd_geometry_check(const json& cfg, std::uint64_t seed, const fs::path& out) {
  int instances = get_or(cfg, "instances", 1000);
  int max_N = get_or(cfg, "max_N", 12);
  if (instances < 1 || max_N < 1) throw ConfigError("config: bad geometry-check sizes");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-10.0, 10.0);
  std::uniform_int_distribution<int> nd(1, max_N);
  std::uniform_real_distribution<double> rd(0.05, 2.0);

  int failures = 0;
  std::string first_error;
  for (int t = 0; t < instances; ++t) {
    BallLayout bl;
    bl.small_radius = rd(rng);
    int N = nd(rng);
    for (int k = 0; k < N; ++k)
      bl.centers.push_back({uni(rng), uni(rng), uni(rng)});
    try {
      ClusterLayout cl = regroup_balls(bl);
      cl.validate(bl);
    } catch (const std::exception& e) {
      ++failures;
      if (first_error.empty()) first_error = e.what();
    }
  }
  json j = result_shell(cfg, seed);
  j["instances"] = instances;
  j["failures"] = failures;
  if (!first_error.empty()) j["first_error"] = first_error;
  j["pass"] = failures == 0;
  write_json(out / "result.json", j);
  if (failures > 0)
    throw NumericFailure("geometry invariant violated in " +
                         std::to_string(failures) + " instances");
  return 0;
}

int cmd_mc_check(const json& cfg, std::uint64_t seed, const fs::path& out) {
  std::int64_t samples = get_or<std::int64_t>(cfg, "samples", 1000000);
  auto dvals = get_or(cfg, "d_values", std::vector<double>{0.5, 1.0, 2.0, 5.0});

  json table = json::array();
  bool all_pass = true;
  for (std::size_t i = 0; i < dvals.size(); ++i) {
    double d = dvals[i];
    // integral of |y|^-4 over |y| > d/2 equals 8 pi / d
    auto f = [](Vec3 y) {
      double r2 = dot(y, y);
      return 1.0 / (r2 * r2);
    };
    auto region = [d](Vec3 y) { return dot(y, y) > d * d / 4.0; };
    McEstimate e = mc_integrate(f, region, McSampler{HeavyTailSampler{{0, 0, 0}, d}},
                                samples, seed + i);
    double exact = 8.0 * kPi / d;
    bool pass = std::abs(e.mean - exact) <= 3.0 * e.std_error;
    all_pass = all_pass && pass;
    table.push_back({{"identity", "8pi_over_d"},
                     {"d", d},
                     {"estimate", e},
                     {"exact", exact},
                     {"pass", pass}});
  }
  std::vector<double> seps = {0.5, 1.0, 2.0, 5.0};
  for (std::size_t i = 0; i < seps.size(); ++i) {
    // integral of |a-y|^-2 |b-y|^-2 over R^3 equals pi^3 / |a-b|
    Vec3 a{0, 0, 0}, b{seps[i], 0, 0};
    auto f = [a, b](Vec3 y) { return 1.0 / (dist2(a, y) * dist2(b, y)); };
    auto all = [](Vec3) { return true; };
    McEstimate e = mc_integrate(
        f, all, McSampler{SingularPointsSampler{{a, b}, seps[i]}}, samples,
        seed + 100 + i);
    double exact = kPi * kPi * kPi / seps[i];
    bool pass = std::abs(e.mean - exact) <= 3.0 * e.std_error;
    all_pass = all_pass && pass;
    table.push_back({{"identity", "pi3_over_dist"},
                     {"dist", seps[i]},
                     {"estimate", e},
                     {"exact", exact},
                     {"pass", pass}});
  }
  json j = result_shell(cfg, seed);
  j["checks"] = table;
  j["pass"] = all_pass;
  write_json(out / "result.json", j);
  if (!all_pass) throw NumericFailure("an MC identity check fell outside 3 sigma");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pekar-Tomasevich N-polaron toolbox"};
  std::string config_path, command_override, out_override;
  std::int64_t seed_flag = -1;
  int threads = 1;
  app.add_option("command", command_override,
                 "solve|scan-alpha|binding|verify-scaling|bounds-table|"
                 "geometry-check|mc-check (overrides config)");
  app.add_option("--config", config_path, "JSON run config")->required();
  app.add_option("--seed", seed_flag, "override config seed");
  app.add_option("--out", out_override, "override output directory");
  app.add_option("--threads", threads, "worker threads for scans")
      ->check(CLI::Range(1, 256));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    std::ifstream is(config_path);
    if (!is) throw ConfigError("cannot open config: " + config_path);
    json cfg;
    try {
      cfg = json::parse(is);
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }

    std::string command = command_override.empty()
                              ? get_or<std::string>(cfg, "command", "")
                              : command_override;
    if (command.empty()) throw ConfigError("config: missing \"command\"");
    std::uint64_t seed =
        seed_flag >= 0 ? std::uint64_t(seed_flag) : get_or<std::uint64_t>(cfg, "seed", 0);
    std::string out_dir =
        !out_override.empty() ? out_override : get_or<std::string>(cfg, "out", ".");
    fs::create_directories(out_dir);
    fs::path out(out_dir);
    cfg["command"] = command;
    cfg["seed"] = seed;
    cfg["out"] = out_dir;

    if (command == "solve") return cmd_solve(cfg, seed, out);
    if (command == "scan-alpha") return cmd_scan_alpha(cfg, seed, out, threads);
    if (command == "binding") return cmd_binding(cfg, seed, out, threads);
    if (command == "verify-scaling") return cmd_verify_scaling(cfg, seed, out);
    if (command == "bounds-table") return cmd_bounds_table(cfg, seed, out);
    if (command == "geometry-check") return cmd_geometry_check(cfg, seed, out);
    if (command == "mc-check") return cmd_mc_check(cfg, seed, out);
    throw ConfigError("config: unknown command \"" + command + "\"");
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 2;
  }
}
