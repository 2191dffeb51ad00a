#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "polaron/certificates.hpp"
#include "polaron/solver.hpp"

namespace py = pybind11;
using namespace polaron;

namespace {

Vec3 to_vec3(const std::array<double, 3>& a) { return {a[0], a[1], a[2]}; }

std::array<double, 3> from_vec3(const Vec3& v) { return {v.x, v.y, v.z}; }

FieldSpec field_from_args(const std::string& preset,
                          const std::array<double, 3>& B, double amplitude,
                          const std::array<double, 3>& period) {
  if (preset == "zero") return make_zero_field();
  if (preset == "linearA") return make_linear_A(to_vec3(B));
  if (preset == "periodicV") return make_periodic_V(to_vec3(period), amplitude);
  throw std::invalid_argument("field preset must be zero|linearA|periodicV");
}

HartreeState state_from_arrays(const Grid3D& grid,
                               const std::vector<py::array_t<std::complex<double>>>& orbitals) {
  HartreeState st;
  for (const auto& arr : orbitals) {
    if (arr.ndim() != 3 || arr.shape(0) != grid.n[0] ||
        arr.shape(1) != grid.n[1] || arr.shape(2) != grid.n[2])
      throw std::invalid_argument("orbital array shape must match the grid");
    GridFunction f(grid);
    auto r = arr.unchecked<3>();
    for (int ix = 0; ix < grid.n[0]; ++ix)
      for (int iy = 0; iy < grid.n[1]; ++iy)
        for (int iz = 0; iz < grid.n[2]; ++iz)
          f.values[grid.index(ix, iy, iz)] = r(ix, iy, iz);
    st.orbitals.push_back(std::move(f));
  }
  return st;
}

py::array_t<std::complex<double>> orbital_to_array(const GridFunction& f) {
  const Grid3D& g = f.grid;
  py::array_t<std::complex<double>> out({g.n[0], g.n[1], g.n[2]});
  auto w = out.mutable_unchecked<3>();
  for (int ix = 0; ix < g.n[0]; ++ix)
    for (int iy = 0; iy < g.n[1]; ++iy)
      for (int iz = 0; iz < g.n[2]; ++iz)
        w(ix, iy, iz) = f.values[g.index(ix, iy, iz)];
  return out;
}

}  // namespace

PYBIND11_MODULE(_polaron, m) {
  m.doc() = "Pekar-Tomasevich N-polaron toolbox";

  py::class_<Grid3D>(m, "Grid3D")
      .def_static("cubic", &Grid3D::cubic, py::arg("n"), py::arg("box"))
      .def_readonly("n", &Grid3D::n)
      .def_readonly("box", &Grid3D::box)
      .def("spacing", &Grid3D::spacing)
      .def("size", &Grid3D::size);

  py::class_<PolaronParams>(m, "PolaronParams")
      .def(py::init([](int N, double alpha, double nu) {
             PolaronParams p{N, alpha, nu};
             p.validate();
             return p;
           }),
           py::arg("N"), py::arg("alpha"), py::arg("nu") = 0.0)
      .def_readwrite("N", &PolaronParams::N)
      .def_readwrite("alpha", &PolaronParams::alpha)
      .def_readwrite("nu", &PolaronParams::nu)
      .def_property_readonly("U", &PolaronParams::U);

  py::class_<EnergyReport>(m, "EnergyReport")
      .def_readonly("kinetic", &EnergyReport::kinetic)
      .def_readonly("external", &EnergyReport::external)
      .def_readonly("repulsion", &EnergyReport::repulsion)
      .def_readonly("self_interaction", &EnergyReport::self_interaction)
      .def_readonly("total", &EnergyReport::total)
      .def_readonly("per_orbital_kinetic", &EnergyReport::per_orbital_kinetic)
      .def_readonly("per_orbital_external", &EnergyReport::per_orbital_external);

  py::class_<FieldSpec>(m, "FieldSpec");
  m.def("make_field", &field_from_args, py::arg("preset") = "zero",
        py::arg("B") = std::array<double, 3>{0, 0, 0},
        py::arg("amplitude") = 0.0,
        py::arg("period") = std::array<double, 3>{1, 1, 1});

  py::class_<HartreeState>(m, "HartreeState")
      .def(py::init(&state_from_arrays), py::arg("grid"), py::arg("orbitals"))
      .def_property_readonly("N", &HartreeState::N)
      .def("normalize", &HartreeState::normalize)
      .def("orbital",
           [](const HartreeState& st, int j) {
             return orbital_to_array(st.orbitals.at(j));
           },
           py::arg("j"));

  m.def("pekar_energy",
        [](const HartreeState& st, const PolaronParams& p, const FieldSpec& f) {
          return pekar_energy(st, p, f, kEnergyKernel);
        },
        py::arg("state"), py::arg("params"), py::arg("field"));

  py::class_<SolveResult>(m, "SolveResult")
      .def_readonly("energy", &SolveResult::energy)
      .def_readonly("state", &SolveResult::state)
      .def_readonly("iterations", &SolveResult::iterations)
      .def_readonly("residual", &SolveResult::residual)
      .def_readonly("converged", &SolveResult::converged)
      .def_readonly("energy_trace", &SolveResult::energy_trace)
      .def_readonly("no_binding_without_coupling",
                    &SolveResult::no_binding_without_coupling);

  m.def("minimize",
        [](const PolaronParams& p, const FieldSpec& f, const Grid3D& g,
           int max_iters, double tol_residual, std::uint64_t seed,
           const std::string& init, double separation) {
          SolveConfig sc;
          sc.max_iters = max_iters;
          sc.tol_residual = tol_residual;
          sc.seed = seed;
          sc.separation = separation;
          if (init == "gaussian")
            sc.init = InitKind::GaussianCloud;
          else if (init == "separated")
            sc.init = InitKind::SeparatedCopies;
          else
            throw std::invalid_argument("init must be gaussian|separated");
          return minimize(p, f, g, sc);
        },
        py::arg("params"), py::arg("field"), py::arg("grid"),
        py::arg("max_iters") = 2000, py::arg("tol_residual") = 1e-6,
        py::arg("seed") = 0, py::arg("init") = "gaussian",
        py::arg("separation") = 8.0);

  py::class_<BindingSplit>(m, "BindingSplit")
      .def_readonly("k", &BindingSplit::k)
      .def_readonly("energy_k", &BindingSplit::energy_k)
      .def_readonly("energy_rest", &BindingSplit::energy_rest)
      .def_readonly("converged", &BindingSplit::converged);

  py::class_<BindingReport>(m, "BindingReport")
      .def_readonly("margin", &BindingReport::margin)
      .def_readonly("reliable", &BindingReport::reliable)
      .def_readonly("energy_N", &BindingReport::energy_N)
      .def_readonly("splits", &BindingReport::splits);

  m.def("binding_margin",
        [](const PolaronParams& p, const FieldSpec& f, const Grid3D& g,
           std::uint64_t seed, int max_iters, double tol_residual) {
          SolveConfig sc;
          sc.seed = seed;
          sc.max_iters = max_iters;
          sc.tol_residual = tol_residual;
          return binding_margin(p, f, g, sc);
        },
        py::arg("params"), py::arg("field"), py::arg("grid"),
        py::arg("seed") = 0, py::arg("max_iters") = 2000,
        py::arg("tol_residual") = 1e-6);

  m.def("gradient_check",
        [](const HartreeState& st, const PolaronParams& p, const FieldSpec& f,
           int n_dirs, std::uint64_t seed) {
          return gradient_check(st, p, f, n_dirs, seed, kEnergyKernel);
        },
        py::arg("state"), py::arg("params"), py::arg("field"),
        py::arg("n_dirs") = 10, py::arg("seed") = 0);

  m.def("scaling_identity_check",
        [](const FieldSpec& f, const PolaronParams& p, const HartreeState& st,
           double alpha) { return scaling_identity_check(f, p, st, alpha); },
        py::arg("field"), py::arg("params"), py::arg("state"),
        py::arg("alpha"));

  py::class_<BallLayout>(m, "BallLayout")
      .def(py::init([](const std::vector<std::array<double, 3>>& centers,
                       double small_radius) {
             BallLayout bl;
             for (const auto& c : centers) bl.centers.push_back(to_vec3(c));
             bl.small_radius = small_radius;
             bl.validate();
             return bl;
           }),
           py::arg("centers"), py::arg("small_radius"))
      .def_property_readonly("N", &BallLayout::N);

  py::class_<ClusterGroup>(m, "ClusterGroup")
      .def_property_readonly("center",
                             [](const ClusterGroup& g) { return from_vec3(g.center); })
      .def_readonly("radius", &ClusterGroup::radius)
      .def_readonly("members", &ClusterGroup::members)
      .def_readonly("separation", &ClusterGroup::separation);

  py::class_<ClusterLayout>(m, "ClusterLayout")
      .def_readonly("groups", &ClusterLayout::groups)
      .def_readonly("small_radius", &ClusterLayout::small_radius)
      .def_property_readonly("m", &ClusterLayout::m);

  m.def("regroup_balls", &regroup_balls, py::arg("layout"));
  m.def("region_membership",
        [](const ClusterLayout& cl, const std::array<double, 3>& y,
           double tie_tol) { return region_membership(cl, to_vec3(y), tie_tol); },
        py::arg("layout"), py::arg("y"), py::arg("tie_tol") = 1e-12);

  py::class_<McEstimate>(m, "McEstimate")
      .def_readonly("mean", &McEstimate::mean)
      .def_readonly("std_error", &McEstimate::std_error)
      .def_readonly("samples", &McEstimate::samples)
      .def_readonly("seed", &McEstimate::seed);

  py::class_<ErrorTermCheck>(m, "ErrorTermCheck")
      .def_readonly("estimate", &ErrorTermCheck::estimate)
      .def_readonly("bound", &ErrorTermCheck::bound)
      .def_readonly("pass_", &ErrorTermCheck::pass);

  m.def("f1_check",
        [](double alpha, const ClusterLayout& cl,
           const std::vector<std::array<double, 3>>& positions,
           std::int64_t mc_budget, std::uint64_t seed) {
          std::vector<Vec3> pos;
          for (const auto& p : positions) pos.push_back(to_vec3(p));
          return f1_check(alpha, cl, pos, mc_budget, seed);
        },
        py::arg("alpha"), py::arg("layout"), py::arg("positions"),
        py::arg("mc_budget") = 1000000, py::arg("seed") = 0);
  m.def("f2_check",
        [](double alpha, const ClusterLayout& cl,
           const std::vector<std::array<double, 3>>& positions,
           std::int64_t mc_budget, std::uint64_t seed) {
          std::vector<Vec3> pos;
          for (const auto& p : positions) pos.push_back(to_vec3(p));
          return f2_check(alpha, cl, pos, mc_budget, seed);
        },
        py::arg("alpha"), py::arg("layout"), py::arg("positions"),
        py::arg("mc_budget") = 1000000, py::arg("seed") = 0);

  py::class_<BlockMode>(m, "BlockMode")
      .def_readonly("n", &BlockMode::n)
      .def_readonly("M_n", &BlockMode::M_n);

  py::class_<BlockModeSet>(m, "BlockModeSet")
      .def_readonly("modes", &BlockModeSet::modes)
      .def_readonly("count_bound", &BlockModeSet::count_bound)
      .def_readonly("sum_M2", &BlockModeSet::sum_M2)
      .def("count_ok", &BlockModeSet::count_ok);

  m.def("block_modes", &block_modes, py::arg("Lambda"), py::arg("P"),
        py::arg("depth") = 6);

  py::class_<ErrorBudget>(m, "ErrorBudget")
      .def_readonly("alpha", &ErrorBudget::alpha)
      .def_readonly("N", &ErrorBudget::N)
      .def_readonly("R", &ErrorBudget::R)
      .def_readonly("Lambda", &ErrorBudget::Lambda)
      .def_readonly("P", &ErrorBudget::P)
      .def_readonly("beta", &ErrorBudget::beta)
      .def_readonly("localization", &ErrorBudget::localization)
      .def_readonly("interball", &ErrorBudget::interball)
      .def_readonly("cutoff_half", &ErrorBudget::cutoff_half)
      .def_readonly("blockmode_count_term", &ErrorBudget::blockmode_count_term)
      .def_readonly("corollary_r2_term", &ErrorBudget::corollary_r2_term)
      .def_readonly("corollary_c_term", &ErrorBudget::corollary_c_term)
      .def_readonly("block_intermediate", &ErrorBudget::block_intermediate)
      .def_readonly("total", &ErrorBudget::total);

  m.def("theorem1_budget", &theorem1_budget, py::arg("alpha"), py::arg("N"),
        py::arg("c_AV") = 1.0, py::arg("C_interball") = 1.0,
        py::arg("include_block_intermediate") = false);
  m.def("hardy_lower_bound", &hardy_lower_bound, py::arg("N"), py::arg("eps"),
        py::arg("C_eps"));

  py::class_<SubadditivityGap>(m, "SubadditivityGap")
      .def_readonly("min_gap", &SubadditivityGap::min_gap);
  m.def("subadditivity_gap", &subadditivity_gap, py::arg("energies"));
}
