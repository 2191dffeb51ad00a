#include "polaron/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "polaron/fields.hpp"

namespace polaron {

namespace {

constexpr double kPi = std::numbers::pi;

// Plan cache keyed by dims and direction. Plans are created with
// FFTW_UNALIGNED so they can be executed on any array via fftw_execute_dft.
class PlanCache {
 public:
  fftw_plan get(const std::array<int, 3>& n, int sign) {
    std::scoped_lock lock(mu_);
    auto key = std::make_pair(n, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::vector<fftw_complex> buf(std::size_t(n[0]) * n[1] * n[2]);
    fftw_plan p = fftw_plan_dft_3d(n[0], n[1], n[2], buf.data(), buf.data(),
                                   sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!p) throw std::runtime_error("fftw plan creation failed");
    plans_[key] = p;
    return p;
  }

 private:
  std::mutex mu_;
  std::map<std::pair<std::array<int, 3>, int>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

void execute(const Grid3D& grid, int sign, const std::complex<double>* in,
             std::complex<double>* out) {
  fftw_plan p = plan_cache().get(grid.n, sign);
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(
                          const_cast<std::complex<double>*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

void require_same_grid(const Grid3D& a, const Grid3D& b) {
  if (!(a == b)) throw std::invalid_argument("grid mismatch");
}

}  // namespace

double Grid3D::wavenumber(int m, int axis) const {
  int half = n[axis] / 2;
  int mm = m <= half ? m : m - n[axis];
  if (m == half) mm = -half;  // Nyquist convention: -N/2
  return 2.0 * kPi * mm / box[axis];
}

void Grid3D::validate() const {
  for (int a = 0; a < 3; ++a) {
    if (n[a] < 8 || n[a] % 2 != 0)
      throw std::invalid_argument("grid axis size must be even and >= 8");
    if (!(box[a] > 0.0))
      throw std::invalid_argument("grid box length must be positive");
  }
}

void DensityGrid::finalize() {
  double mass = 0.0;
  for (double& v : values) {
    if (v < -1e-12) throw std::invalid_argument("density has negative values");
    if (v < 0.0) v = 0.0;
    mass += v;
  }
  total_mass = mass * grid.cell_volume();
}

std::complex<double> inner_product(const GridFunction& f, const GridFunction& g) {
  require_same_grid(f.grid, g.grid);
  std::complex<double> acc = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i)
    acc += std::conj(f.values[i]) * g.values[i];
  return acc * f.grid.cell_volume();
}

double l2_norm(const GridFunction& f) {
  double acc = 0.0;
  for (const auto& v : f.values) acc += std::norm(v);
  return std::sqrt(acc * f.grid.cell_volume());
}

void fft_forward(const Grid3D& grid, const std::complex<double>* in,
                 std::complex<double>* out) {
  execute(grid, FFTW_FORWARD, in, out);
}

void fft_backward(const Grid3D& grid, const std::complex<double>* in,
                  std::complex<double>* out) {
  execute(grid, FFTW_BACKWARD, in, out);
  double inv = 1.0 / double(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) out[i] *= inv;
}

std::array<GridFunction, 3> covariant_gradient(const GridFunction& f,
                                               const FieldSpec& A) {
  const Grid3D& g = f.grid;
  if (A.is_sampled())
    require_same_grid(g, std::get<SampledField>(A.kind).grid);

  std::vector<std::complex<double>> fhat(g.size());
  fft_forward(g, f.values.data(), fhat.data());

  std::array<GridFunction, 3> out{GridFunction(g), GridFunction(g),
                                  GridFunction(g)};
  std::vector<std::complex<double>> tmp(g.size());
  for (int axis = 0; axis < 3; ++axis) {
    // -i d_axis: multiplier k_axis in Fourier space.
    for (int ix = 0; ix < g.n[0]; ++ix) {
      double kx = g.wavenumber(ix, 0);
      for (int iy = 0; iy < g.n[1]; ++iy) {
        double ky = g.wavenumber(iy, 1);
        for (int iz = 0; iz < g.n[2]; ++iz) {
          double k = axis == 0 ? kx : (axis == 1 ? ky : g.wavenumber(iz, 2));
          std::size_t id = g.index(ix, iy, iz);
          tmp[id] = k * fhat[id];
        }
      }
    }
    fft_backward(g, tmp.data(), out[axis].values.data());
  }

  // Multiplication term A_l(x) f(x).
  bool zero_A = std::holds_alternative<ZeroField>(A.kind) ||
                std::holds_alternative<PeriodicV>(A.kind);
  if (!zero_A) {
    for (int ix = 0; ix < g.n[0]; ++ix)
      for (int iy = 0; iy < g.n[1]; ++iy)
        for (int iz = 0; iz < g.n[2]; ++iz) {
          std::size_t id = g.index(ix, iy, iz);
          Vec3 a = evaluate_A(A, g.coord(ix, iy, iz));
          for (int axis = 0; axis < 3; ++axis)
            out[axis].values[id] += a[axis] * f.values[id];
        }
  }
  return out;
}

double coulomb_multiplier(const Grid3D& grid, CoulombKernel kernel, Vec3 k) {
  double k2 = dot(k, k);
  if (kernel == CoulombKernel::MeanFree) {
    return k2 > 0.0 ? 4.0 * kPi / k2 : 0.0;
  }
  double rc = 0.5 * std::min({grid.box[0], grid.box[1], grid.box[2]});
  if (k2 == 0.0) return 2.0 * kPi * rc * rc;
  double kn = std::sqrt(k2);
  return 4.0 * kPi * (1.0 - std::cos(kn * rc)) / k2;
}

GridFunction coulomb_potential(const DensityGrid& rho, CoulombKernel kernel) {
  const Grid3D& g = rho.grid;
  std::vector<std::complex<double>> work(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) work[i] = rho.values[i];
  std::vector<std::complex<double>> hat(g.size());
  fft_forward(g, work.data(), hat.data());
  for (int ix = 0; ix < g.n[0]; ++ix)
    for (int iy = 0; iy < g.n[1]; ++iy)
      for (int iz = 0; iz < g.n[2]; ++iz) {
        Vec3 k{g.wavenumber(ix, 0), g.wavenumber(iy, 1), g.wavenumber(iz, 2)};
        hat[g.index(ix, iy, iz)] *= coulomb_multiplier(g, kernel, k);
      }
  GridFunction out(g);
  fft_backward(g, hat.data(), out.values.data());
  // The result of a real-input multiplier convolution is real; drop the
  // floating-point imaginary residue.
  for (auto& v : out.values) v = v.real();
  return out;
}

double coulomb_self_energy(const DensityGrid& rho, CoulombKernel kernel) {
  GridFunction pot = coulomb_potential(rho, kernel);
  double acc = 0.0;
  for (std::size_t i = 0; i < rho.values.size(); ++i)
    acc += rho.values[i] * pot.values[i].real();
  return acc * rho.grid.cell_volume();
}

// --- persistence -----------------------------------------------------------

void save_grid_data(const std::string& path, const Grid3D& grid,
                    const std::vector<const double*>& components) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os.precision(17);
  os << "polaron-grid 1\n"
     << grid.n[0] << " " << grid.n[1] << " " << grid.n[2] << "\n"
     << grid.box[0] << " " << grid.box[1] << " " << grid.box[2] << "\n"
     << grid.origin.x << " " << grid.origin.y << " " << grid.origin.z << "\n"
     << components.size() << "\n";
  // (z,y,x,component) row-major, z slowest.
  std::vector<double> row(components.size());
  for (int iz = 0; iz < grid.n[2]; ++iz)
    for (int iy = 0; iy < grid.n[1]; ++iy)
      for (int ix = 0; ix < grid.n[0]; ++ix) {
        std::size_t id = grid.index(ix, iy, iz);
        for (std::size_t c = 0; c < components.size(); ++c)
          row[c] = components[c][id];
        os.write(reinterpret_cast<const char*>(row.data()),
                 sizeof(double) * row.size());
      }
  if (!os) throw std::runtime_error("write failed: " + path);
}

LoadedGridData load_grid_data(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::string magic;
  int version = 0;
  is >> magic >> version;
  if (magic != "polaron-grid" || version != 1)
    throw std::runtime_error("bad grid file header: " + path);
  LoadedGridData out;
  is >> out.grid.n[0] >> out.grid.n[1] >> out.grid.n[2];
  is >> out.grid.box[0] >> out.grid.box[1] >> out.grid.box[2];
  is >> out.grid.origin.x >> out.grid.origin.y >> out.grid.origin.z;
  is >> out.ncomp;
  if (!is || out.ncomp <= 0) throw std::runtime_error("bad grid file header");
  out.grid.validate();
  is.ignore(1, '\n');
  out.data.resize(out.grid.size() * out.ncomp);
  is.read(reinterpret_cast<char*>(out.data.data()),
          std::streamsize(sizeof(double) * out.data.size()));
  if (!is) throw std::runtime_error("truncated grid file: " + path);
  return out;
}

void save_grid_function(const std::string& path, const GridFunction& f) {
  std::vector<double> re(f.values.size()), im(f.values.size());
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    re[i] = f.values[i].real();
    im[i] = f.values[i].imag();
  }
  save_grid_data(path, f.grid, {re.data(), im.data()});
}

GridFunction load_grid_function(const std::string& path) {
  LoadedGridData raw = load_grid_data(path);
  if (raw.ncomp != 2)
    throw std::runtime_error("expected 2 components (re, im) in " + path);
  GridFunction f(raw.grid);
  const Grid3D& g = raw.grid;
  std::size_t pos = 0;
  for (int iz = 0; iz < g.n[2]; ++iz)
    for (int iy = 0; iy < g.n[1]; ++iy)
      for (int ix = 0; ix < g.n[0]; ++ix) {
        f.values[g.index(ix, iy, iz)] = {raw.data[pos], raw.data[pos + 1]};
        pos += 2;
      }
  return f;
}

}  // namespace polaron
