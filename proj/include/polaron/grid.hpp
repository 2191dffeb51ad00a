#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "polaron/vec3.hpp"

namespace polaron {

struct FieldSpec;  // fields.hpp

/// Periodic 3D grid. Node (ix,iy,iz) sits at origin + (ix*hx, iy*hy, iz*hz);
/// the box is [origin, origin+L) with wrap-around. Storage is row-major with
/// iz fastest (FFTW layout).
struct Grid3D {
  std::array<int, 3> n{};       // points per axis, each >= 8 and even
  std::array<double, 3> box{};  // box lengths
  Vec3 origin{};

  static Grid3D cubic(int nside, double length) {
    return Grid3D{{nside, nside, nside},
                  {length, length, length},
                  {-length / 2, -length / 2, -length / 2}};
  }

  std::size_t size() const {
    return std::size_t(n[0]) * std::size_t(n[1]) * std::size_t(n[2]);
  }
  double spacing(int axis) const { return box[axis] / n[axis]; }
  double cell_volume() const { return spacing(0) * spacing(1) * spacing(2); }
  double volume() const { return box[0] * box[1] * box[2]; }
  std::size_t index(int ix, int iy, int iz) const {
    return (std::size_t(ix) * n[1] + iy) * n[2] + iz;
  }
  Vec3 coord(int ix, int iy, int iz) const {
    return {origin.x + ix * spacing(0), origin.y + iy * spacing(1),
            origin.z + iz * spacing(2)};
  }
  /// Angular wavenumber of mode index m on the given axis (FFT ordering).
  double wavenumber(int m, int axis) const;

  void validate() const;  // throws std::invalid_argument on bad shape
  bool operator==(const Grid3D&) const = default;
};

struct GridFunction {
  Grid3D grid;
  std::vector<std::complex<double>> values;

  GridFunction() = default;
  explicit GridFunction(const Grid3D& g) : grid(g), values(g.size()) {}
};

/// Nonnegative real grid function with bookkeeping of its integral.
/// Tiny negative values from floating error are clamped at -1e-12.
struct DensityGrid {
  Grid3D grid;
  std::vector<double> values;
  double total_mass = 0.0;

  DensityGrid() = default;
  explicit DensityGrid(const Grid3D& g) : grid(g), values(g.size(), 0.0) {}

  /// Clamps, recomputes total_mass by the Riemann sum, checks the invariants.
  void finalize();
};

/// Kernel used by coulomb_potential.
///  MeanFree:        4*pi/|k|^2 with the k=0 mode zeroed (periodic images
///                   accepted; potential has zero mean over the box).
///  SphereTruncated: 4*pi*(1-cos(|k| L_min/2))/|k|^2, i.e. the Coulomb kernel
///                   cut off at half the shortest box length. Exact free-space
///                   convolution for densities supported within half the box.
enum class CoulombKernel { MeanFree, SphereTruncated };

/// Multiplier G^(k) of the chosen kernel at wavenumber k.
double coulomb_multiplier(const Grid3D& grid, CoulombKernel kernel, Vec3 k);

// --- spectral and integral operations -------------------------------------

/// Riemann-sum inner product  sum conj(f) g h^3; conjugate-linear in f.
std::complex<double> inner_product(const GridFunction& f, const GridFunction& g);

double l2_norm(const GridFunction& f);

/// Unnormalized forward DFT (sum with e^{-ikx} phases) and its inverse
/// (inverse applies the 1/N factor, so backward(forward(f)) == f).
void fft_forward(const Grid3D& grid, const std::complex<double>* in,
                 std::complex<double>* out);
void fft_backward(const Grid3D& grid, const std::complex<double>* in,
                  std::complex<double>* out);

/// (-i d_l + A_l) f, l = 0,1,2, with the derivative as a spectral multiplier.
std::array<GridFunction, 3> covariant_gradient(const GridFunction& f,
                                               const FieldSpec& A);

/// rho * G for the chosen kernel, evaluated by Fourier multiplication.
GridFunction coulomb_potential(const DensityGrid& rho,
                               CoulombKernel kernel = CoulombKernel::MeanFree);

/// D(rho) = int rho (rho * G); nonnegative for either kernel.
double coulomb_self_energy(const DensityGrid& rho,
                           CoulombKernel kernel = CoulombKernel::MeanFree);

// --- persistence -----------------------------------------------------------

/// Flat binary of 64-bit floats, row-major over (z,y,x,component), preceded
/// by a small text header naming the grid shape and spacing.
void save_grid_data(const std::string& path, const Grid3D& grid,
                    const std::vector<const double*>& components);
struct LoadedGridData {
  Grid3D grid;
  int ncomp = 0;
  std::vector<double> data;  // (z,y,x,component) order, as on disk
};
LoadedGridData load_grid_data(const std::string& path);

void save_grid_function(const std::string& path, const GridFunction& f);
GridFunction load_grid_function(const std::string& path);

}  // namespace polaron
