#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "polaron/fields.hpp"
#include "polaron/functional.hpp"
#include "polaron/geometry.hpp"
#include "polaron/mc.hpp"

namespace polaron {

// --- localization / inter-ball penalties -----------------------------------

/// 9 N pi^2 / (4 R^2), the cosine-window localization cost.
double localization_penalty(int N, double R);

struct InterballPenalty {
  double value = 0.0;
  bool single_group = false;  // m = 1: no inter-ball terms, value 0 by convention
};

/// (8 alpha N / pi^2) sum_i n_i / d_i over the cluster layout.
InterballPenalty interball_penalty(double alpha, int N,
                                   const ClusterLayout& layout);

// --- F1 / F2 phonon-partition error terms ----------------------------------

struct ErrorTermCheck {
  McEstimate estimate;
  double bound = 0.0;
  bool pass = false;  // mean - 3 sigma <= bound
};

/// F1 = sum_i |g_i|^2 integrated over the nearest-ball regions S_i,
/// versus the bound N (8 alpha / pi^2) sum_i n_i / d_i.
ErrorTermCheck f1_check(double alpha, const ClusterLayout& layout,
                        const std::vector<Vec3>& positions,
                        std::int64_t mc_budget, std::uint64_t seed);

/// F2 inter-ball coupling term versus 2 alpha sum over cross pairs of
/// 1/|x_s - x_l|.
ErrorTermCheck f2_check(double alpha, const ClusterLayout& layout,
                        const std::vector<Vec3>& positions,
                        std::int64_t mc_budget, std::uint64_t seed);

// --- momentum cutoff and block modes ---------------------------------------

struct CutoffParams {
  double Lambda = 0.0;
  double P = 0.0;
  double beta = 0.0;  // 1 - 8 alpha N / (pi Lambda)
  double eps1 = 0.0, eps2 = 0.0, delta = 0.0;

  static CutoffParams from(double alpha, int N, double Lambda, double P);
};

struct CutoffCertificates {
  double af_term = 0.0;       // Lambda alpha / (pi eps1)
  double ag_number_term = 0.0; // 4 alpha / (eps2 pi Lambda)
  double ag_const_term = 0.0;  // 2 alpha / (eps2 pi Lambda)
  double beta = 0.0;
  double constant = -0.5;
  bool valid = false;  // beta > 0
};

CutoffCertificates cutoff_certificates(double alpha, int N, double Lambda,
                                       double eps1, double eps2);

struct BlockMode {
  std::array<int, 3> n{};
  double M_n = 0.0;       // ( int_cell |k|^-2 dk )^{1/2}
  Vec3 cell_lo, cell_hi;  // bounding box of the cell before the ball cut
};

struct BlockModeSet {
  std::vector<BlockMode> modes;
  double count_bound = 0.0;  // (2 Lambda / P + 1)^3
  double sum_M2 = 0.0;       // should equal 4 pi Lambda

  bool count_ok() const { return double(modes.size()) <= count_bound + 1e-9; }
};

/// Enumerates the nonempty momentum cells [n P +- P/2] cut to the ball
/// B_Lambda and computes each M_n by adaptive quadrature. `depth` bounds the
/// subdivision of ball-boundary cells; the origin cell is refined toward the
/// integrable singularity regardless.
BlockModeSet block_modes(double Lambda, double P, int depth = 6);

// --- Theorem-1 error budget -------------------------------------------------

struct ErrorBudget {
  // parameters
  double alpha = 0.0;
  int N = 0;
  double R = 0.0, Lambda = 0.0, P = 0.0, beta = 0.0;
  double c_AV = 1.0, C_interball = 1.0;
  // items (all nonnegative)
  double localization = 0.0;        // 9 N pi^2 / (4 R^2)
  double interball = 0.0;           // C alpha N^2 / R
  double cutoff_half = 0.5;
  double blockmode_count_term = 0.0;  // (2 Lambda / P + 1)^3
  double corollary_r2_term = 0.0;     // 3 R^2 alpha^{80/23} N^5
  double corollary_c_term = 0.0;      // c_AV alpha^{42/23} N^3
  double block_intermediate = 0.0;    // optional, off by default
  double total = 0.0;
};

/// Assembles the budget with the canonical parameter choices
/// R = N^-1 alpha^{-19/23}, Lambda = N alpha^{27/23}, P = alpha^{13/23}.
/// Throws std::domain_error if the induced beta is <= 0.
ErrorBudget theorem1_budget(double alpha, int N, double c_AV,
                            double C_interball,
                            bool include_block_intermediate = false);

/// Budget with a caller-chosen R (for the R trade-off scan); other choices
/// as in theorem1_budget.
ErrorBudget theorem1_budget_at_R(double alpha, int N, double c_AV,
                                 double C_interball, double R);

// --- lower bound and scaling identity ---------------------------------------

/// -N^3/(1-eps) - C_eps N, a valid lower bound for C_N given a
/// zero-form-bound certificate pair (eps, C_eps).
double hardy_lower_bound(int N, double eps, double C_eps);

/// Evaluates pekar_energy on (state, fields, params) and on the discretely
/// rescaled triple and returns the max relative deviation of every energy
/// contribution (kinetic, external, U*repulsion, alpha*D, total) from the
/// exact factor alpha^2.
double scaling_identity_check(const FieldSpec& fields,
                              const PolaronParams& params,
                              const HartreeState& state, double alpha);

/// The rescaled state itself: same value array times alpha^{3/2} on the grid
/// with box lengths divided by alpha.
HartreeState rescale_state(const HartreeState& state, double alpha);

}  // namespace polaron
