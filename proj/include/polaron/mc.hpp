#pragma once

#include <cstdint>
#include <functional>
#include <variant>
#include <vector>

#include "polaron/vec3.hpp"

namespace polaron {

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t samples = 0;
  std::uint64_t seed = 0;
};

/// Uniform proposals in a box; for bounded regions.
struct UniformBoxSampler {
  Vec3 lo, hi;
};

/// Heavy-tailed proposals, density proportional to (1+|y-center|/s)^-5.
/// Integrable and heavy enough for |y|^-4 integrands over unbounded regions.
struct HeavyTailSampler {
  Vec3 center;
  double s = 1.0;
};

/// Equal-weight mixture of densities proportional to
/// |y-c|^-2 (1+|y-c|/s)^-3 around each listed point. Finite-variance proposals
/// for products of inverse-square kernels singular at the points themselves.
struct SingularPointsSampler {
  std::vector<Vec3> points;
  double s = 1.0;
};

using McSampler =
    std::variant<UniformBoxSampler, HeavyTailSampler, SingularPointsSampler>;

/// Proposal density of the sampler at y (used for importance weights).
double sampler_density(const McSampler& sampler, Vec3 y);

/// Importance-sampled estimate of the integral of f over {y : region(y)}.
/// Deterministic for a fixed seed. Throws std::invalid_argument for
/// n_samples < 1000 and std::runtime_error if no sample lands in the region.
McEstimate mc_integrate(const std::function<double(Vec3)>& f,
                        const std::function<bool(Vec3)>& region,
                        const McSampler& sampler, std::int64_t n_samples,
                        std::uint64_t seed);

}  // namespace polaron
