#include "polaron/mc.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

namespace polaron {

namespace {

constexpr double kPi = std::numbers::pi;

Vec3 uniform_direction(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double c = 2.0 * u(rng) - 1.0;
  double phi = 2.0 * kPi * u(rng);
  double s = std::sqrt(std::max(0.0, 1.0 - c * c));
  return {s * std::cos(phi), s * std::sin(phi), c};
}

// Radial CDF of the (1+u)^-5 u^2 profile, normalized to 1 on [0, inf).
double heavy_tail_cdf(double u) {
  double v = 1.0 + u;
  return 12.0 * (1.0 / 12.0 - 0.5 / (v * v) + 2.0 / (3.0 * v * v * v) -
                 0.25 / (v * v * v * v));
}

double heavy_tail_radius(double xi) {
  // Invert the CDF by bisection; the CDF is smooth and strictly increasing.
  double lo = 0.0, hi = 1.0;
  while (heavy_tail_cdf(hi) < xi) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    (heavy_tail_cdf(mid) < xi ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

struct Proposal {
  Vec3 y;
};

Vec3 draw(const McSampler& sampler, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  if (auto* b = std::get_if<UniformBoxSampler>(&sampler)) {
    return {b->lo.x + u(rng) * (b->hi.x - b->lo.x),
            b->lo.y + u(rng) * (b->hi.y - b->lo.y),
            b->lo.z + u(rng) * (b->hi.z - b->lo.z)};
  }
  if (auto* h = std::get_if<HeavyTailSampler>(&sampler)) {
    double r = h->s * heavy_tail_radius(u(rng));
    return h->center + r * uniform_direction(rng);
  }
  const auto& sp = std::get<SingularPointsSampler>(sampler);
  std::uniform_int_distribution<std::size_t> pick(0, sp.points.size() - 1);
  Vec3 c = sp.points[pick(rng)];
  // CDF 1-(1+r/s)^-2, inverted exactly.
  double xi = u(rng);
  double r = sp.s * (1.0 / std::sqrt(1.0 - xi) - 1.0);
  return c + r * uniform_direction(rng);
}

}  // namespace

double sampler_density(const McSampler& sampler, Vec3 y) {
  if (auto* b = std::get_if<UniformBoxSampler>(&sampler)) {
    double vol = (b->hi.x - b->lo.x) * (b->hi.y - b->lo.y) * (b->hi.z - b->lo.z);
    bool inside = y.x >= b->lo.x && y.x <= b->hi.x && y.y >= b->lo.y &&
                  y.y <= b->hi.y && y.z >= b->lo.z && y.z <= b->hi.z;
    return inside ? 1.0 / vol : 0.0;
  }
  if (auto* h = std::get_if<HeavyTailSampler>(&sampler)) {
    double r = dist(y, h->center) / h->s;
    return 3.0 / (kPi * h->s * h->s * h->s) * std::pow(1.0 + r, -5.0);
  }
  const auto& sp = std::get<SingularPointsSampler>(sampler);
  double acc = 0.0;
  for (const Vec3& c : sp.points) {
    double r = dist(y, c);
    if (r == 0.0) return std::numeric_limits<double>::infinity();
    double u = r / sp.s;
    acc += 1.0 / (2.0 * kPi * sp.s * r * r * (1.0 + u) * (1.0 + u) * (1.0 + u));
  }
  return acc / double(sp.points.size());
}

McEstimate mc_integrate(const std::function<double(Vec3)>& f,
                        const std::function<bool(Vec3)>& region,
                        const McSampler& sampler, std::int64_t n_samples,
                        std::uint64_t seed) {
  if (n_samples < 1000)
    throw std::invalid_argument("mc_integrate needs at least 1000 samples");
  std::mt19937_64 rng(seed);
  double sum = 0.0, sum2 = 0.0;
  std::int64_t accepted = 0;
  for (std::int64_t i = 0; i < n_samples; ++i) {
    Vec3 y = draw(sampler, rng);
    double w = 0.0;
    if (region(y)) {
      ++accepted;
      double p = sampler_density(sampler, y);
      if (std::isfinite(p) && p > 0.0) w = f(y) / p;
    }
    sum += w;
    sum2 += w * w;
  }
  if (accepted == 0)
    throw std::runtime_error("mc_integrate: no sample accepted in region");
  double mean = sum / double(n_samples);
  double var = std::max(0.0, sum2 / double(n_samples) - mean * mean);
  McEstimate out;
  out.mean = mean;
  out.std_error = std::sqrt(var / double(n_samples));
  out.samples = n_samples;
  out.seed = seed;
  return out;
}

}  // namespace polaron
