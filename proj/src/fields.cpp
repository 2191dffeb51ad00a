#include "polaron/fields.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace polaron {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Periodic trilinear interpolation of one component array on its grid.
// Throws if x falls outside the grid box.
double trilinear(const Grid3D& g, const std::vector<double>& data, Vec3 x) {
  double f[3];
  int i0[3], i1[3];
  for (int a = 0; a < 3; ++a) {
    double t = (x[a] - g.origin[a]) / g.spacing(a);
    if (t < -1e-9 || t > g.n[a] + 1e-9)
      throw std::domain_error("sampled field evaluated outside its grid box");
    int base = int(std::floor(t));
    f[a] = t - base;
    i0[a] = ((base % g.n[a]) + g.n[a]) % g.n[a];
    i1[a] = (i0[a] + 1) % g.n[a];
  }
  double acc = 0.0;
  for (int cx = 0; cx < 2; ++cx)
    for (int cy = 0; cy < 2; ++cy)
      for (int cz = 0; cz < 2; ++cz) {
        double w = (cx ? f[0] : 1 - f[0]) * (cy ? f[1] : 1 - f[1]) *
                   (cz ? f[2] : 1 - f[2]);
        acc += w * data[g.index(cx ? i1[0] : i0[0], cy ? i1[1] : i0[1],
                                cz ? i1[2] : i0[2])];
      }
  return acc;
}

}  // namespace

FieldSpec make_zero_field() { return FieldSpec{ZeroField{}, ""}; }

FieldSpec make_linear_A(Vec3 B) { return FieldSpec{LinearA{B}, "symmetric gauge"}; }

FieldSpec make_periodic_V(Vec3 period, double amplitude) {
  if (!(period.x > 0 && period.y > 0 && period.z > 0))
    throw std::invalid_argument("periodic potential needs positive periods");
  return FieldSpec{PeriodicV{period, amplitude, "cosine"}, ""};
}

Vec3 evaluate_A(const FieldSpec& spec, Vec3 x) {
  return std::visit(
      [&](const auto& k) -> Vec3 {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, LinearA>) {
          return 0.5 * cross(k.B, x);
        } else if constexpr (std::is_same_v<T, SampledField>) {
          Vec3 a{};
          for (int c = 0; c < 3; ++c)
            if (!k.A[c].empty()) a[c] = trilinear(k.grid, k.A[c], x);
          return a;
        } else {
          return Vec3{};
        }
      },
      spec.kind);
}

double evaluate_V(const FieldSpec& spec, Vec3 x) {
  return std::visit(
      [&](const auto& k) -> double {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, PeriodicV>) {
          return k.amplitude * std::cos(kTwoPi * x.x / k.period.x) *
                 std::cos(kTwoPi * x.y / k.period.y) *
                 std::cos(kTwoPi * x.z / k.period.z);
        } else if constexpr (std::is_same_v<T, SampledField>) {
          return k.V.empty() ? 0.0 : trilinear(k.grid, k.V, x);
        } else {
          return 0.0;
        }
      },
      spec.kind);
}

Vec3 ScaledField::evaluate_A(Vec3 x) const {
  return alpha * polaron::evaluate_A(base, alpha * x);
}

double ScaledField::evaluate_V(Vec3 x) const {
  return alpha * alpha * polaron::evaluate_V(base, alpha * x);
}

FieldSpec ScaledField::fold() const {
  return std::visit(
      [&](const auto& k) -> FieldSpec {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, ZeroField>) {
          return make_zero_field();
        } else if constexpr (std::is_same_v<T, LinearA>) {
          return make_linear_A(alpha * alpha * k.B);
        } else if constexpr (std::is_same_v<T, PeriodicV>) {
          return make_periodic_V(k.period / alpha, alpha * alpha * k.amplitude);
        } else {
          throw std::invalid_argument("sampled fields cannot be folded");
        }
      },
      base.kind);
}

ScaledField scale_fields(const FieldSpec& spec, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  return ScaledField{spec, alpha};
}

ScaledField scale_fields(const ScaledField& spec, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  return ScaledField{spec.base, spec.alpha * alpha};
}

FormBoundReport validate_form_bound_preset(const FieldSpec& spec) {
  return std::visit(
      [](const auto& k) -> FormBoundReport {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, ZeroField>) {
          return {FormBoundStatus::Verified, "zero field"};
        } else if constexpr (std::is_same_v<T, LinearA>) {
          return {FormBoundStatus::Verified,
                  "linear A (constant magnetic field), V = 0"};
        } else if constexpr (std::is_same_v<T, PeriodicV>) {
          return {FormBoundStatus::Verified,
                  "bounded periodic V, A = 0"};
        } else {
          return {FormBoundStatus::Unverified,
                  "sampled field carries no analytic certificate"};
        }
      },
      spec.kind);
}

}  // namespace polaron
