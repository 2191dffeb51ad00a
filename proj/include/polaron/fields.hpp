#pragma once

#include <memory>
#include <string>
#include <variant>

#include "polaron/grid.hpp"
#include "polaron/vec3.hpp"

namespace polaron {

/// Analytic presets and sampled external potentials A : R^3 -> R^3 and
/// V : R^3 -> R. Immutable after construction; safe to share across threads.
struct ZeroField {};

/// A(x) = B x x / 2, so curl A = B exactly.
struct LinearA {
  Vec3 B;
};

/// V(x) = amplitude * prod_i cos(2 pi x_i / w_i); V(x+w) = V(x) exactly.
/// `profile` names the analytic shape; only "cosine" is built in.
struct PeriodicV {
  Vec3 period;
  double amplitude = 0.0;
  std::string profile = "cosine";
};

/// A and V sampled on a grid; evaluation by trilinear interpolation with
/// periodic wrap. Points outside the grid box are a domain error.
struct SampledField {
  Grid3D grid;
  std::array<std::vector<double>, 3> A;  // one array per component, may be empty
  std::vector<double> V;                 // may be empty (treated as 0)
};

struct FieldSpec {
  std::variant<ZeroField, LinearA, PeriodicV, SampledField> kind = ZeroField{};
  std::string gauge_note;

  bool is_sampled() const { return std::holds_alternative<SampledField>(kind); }
};

FieldSpec make_zero_field();
FieldSpec make_linear_A(Vec3 B);
FieldSpec make_periodic_V(Vec3 period, double amplitude);

Vec3 evaluate_A(const FieldSpec& spec, Vec3 x);
double evaluate_V(const FieldSpec& spec, Vec3 x);

/// A_alpha(x) = alpha A(alpha x), V_alpha(x) = alpha^2 V(alpha x).
struct ScaledField {
  FieldSpec base;
  double alpha = 1.0;

  Vec3 evaluate_A(Vec3 x) const;
  double evaluate_V(Vec3 x) const;

  /// Analytic presets fold back into a plain FieldSpec:
  /// Zero -> Zero, LinearA(B) -> LinearA(alpha^2 B),
  /// PeriodicV(w, a) -> PeriodicV(w/alpha, alpha^2 a).
  /// Sampled fields are not foldable (throws std::invalid_argument).
  FieldSpec fold() const;
};

ScaledField scale_fields(const FieldSpec& spec, double alpha);
ScaledField scale_fields(const ScaledField& spec, double alpha);

enum class FormBoundStatus { Verified, Unverified };

struct FormBoundReport {
  FormBoundStatus status = FormBoundStatus::Unverified;
  std::string detail;
};

/// Whitelist check: analytic presets known to satisfy the zero-form-bound
/// assumptions. Sampled fields are always "unverified".
FormBoundReport validate_form_bound_preset(const FieldSpec& spec);

}  // namespace polaron
