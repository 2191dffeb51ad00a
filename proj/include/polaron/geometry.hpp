#pragma once

#include <optional>
#include <vector>

#include "polaron/vec3.hpp"

namespace polaron {

/// N equal small balls B_R(y_k) around the particle positions.
struct BallLayout {
  std::vector<Vec3> centers;
  double small_radius = 0.0;

  int N() const { return int(centers.size()); }
  void validate() const;
};

struct ClusterGroup {
  Vec3 center;
  double radius = 0.0;           // exactly (3 n - 1) R / 2
  std::vector<int> members;      // indices into the BallLayout
  double separation = 0.0;       // min over other groups of dist(B_i, B_j)
};

/// Disjoint enclosing balls with pairwise gap >= R.
struct ClusterLayout {
  std::vector<ClusterGroup> groups;
  double small_radius = 0.0;

  int m() const { return int(groups.size()); }
  /// Checks every invariant (separation, radius formula, containment,
  /// partition); throws std::logic_error naming the first violation.
  void validate(const BallLayout& input) const;
};

/// Localization window: product of per-coordinate cosines on the centered
/// cube of side L, zero outside. L = 2R/sqrt(3) inscribes the cube's
/// circumsphere of radius R.
struct WindowSpec {
  std::vector<Vec3> centers;  // one per particle
  double side = 0.0;

  static WindowSpec from_small_radius(std::vector<Vec3> centers, double R);
};

/// prod_{j,coord} cos((x - y)_coord pi / L) on the support cube, else 0.
double cosine_window(const std::vector<Vec3>& x, const WindowSpec& spec);

/// Greedy insertion with cascade merging: each ball either opens a singleton
/// group or is merged (lowest violating index first) until all pairwise gaps
/// are >= R. Radii are kept at the (3n-1)R/2 formula, which dominates the
/// geometric enclosing radius at every merge.
ClusterLayout regroup_balls(const BallLayout& layout);

/// Distance from y to group ball i: max(|y - c_i| - R_i, 0).
double group_distance(const ClusterLayout& layout, int i, Vec3 y);

/// Nearest-ball partition: index of the closest group ball, or nullopt on a
/// tie (the measure-zero boundary set).
std::optional<int> region_membership(const ClusterLayout& layout, Vec3 y,
                                     double tie_tol = 1e-12);

}  // namespace polaron
