#include "polaron/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace polaron {

namespace {

constexpr double kPi = std::numbers::pi;

double padded_radius(int n, double R) { return 0.5 * (3 * n - 1) * R; }

double ball_gap(Vec3 c1, double r1, Vec3 c2, double r2) {
  return dist(c1, c2) - r1 - r2;
}

// Minimal ball enclosing two balls; center on the segment joining centers.
void enclosing_ball(Vec3 c1, double r1, Vec3 c2, double r2, Vec3& center,
                    double& radius) {
  double d = dist(c1, c2);
  if (d + r2 <= r1) {  // second inside first
    center = c1;
    radius = r1;
    return;
  }
  if (d + r1 <= r2) {
    center = c2;
    radius = r2;
    return;
  }
  radius = 0.5 * (r1 + r2 + d);
  double t = (radius - r1) / d;  // distance from c1 along the segment
  center = c1 + t * (c2 - c1);
}

}  // namespace

void BallLayout::validate() const {
  if (centers.empty()) throw std::invalid_argument("layout needs N >= 1 balls");
  if (!(small_radius > 0.0)) throw std::invalid_argument("R must be positive");
}

void ClusterLayout::validate(const BallLayout& input) const {
  const double R = small_radius;
  auto fail = [](const std::string& what) { throw std::logic_error(what); };

  std::vector<bool> seen(input.N(), false);
  for (int i = 0; i < m(); ++i) {
    const ClusterGroup& gi = groups[i];
    int ni = int(gi.members.size());
    if (ni == 0) fail("empty group");
    if (std::abs(gi.radius - padded_radius(ni, R)) > 1e-12 * gi.radius)
      fail("group radius differs from (3n-1)R/2");
    for (int k : gi.members) {
      if (k < 0 || k >= input.N() || seen[k]) fail("members do not partition");
      seen[k] = true;
      if (dist(input.centers[k], gi.center) + R > gi.radius + 1e-12)
        fail("small ball not contained in its group ball");
    }
    double min_gap = std::numeric_limits<double>::infinity();
    for (int j = 0; j < m(); ++j) {
      if (j == i) continue;
      double gap = ball_gap(gi.center, gi.radius, groups[j].center,
                            groups[j].radius);
      if (gap < R - 1e-12) fail("group separation below R");
      min_gap = std::min(min_gap, gap);
    }
    if (m() > 1 && std::abs(gi.separation - min_gap) > 1e-9)
      fail("stored separation is not the minimum gap");
  }
  for (bool s : seen)
    if (!s) fail("members do not cover all balls");
}

WindowSpec WindowSpec::from_small_radius(std::vector<Vec3> centers, double R) {
  if (!(R > 0.0)) throw std::invalid_argument("R must be positive");
  return WindowSpec{std::move(centers), 2.0 * R / std::sqrt(3.0)};
}

double cosine_window(const std::vector<Vec3>& x, const WindowSpec& spec) {
  if (x.size() != spec.centers.size())
    throw std::invalid_argument("window center count mismatch");
  double w = 1.0;
  for (std::size_t j = 0; j < x.size(); ++j)
    for (int c = 0; c < 3; ++c) {
      double off = x[j][c] - spec.centers[j][c];
      if (std::abs(off) >= spec.side / 2) return 0.0;
      w *= std::cos(off * kPi / spec.side);
    }
  return w;
}

ClusterLayout regroup_balls(const BallLayout& layout) {
  layout.validate();
  const double R = layout.small_radius;

  ClusterLayout out;
  out.small_radius = R;
  for (int k = 0; k < layout.N(); ++k) {
    // Candidate group: the new small ball alone.
    ClusterGroup cand;
    cand.center = layout.centers[k];
    cand.radius = padded_radius(1, R);
    cand.members = {k};

    // Cascade: merge with the lowest-index violating group until all gaps
    // are >= R. Each merge removes a group, so this terminates.
    for (;;) {
      int hit = -1;
      for (int i = 0; i < out.m(); ++i)
        if (ball_gap(out.groups[i].center, out.groups[i].radius, cand.center,
                     cand.radius) < R) {
          hit = i;
          break;
        }
      if (hit < 0) break;
      ClusterGroup other = std::move(out.groups[hit]);
      out.groups.erase(out.groups.begin() + hit);

      Vec3 center;
      double geometric = 0.0;
      enclosing_ball(other.center, other.radius, cand.center, cand.radius,
                     center, geometric);
      int n = int(other.members.size() + cand.members.size());
      double padded = padded_radius(n, R);
      // The formula radius must dominate the geometric one (merge happens
      // only when the gap is < R); asserted, not assumed.
      if (geometric > padded + 1e-12 * padded)
        throw std::logic_error("enclosing radius exceeds (3n-1)R/2");
      cand.center = center;
      cand.radius = padded;
      cand.members.insert(cand.members.end(), other.members.begin(),
                          other.members.end());
    }
    out.groups.push_back(std::move(cand));
  }

  for (int i = 0; i < out.m(); ++i) {
    double min_gap = std::numeric_limits<double>::infinity();
    for (int j = 0; j < out.m(); ++j)
      if (j != i)
        min_gap = std::min(min_gap,
                           ball_gap(out.groups[i].center, out.groups[i].radius,
                                    out.groups[j].center, out.groups[j].radius));
    out.groups[i].separation = out.m() > 1 ? min_gap : 0.0;
  }
  return out;
}

double group_distance(const ClusterLayout& layout, int i, Vec3 y) {
  const ClusterGroup& g = layout.groups.at(i);
  return std::max(dist(y, g.center) - g.radius, 0.0);
}

std::optional<int> region_membership(const ClusterLayout& layout, Vec3 y,
                                     double tie_tol) {
  if (layout.groups.empty()) throw std::invalid_argument("empty layout");
  int best = 0;
  double best_d = group_distance(layout, 0, y);
  bool tie = false;
  for (int i = 1; i < layout.m(); ++i) {
    double d = group_distance(layout, i, y);
    if (d < best_d - tie_tol) {
      best = i;
      best_d = d;
      tie = false;
    } else if (d <= best_d + tie_tol) {
      tie = true;
    }
  }
  if (tie) return std::nullopt;
  return best;
}

}  // namespace polaron
