#pragma once

#include <limits>
#include <vector>

#include "util.hpp"

namespace lnr {

/// Exact blow-up solution in the ball of radius r0: u(dist) with dist the
/// distance from the ball center, 0 <= dist < r0.
double interior_sphere_barrier(int n, double r0, double dist_from_center);

/// Exact blow-up solution in the complement of the ball of radius r0,
/// dist > r0.
double exterior_sphere_barrier(int n, double r0, double dist_from_center);

enum class ProfileKind { kMaximalInBall, kExteriorBarrier, kShellMaximal };

/// One-dimensional radial solution. For balls/shells this is the ground-truth
/// oracle for the grid solver; the blow-up boundaries carry truncated
/// two-term asymptotic data when the boundary value is infinite.
struct RadialProfile {
  int n = 3;
  ProfileKind kind = ProfileKind::kMaximalInBall;
  double boundary_value = std::numeric_limits<double>::infinity();

  std::vector<double> r;  // increasing radial grid
  std::vector<double> u;  // positive solution values
  std::vector<double> v;  // hyperbolic radius u^{-2/(n-2)}

  // geometry the profile was solved on
  double ball_radius = 0.0;
  double inner_radius = 0.0, outer_radius = 0.0;
  double barrier_r0 = 0.0;

  std::size_t size() const { return r.size(); }

  /// Distance from node i to the blow-up boundary of the geometry.
  double distance(std::size_t i) const;

  /// Renormalized unknown w = (v - 2d)/d^2 at node i (NaN where d = 0).
  double w(std::size_t i) const;

  /// Max-norm residual of the discrete radial operator over solved nodes.
  double residual_max() const;
};

inline constexpr double kInfiniteBoundary = std::numeric_limits<double>::infinity();

/// Solves the radial reduction of the blow-up problem on a ball: boundary
/// value m at r = radius, or the maximal solution (m infinite) via truncation
/// at four grid cells with two-term asymptotic data. points counts the grid
/// nodes on [0, radius]; the symmetry condition u'(0) = 0 closes the r = 0
/// stencil.
RadialProfile solve_radial_ball(int n, double radius, int points,
                                double m = kInfiniteBoundary);

/// Shell analogue with blow-up (or value m) at both boundary spheres.
RadialProfile solve_radial_shell(int n, double inner_radius, double outer_radius, int points,
                                 double m = kInfiniteBoundary);

/// Exterior sphere solution sampled as a profile on [r0*(1+margin), r_max].
RadialProfile exterior_barrier_profile(int n, double r0, double r_max, int points);

/// Solves an increasing ladder of boundary values followed by the truncated
/// maximal profile, verifying pointwise monotonicity along the way.
std::vector<RadialProfile> solve_radial_ladder(int n, double radius, int points,
                                               const std::vector<double>& ladder,
                                               bool include_maximal = true);

}  // namespace lnr
