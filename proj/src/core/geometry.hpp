#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "util.hpp"

namespace lnr {

inline constexpr int kMaxDim = 8;

// Small dense types with inline storage; dimensions are runtime (3..kMaxDim).
using Vector = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;

enum class DomainKind { kBall, kEllipsoid, kShell };

/// Implicit-domain descriptor: a level set phi with analytic gradient and
/// Hessian, phi < 0 inside, together with the bounding box and the uniform
/// sphere radius r0 (every boundary point admits interior and exterior
/// tangent balls of radius r0).
class DomainDescriptor {
 public:
  static DomainDescriptor ball(int dim, const Vector& center, double radius);
  static DomainDescriptor ellipsoid(int dim, const Vector& center, const Vector& semi_axes);
  static DomainDescriptor shell(int dim, const Vector& center, double inner_radius,
                                double outer_radius);

  int dim() const { return dim_; }
  DomainKind kind() const { return kind_; }
  double sphere_radius() const { return r0_; }
  const Vector& bbox_lo() const { return bbox_lo_; }
  const Vector& bbox_hi() const { return bbox_hi_; }
  const Vector& center() const { return center_; }
  double radius() const { return radius_; }
  double inner_radius() const { return inner_; }
  double outer_radius() const { return outer_; }
  const Vector& semi_axes() const { return axes_; }

  double phi(const Vector& x) const;
  Vector grad_phi(const Vector& x) const;
  Matrix hess_phi(const Vector& x) const;
  bool contains(const Vector& x) const { return phi(x) < 0.0; }

  /// Closed-form distance to the boundary (positive inside). Available for
  /// ball and shell; used as a cross-check against the projection path.
  std::optional<double> exact_distance(const Vector& x) const;

 private:
  DomainDescriptor() = default;
  int dim_ = 0;
  DomainKind kind_ = DomainKind::kBall;
  Vector center_;
  double radius_ = 0.0;          // ball
  double inner_ = 0.0, outer_ = 0.0;  // shell
  Vector axes_;                  // ellipsoid
  double r0_ = 0.0;
  Vector bbox_lo_, bbox_hi_;
};

/// Distance data at a point: d (signed; positive inside), the unit gradient
/// of the signed distance (points inward), its Laplacian, the nearest
/// boundary point Q, and the mean curvature of the boundary at Q.
///
/// Conventions: |grad_d| = 1 wherever the nearest point is unique; the unit
/// sphere has mean curvature +1; on the boundary 2*laplacian_d = (2-2n)*H.
struct DistanceData {
  double d = 0.0;
  Vector grad_d;
  double laplacian_d = 0.0;
  Vector nearest;
  double mean_curvature = 0.0;
};

/// Nearest-point projection and distance data. For interior points with
/// d < r0 the nearest point is unique and all fields are meaningful; beyond
/// r0 only d is guaranteed. Exterior points are signalled by d < 0.
DistanceData signed_distance(const DomainDescriptor& dom, const Vector& x);

/// Mean curvature of the boundary at a point q with |phi(q)| below the
/// boundary tolerance. Equals the arithmetic mean of the principal
/// curvatures; H = -laplacian_d/(n-1) on the boundary.
double boundary_mean_curvature(const DomainDescriptor& dom, const Vector& q);

/// Principal curvatures at a boundary point, signed with respect to the
/// inward normal of the domain (unit sphere: all +1).
std::vector<double> principal_curvatures(const DomainDescriptor& dom, const Vector& q);

/// Laplacian of the distance function at signed distance d from a boundary
/// point with the given principal curvatures (curvature-sum transport along
/// the normal).
double laplacian_of_distance(const std::vector<double>& kappas, double d);

}  // namespace lnr
