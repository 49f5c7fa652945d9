#include "geometry.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace lnr {

namespace {

void require_dim(int dim) {
  if (dim < 3 || dim > kMaxDim) {
    std::ostringstream os;
    os << "dimension n must satisfy 3 <= n <= " << kMaxDim << ", got " << dim;
    throw ArgumentError(os.str());
  }
}

constexpr double kBoundaryTol = 1e-9;
constexpr double kProjectionTol = 1e-13;

}  // namespace

DomainDescriptor DomainDescriptor::ball(int dim, const Vector& center, double radius) {
  require_dim(dim);
  if (radius <= 0) throw ArgumentError("ball: radius must be positive");
  if (center.size() != dim) throw ArgumentError("ball: center has wrong dimension");
  DomainDescriptor d;
  d.dim_ = dim;
  d.kind_ = DomainKind::kBall;
  d.center_ = center;
  d.radius_ = radius;
  d.r0_ = radius;
  d.bbox_lo_ = center.array() - radius;
  d.bbox_hi_ = center.array() + radius;
  return d;
}

DomainDescriptor DomainDescriptor::ellipsoid(int dim, const Vector& center,
                                             const Vector& semi_axes) {
  require_dim(dim);
  if (center.size() != dim || semi_axes.size() != dim)
    throw ArgumentError("ellipsoid: center/semi-axes have wrong dimension");
  if ((semi_axes.array() <= 0).any()) throw ArgumentError("ellipsoid: semi-axes must be positive");
  DomainDescriptor d;
  d.dim_ = dim;
  d.kind_ = DomainKind::kEllipsoid;
  d.center_ = center;
  d.axes_ = semi_axes;
  // osculating bound: worst radius of curvature is (min axis)^2 / (max axis)
  const double amin = semi_axes.minCoeff();
  const double amax = semi_axes.maxCoeff();
  d.r0_ = amin * amin / amax;
  d.bbox_lo_ = center - semi_axes;
  d.bbox_hi_ = center + semi_axes;
  return d;
}

DomainDescriptor DomainDescriptor::shell(int dim, const Vector& center, double inner_radius,
                                         double outer_radius) {
  require_dim(dim);
  if (!(0 < inner_radius && inner_radius < outer_radius))
    throw ArgumentError("shell: need 0 < inner radius < outer radius");
  if (center.size() != dim) throw ArgumentError("shell: center has wrong dimension");
  DomainDescriptor d;
  d.dim_ = dim;
  d.kind_ = DomainKind::kShell;
  d.center_ = center;
  d.inner_ = inner_radius;
  d.outer_ = outer_radius;
  d.r0_ = std::min(inner_radius, 0.5 * (outer_radius - inner_radius));
  d.bbox_lo_ = center.array() - outer_radius;
  d.bbox_hi_ = center.array() + outer_radius;
  return d;
}

double DomainDescriptor::phi(const Vector& x) const {
  const Vector y = x - center_;
  const double r2 = y.squaredNorm();
  switch (kind_) {
    case DomainKind::kBall:
      return r2 - radius_ * radius_;
    case DomainKind::kEllipsoid: {
      double s = -1.0;
      for (int i = 0; i < dim_; ++i) s += y[i] * y[i] / (axes_[i] * axes_[i]);
      return s;
    }
    case DomainKind::kShell:
      return (r2 - inner_ * inner_) * (r2 - outer_ * outer_);
  }
  return 0.0;
}

Vector DomainDescriptor::grad_phi(const Vector& x) const {
  const Vector y = x - center_;
  switch (kind_) {
    case DomainKind::kBall:
      return 2.0 * y;
    case DomainKind::kEllipsoid: {
      Vector g(dim_);
      for (int i = 0; i < dim_; ++i) g[i] = 2.0 * y[i] / (axes_[i] * axes_[i]);
      return g;
    }
    case DomainKind::kShell: {
      const double r2 = y.squaredNorm();
      return (2.0 * (2.0 * r2 - inner_ * inner_ - outer_ * outer_)) * y;
    }
  }
  return Vector::Zero(dim_);
}

Matrix DomainDescriptor::hess_phi(const Vector& x) const {
  const Vector y = x - center_;
  switch (kind_) {
    case DomainKind::kBall:
      return 2.0 * Matrix::Identity(dim_, dim_);
    case DomainKind::kEllipsoid: {
      Matrix h = Matrix::Zero(dim_, dim_);
      for (int i = 0; i < dim_; ++i) h(i, i) = 2.0 / (axes_[i] * axes_[i]);
      return h;
    }
    case DomainKind::kShell: {
      const double r2 = y.squaredNorm();
      Matrix h = (2.0 * (2.0 * r2 - inner_ * inner_ - outer_ * outer_)) *
                 Matrix::Identity(dim_, dim_);
      h += 8.0 * (y * y.transpose());
      return h;
    }
  }
  return Matrix::Zero(dim_, dim_);
}

std::optional<double> DomainDescriptor::exact_distance(const Vector& x) const {
  const double r = (x - center_).norm();
  switch (kind_) {
    case DomainKind::kBall:
      return radius_ - r;
    case DomainKind::kShell:
      return std::min(r - inner_, outer_ - r);
    case DomainKind::kEllipsoid:
      return std::nullopt;
  }
  return std::nullopt;
}

namespace {

// First-order level-set projection steps seeding the Lagrange-Newton solve.
Vector seed_projection(const DomainDescriptor& dom, const Vector& x) {
  Vector y = x;
  for (int it = 0; it < 24; ++it) {
    const double f = dom.phi(y);
    Vector g = dom.grad_phi(y);
    double g2 = g.squaredNorm();
    if (g2 < 1e-28) {
      // stuck on a critical point of phi (e.g. the ball center): nudge
      y[0] += 1e-6 * (1.0 + y.cwiseAbs().maxCoeff());
      g = dom.grad_phi(y);
      g2 = g.squaredNorm();
      if (g2 < 1e-28) break;
    }
    const Vector step = (f / g2) * g;
    y -= step;
    if (std::fabs(dom.phi(y)) < 1e-14 * (1.0 + std::fabs(f))) break;
  }
  return y;
}

struct Projection {
  Vector q;
  bool converged = false;
  double residual = 0.0;
};

// Damped Newton on the Lagrange system for the nearest boundary point:
//   q - x + lambda * grad_phi(q) = 0,  phi(q) = 0.
Projection project_to_boundary(const DomainDescriptor& dom, const Vector& x) {
  const int n = dom.dim();
  Vector q = seed_projection(dom, x);
  Vector g = dom.grad_phi(q);
  double lambda = 0.0;
  {
    const double g2 = g.squaredNorm();
    if (g2 > 0) lambda = (x - q).dot(g) / g2;
  }

  using KktMatrix =
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim + 1,
                    kMaxDim + 1>;
  using KktVector = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim + 1, 1>;

  auto residual = [&](const Vector& qq, double ll, KktVector& F) {
    const Vector gg = dom.grad_phi(qq);
    F.head(n) = qq - x + ll * gg;
    F[n] = dom.phi(qq);
    return F.template lpNorm<Eigen::Infinity>();
  };

  KktVector F(n + 1);
  double rnorm = residual(q, lambda, F);
  const double scale = 1.0 + x.cwiseAbs().maxCoeff();

  Projection out;
  for (int it = 0; it < 120; ++it) {
    if (rnorm <= kProjectionTol * scale) {
      out.q = q;
      out.converged = true;
      out.residual = rnorm;
      return out;
    }
    KktMatrix J(n + 1, n + 1);
    J.setZero();
    const Matrix H = dom.hess_phi(q);
    g = dom.grad_phi(q);
    J.topLeftCorner(n, n) = Matrix::Identity(n, n) + lambda * H;
    J.block(0, n, n, 1) = g;
    J.block(n, 0, 1, n) = g.transpose();
    const KktVector step = J.fullPivLu().solve(-F);

    double t = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      const Vector q_try = q + t * step.head(n);
      const double l_try = lambda + t * step[n];
      KktVector Ftry(n + 1);
      const double r_try = residual(q_try, l_try, Ftry);
      if (r_try < rnorm) {
        q = q_try;
        lambda = l_try;
        F = Ftry;
        rnorm = r_try;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;
  }
  out.q = q;
  out.converged = rnorm <= 1e-10 * scale;  // accept slightly looser than target
  out.residual = rnorm;
  return out;
}

}  // namespace

std::vector<double> principal_curvatures(const DomainDescriptor& dom, const Vector& q) {
  const int n = dom.dim();
  const Vector g = dom.grad_phi(q);
  const double gnorm = g.norm();
  if (gnorm < 1e-12) throw SingularityError("degenerate level-set gradient at boundary point");
  const Vector nu = g / gnorm;  // outward normal (phi < 0 inside)

  // shape operator w.r.t. the outward normal, restricted to the tangent space
  const Matrix H = dom.hess_phi(q);
  Matrix P = Matrix::Identity(n, n) - nu * nu.transpose();
  Matrix S = (P * H * P) / gnorm;

  // orthonormal tangent basis via Householder complement of nu
  Eigen::Index pivot;
  nu.cwiseAbs().maxCoeff(&pivot);
  Vector w = nu;
  w[pivot] += (nu[pivot] >= 0 ? 1.0 : -1.0);
  w.normalize();
  Matrix Q = Matrix::Identity(n, n) - 2.0 * (w * w.transpose());
  // columns of Q orthogonal to nu are the tangent basis (the pivot column is ±nu)
  Matrix B(n, n - 1);
  int col = 0;
  for (int j = 0; j < n; ++j) {
    if (j == pivot) continue;
    B.col(col++) = Q.col(j);
  }

  Matrix T = B.transpose() * S * B;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(T);
  std::vector<double> kappas(static_cast<std::size_t>(n - 1));
  for (int i = 0; i < n - 1; ++i) kappas[static_cast<std::size_t>(i)] = eig.eigenvalues()[i];
  return kappas;
}

double laplacian_of_distance(const std::vector<double>& kappas, double d) {
  double s = 0.0;
  for (double k : kappas) s -= k / (1.0 - d * k);
  return s;
}

double boundary_mean_curvature(const DomainDescriptor& dom, const Vector& q) {
  if (std::fabs(dom.phi(q)) > kBoundaryTol * (1.0 + q.cwiseAbs().maxCoeff()))
    throw ArgumentError("boundary_mean_curvature: point is not on the boundary");
  const auto kappas = principal_curvatures(dom, q);
  double sum = 0.0;
  for (double k : kappas) sum += k;
  return sum / static_cast<double>(dom.dim() - 1);
}

DistanceData signed_distance(const DomainDescriptor& dom, const Vector& x) {
  if (x.size() != dom.dim()) throw ArgumentError("signed_distance: point has wrong dimension");
  const Projection proj = project_to_boundary(dom, x);
  if (!proj.converged) {
    std::ostringstream os;
    os << "nearest-point projection did not converge (residual " << proj.residual
       << ", last iterate";
    for (int i = 0; i < dom.dim(); ++i) os << ' ' << proj.q[i];
    os << ")";
    throw ConvergenceError(os.str(), {proj.residual});
  }

  DistanceData dd;
  dd.nearest = proj.q;
  const Vector diff = x - proj.q;
  const double dist = diff.norm();
  const bool inside = dom.phi(x) < 0.0;
  dd.d = inside ? dist : -dist;

  if (dist > 1e-14) {
    dd.grad_d = (inside ? 1.0 : -1.0) * diff / dist;
  } else {
    const Vector g = dom.grad_phi(proj.q);
    dd.grad_d = -g / g.norm();  // inward normal
  }

  const auto kappas = principal_curvatures(dom, proj.q);
  double sum = 0.0;
  for (double k : kappas) sum += k;
  dd.mean_curvature = sum / static_cast<double>(dom.dim() - 1);
  dd.laplacian_d = laplacian_of_distance(kappas, dd.d);
  return dd;
}

}  // namespace lnr
