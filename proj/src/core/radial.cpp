#include "radial.hpp"

#include <cmath>
#include <sstream>

namespace lnr {

namespace {

void require_n(int n) {
  if (n < 3) throw ArgumentError("dimension n >= 3 required");
}

double v_exponent(int n) { return -2.0 / (n - 2); }

// two-term expansion of the hyperbolic radius at distance d from a boundary
// sphere with mean curvature H (signed w.r.t. the inward normal)
double two_term_v(double d, double H) { return 2.0 * d - d * d * H; }

void thomas_solve(std::vector<double>& a, std::vector<double>& b, std::vector<double>& c,
                  std::vector<double>& rhs) {
  const std::size_t n = b.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double m = a[i] / b[i - 1];
    b[i] -= m * c[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  rhs[n - 1] /= b[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - c[i] * rhs[i + 1]) / b[i];
}

struct VFormProblem {
  int n = 3;
  const std::vector<double>* r = nullptr;
  std::size_t lo = 0, hi = 0;  // unknown index range [lo, hi)
  bool origin_symmetry = false;
};

double laplacian_at(const VFormProblem& p, const std::vector<double>& v, std::size_t i,
                    double h) {
  if (p.origin_symmetry && i == 0)
    return 2.0 * p.n * (v[1] - v[0]) / (h * h);
  const double rr = (*p.r)[i];
  return (v[i + 1] - 2.0 * v[i] + v[i - 1]) / (h * h) +
         (p.n - 1.0) / rr * (v[i + 1] - v[i - 1]) / (2.0 * h);
}

double gradient_at(const VFormProblem& p, const std::vector<double>& v, std::size_t i,
                   double h) {
  if (p.origin_symmetry && i == 0) return 0.0;
  return (v[i + 1] - v[i - 1]) / (2.0 * h);
}

double residual_norm(const VFormProblem& p, const std::vector<double>& v, double h) {
  double rn = 0.0;
  for (std::size_t i = p.lo; i < p.hi; ++i) {
    const double lap = laplacian_at(p, v, i, h);
    const double g = gradient_at(p, v, i, h);
    const double F = v[i] * lap - 0.5 * p.n * (g * g - 4.0);
    rn = std::max(rn, std::fabs(F));
  }
  return rn;
}

// Damped Newton on the radial hyperbolic-radius equation
//   v (v'' + (n-1)/r v') = (n/2)(|v'|^2 - 4),
// Dirichlet data held fixed outside [lo, hi). Positivity is preserved by the
// line search.
void newton_v_form(const VFormProblem& p, std::vector<double>& v, double h, double tol,
                   int max_iter) {
  const std::size_t count = p.hi - p.lo;
  std::vector<double> a(count), b(count), c(count), rhs(count);
  std::vector<double> trial(v.size());
  std::vector<double> history;

  // Roundoff floor of the residual: second differences of O(vmax) values
  // divided by h^2 cannot cancel below this level.
  double vmax = 0.0;
  for (double vv : v) vmax = std::max(vmax, std::fabs(vv));
  const double eps = std::numeric_limits<double>::epsilon();
  const double tol_eff = std::max(tol, 32.0 * eps * vmax / (h * h));

  double rn = residual_norm(p, v, h);
  for (int it = 0; it < max_iter; ++it) {
    history.push_back(rn);
    if (rn <= tol_eff) return;

    for (std::size_t k = 0; k < count; ++k) {
      const std::size_t i = p.lo + k;
      const double lap = laplacian_at(p, v, i, h);
      const double g = gradient_at(p, v, i, h);
      rhs[k] = -(v[i] * lap - 0.5 * p.n * (g * g - 4.0));
      if (p.origin_symmetry && i == 0) {
        b[k] = lap - v[0] * 2.0 * p.n / (h * h);
        c[k] = v[0] * 2.0 * p.n / (h * h);
        a[k] = 0.0;
      } else {
        const double rr = (*p.r)[i];
        const double off = 1.0 / (h * h);
        const double drift = (p.n - 1.0) / rr / (2.0 * h);
        b[k] = lap - 2.0 * v[i] / (h * h);
        a[k] = v[i] * (off - drift) + p.n * g / (2.0 * h);
        c[k] = v[i] * (off + drift) - p.n * g / (2.0 * h);
      }
    }
    // Dirichlet neighbours beyond the unknown range contribute through the
    // residual only
    a[0] = 0.0;
    c[count - 1] = 0.0;
    thomas_solve(a, b, c, rhs);

    double step = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 50; ++ls) {
      trial = v;
      bool positive = true;
      for (std::size_t k = 0; k < count; ++k) {
        const std::size_t i = p.lo + k;
        trial[i] += step * rhs[k];
        if (!(trial[i] > 0.0)) positive = false;
      }
      if (positive) {
        const double rn_try = residual_norm(p, trial, h);
        if (rn_try < rn) {
          v = trial;
          rn = rn_try;
          accepted = true;
          break;
        }
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (rn <= 4.0 * tol_eff) return;  // stagnated at the roundoff floor
      history.push_back(rn);
      throw ConvergenceError("radial Newton stalled; residual " + std::to_string(rn), history);
    }
  }
  if (rn > 4.0 * tol_eff) {
    history.push_back(rn);
    throw ConvergenceError("radial Newton did not reach tolerance; residual " +
                               std::to_string(rn),
                           history);
  }
}

constexpr double kNewtonTol = 1e-12;
constexpr int kNewtonMaxIter = 120;

}  // namespace

double interior_sphere_barrier(int n, double r0, double dist_from_center) {
  require_n(n);
  if (r0 <= 0) throw ArgumentError("interior_sphere_barrier: r0 must be positive");
  if (!(dist_from_center >= 0.0 && dist_from_center < r0))
    throw MathDomainError("interior_sphere_barrier: need 0 <= dist < r0");
  const double base = r0 - dist_from_center * dist_from_center / r0;
  return std::pow(base, 1.0 - 0.5 * n);
}

double exterior_sphere_barrier(int n, double r0, double dist_from_center) {
  require_n(n);
  if (r0 <= 0) throw ArgumentError("exterior_sphere_barrier: r0 must be positive");
  if (!(dist_from_center > r0))
    throw MathDomainError("exterior_sphere_barrier: need dist > r0");
  const double base = dist_from_center * dist_from_center / r0 - r0;
  return std::pow(base, 1.0 - 0.5 * n);
}

double RadialProfile::distance(std::size_t i) const {
  switch (kind) {
    case ProfileKind::kMaximalInBall:
      return ball_radius - r[i];
    case ProfileKind::kShellMaximal:
      return std::min(r[i] - inner_radius, outer_radius - r[i]);
    case ProfileKind::kExteriorBarrier:
      return r[i] - barrier_r0;
  }
  return 0.0;
}

double RadialProfile::w(std::size_t i) const {
  const double d = distance(i);
  if (!(d > 1e-14)) return std::numeric_limits<double>::quiet_NaN();
  return (v[i] - 2.0 * d) / (d * d);
}

double RadialProfile::residual_max() const {
  if (size() < 3) return 0.0;
  const double h = r[1] - r[0];
  VFormProblem p;
  p.n = n;
  p.r = &r;
  p.origin_symmetry = kind == ProfileKind::kMaximalInBall && r[0] == 0.0;
  p.lo = (kind == ProfileKind::kMaximalInBall) ? 0 : 1;
  p.hi = size() - 1;
  return residual_norm(p, v, h);
}

RadialProfile solve_radial_ball(int n, double radius, int points, double m) {
  require_n(n);
  if (radius <= 0) throw ArgumentError("solve_radial_ball: radius must be positive");
  if (points < 16) throw ArgumentError("solve_radial_ball: need at least 16 grid points");
  if (!(m > 0)) throw ArgumentError("solve_radial_ball: boundary value must be positive");

  const double h = radius / (points - 1);
  const bool maximal = std::isinf(m);
  const std::size_t last = maximal ? static_cast<std::size_t>(points - 5)
                                   : static_cast<std::size_t>(points - 1);

  RadialProfile prof;
  prof.n = n;
  prof.kind = ProfileKind::kMaximalInBall;
  prof.boundary_value = m;
  prof.ball_radius = radius;
  prof.r.resize(last + 1);
  prof.v.resize(last + 1);
  for (std::size_t i = 0; i <= last; ++i) prof.r[i] = static_cast<double>(i) * h;

  const double H = 1.0 / radius;
  for (std::size_t i = 0; i <= last; ++i) prof.v[i] = two_term_v(radius - prof.r[i], H);
  prof.v[last] = maximal ? two_term_v(radius - prof.r[last], H) : std::pow(m, v_exponent(n));

  VFormProblem p;
  p.n = n;
  p.r = &prof.r;
  p.lo = 0;
  p.hi = last;
  p.origin_symmetry = true;
  newton_v_form(p, prof.v, h, kNewtonTol, kNewtonMaxIter);

  prof.u.resize(prof.v.size());
  for (std::size_t i = 0; i < prof.v.size(); ++i)
    prof.u[i] = std::pow(prof.v[i], -0.5 * (n - 2));
  return prof;
}

RadialProfile solve_radial_shell(int n, double inner_radius, double outer_radius, int points,
                                 double m) {
  require_n(n);
  if (!(0 < inner_radius && inner_radius < outer_radius))
    throw ArgumentError("solve_radial_shell: need 0 < inner < outer radius");
  if (points < 16) throw ArgumentError("solve_radial_shell: need at least 16 grid points");
  if (!(m > 0)) throw ArgumentError("solve_radial_shell: boundary value must be positive");

  const double h = (outer_radius - inner_radius) / (points - 1);
  const bool maximal = std::isinf(m);
  const std::size_t first = maximal ? 4 : 0;
  const std::size_t last = maximal ? static_cast<std::size_t>(points - 5)
                                   : static_cast<std::size_t>(points - 1);
  if (last <= first + 1) throw ArgumentError("solve_radial_shell: grid too small");

  RadialProfile prof;
  prof.n = n;
  prof.kind = ProfileKind::kShellMaximal;
  prof.boundary_value = m;
  prof.inner_radius = inner_radius;
  prof.outer_radius = outer_radius;

  const std::size_t count = last - first + 1;
  prof.r.resize(count);
  prof.v.resize(count);
  for (std::size_t i = 0; i < count; ++i)
    prof.r[i] = inner_radius + static_cast<double>(first + i) * h;

  const double Hin = -1.0 / inner_radius;  // curved away from the shell
  const double Hout = 1.0 / outer_radius;
  for (std::size_t i = 0; i < count; ++i) {
    const double vin = two_term_v(prof.r[i] - inner_radius, Hin);
    const double vout = two_term_v(outer_radius - prof.r[i], Hout);
    prof.v[i] = 1.0 / (1.0 / vin + 1.0 / vout);
  }
  if (maximal) {
    prof.v.front() = two_term_v(prof.r.front() - inner_radius, Hin);
    prof.v.back() = two_term_v(outer_radius - prof.r.back(), Hout);
  } else {
    prof.v.front() = prof.v.back() = std::pow(m, v_exponent(n));
  }

  VFormProblem p;
  p.n = n;
  p.r = &prof.r;
  p.lo = 1;
  p.hi = count - 1;
  p.origin_symmetry = false;
  newton_v_form(p, prof.v, h, kNewtonTol, kNewtonMaxIter);

  prof.u.resize(count);
  for (std::size_t i = 0; i < count; ++i) prof.u[i] = std::pow(prof.v[i], -0.5 * (n - 2));
  return prof;
}

RadialProfile exterior_barrier_profile(int n, double r0, double r_max, int points) {
  require_n(n);
  if (!(r_max > r0 && r0 > 0)) throw ArgumentError("exterior_barrier_profile: need r_max > r0 > 0");
  if (points < 2) throw ArgumentError("exterior_barrier_profile: need at least 2 points");
  RadialProfile prof;
  prof.n = n;
  prof.kind = ProfileKind::kExteriorBarrier;
  prof.barrier_r0 = r0;
  const double h = (r_max - r0) / points;
  prof.r.resize(static_cast<std::size_t>(points));
  prof.u.resize(prof.r.size());
  prof.v.resize(prof.r.size());
  for (std::size_t i = 0; i < prof.r.size(); ++i) {
    prof.r[i] = r0 + static_cast<double>(i + 1) * h;
    prof.u[i] = exterior_sphere_barrier(n, r0, prof.r[i]);
    prof.v[i] = prof.r[i] * prof.r[i] / r0 - r0;
  }
  return prof;
}

std::vector<RadialProfile> solve_radial_ladder(int n, double radius, int points,
                                               const std::vector<double>& ladder,
                                               bool include_maximal) {
  for (std::size_t i = 1; i < ladder.size(); ++i)
    if (!(ladder[i] > ladder[i - 1]))
      throw ArgumentError("solve_radial_ladder: ladder must be strictly increasing");

  std::vector<RadialProfile> out;
  out.reserve(ladder.size() + 1);
  for (double m : ladder) out.push_back(solve_radial_ball(n, radius, points, m));
  if (include_maximal) out.push_back(solve_radial_ball(n, radius, points));

  constexpr double kMonotoneTol = 1e-10;
  for (std::size_t k = 1; k < out.size(); ++k) {
    const RadialProfile& lo = out[k - 1];
    const RadialProfile& hi = out[k];
    const std::size_t common = std::min(lo.size(), hi.size());
    for (std::size_t i = 0; i < common; ++i) {
      if (lo.u[i] > hi.u[i] + kMonotoneTol) {
        std::ostringstream os;
        os << "non-monotone m-sequence detected at r = " << lo.r[i] << " (" << lo.u[i] << " > "
           << hi.u[i] << ")";
        throw ConvergenceError(os.str(), {lo.u[i] - hi.u[i]});
      }
    }
  }
  return out;
}

}  // namespace lnr
