#include "comparison.hpp"

#include <cmath>
#include <random>

namespace lnr {

double apply_L_radial(double g, double gp, double gpp, const DistanceData& dd, int n) {
  const double d = dd.d;
  return d * d * (gpp + gp * dd.laplacian_d) + (4.0 - n) * d * gp + (2.0 - 2.0 * n) * g;
}

double closed_form_L_d(const DistanceData& dd, int n) {
  return 3.0 * (2.0 - n) * dd.d + dd.d * dd.d * dd.laplacian_d;
}

double closed_form_L_d_alpha(const DistanceData& dd, int n, double alpha) {
  // -L(d^alpha) = d^alpha [(alpha+2)(n-1-alpha) - alpha d Lap d]
  return -std::pow(dd.d, alpha) *
         ((alpha + 2.0) * (n - 1.0 - alpha) - alpha * dd.d * dd.laplacian_d);
}

double closed_form_L_singular(const DistanceData& dd, int n, double B) {
  return -(n * B + 2.0 * dd.laplacian_d) / dd.d - B * dd.laplacian_d;
}

SingularBarrierValues singular_barrier_values(const DistanceData& dd, const BarrierSpec& spec,
                                              int n) {
  if (!(dd.d > 0)) throw MathDomainError("singular_barrier_values: pole at d = 0");
  SingularBarrierValues out;
  out.barrier = spec.epsilon * (1.0 / (dd.d * dd.d) + spec.B / dd.d);
  out.image = closed_form_L_singular(dd, n, spec.B);
  return out;
}

namespace {

// interior sample points with d in (dmin, dmax), drawn uniformly in the
// bounding box with rejection
std::vector<Vector> sample_interior(const DomainDescriptor& dom, int samples, unsigned seed,
                                    double dmin, double dmax,
                                    std::vector<DistanceData>* data_out = nullptr) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::vector<Vector> pts;
  pts.reserve(static_cast<std::size_t>(samples));
  const int n = dom.dim();
  Vector x(n);
  int guard = 0;
  while (static_cast<int>(pts.size()) < samples && guard < samples * 10000) {
    ++guard;
    for (int a = 0; a < n; ++a)
      x[a] = dom.bbox_lo()[a] + uni(rng) * (dom.bbox_hi()[a] - dom.bbox_lo()[a]);
    if (!dom.contains(x)) continue;
    const DistanceData dd = signed_distance(dom, x);
    if (!(dd.d > dmin && dd.d < dmax)) continue;
    pts.push_back(x);
    if (data_out) data_out->push_back(dd);
  }
  if (static_cast<int>(pts.size()) < samples)
    throw ArgumentError("sample_interior: rejection sampling exhausted");
  return pts;
}

void track(CheckReport& rep, double margin, double tol) {
  ++rep.samples;
  rep.worst_margin = std::min(rep.worst_margin, margin);
  if (margin < -tol) ++rep.violations;
}

}  // namespace

CheckReport operator_identity_check(const DomainDescriptor& dom, int samples, unsigned seed,
                                    double alpha, double B, double tol) {
  const int n = dom.dim();
  CheckReport rep;
  rep.name = "operator-identities";
  std::vector<DistanceData> dds;
  sample_interior(dom, samples, seed, 1e-3 * dom.sphere_radius(), 0.95 * dom.sphere_radius(),
                  &dds);

  double worst = 0.0;
  for (const DistanceData& dd : dds) {
    const double d = dd.d;
    // L(d): g = d
    const double e1 = std::fabs(apply_L_radial(d, 1.0, 0.0, dd, n) - closed_form_L_d(dd, n));
    // L(d^alpha)
    const double ga = std::pow(d, alpha);
    const double gap = alpha * std::pow(d, alpha - 1.0);
    const double gapp = alpha * (alpha - 1.0) * std::pow(d, alpha - 2.0);
    const double e2 =
        std::fabs(apply_L_radial(ga, gap, gapp, dd, n) - closed_form_L_d_alpha(dd, n, alpha));
    // L(d^-2 + B d^-1)
    const double gs = 1.0 / (d * d) + B / d;
    const double gsp = -2.0 / (d * d * d) - B / (d * d);
    const double gspp = 6.0 / (d * d * d * d) + 2.0 * B / (d * d * d);
    const double e3 =
        std::fabs(apply_L_radial(gs, gsp, gspp, dd, n) - closed_form_L_singular(dd, n, B));
    const double err = std::max({e1, e2, e3});
    worst = std::max(worst, err);
    ++rep.samples;
    if (err > tol) ++rep.violations;
  }
  rep.worst_margin = tol - worst;
  rep.metrics["max_deviation"] = worst;
  rep.metrics["tolerance"] = tol;
  rep.pass = rep.violations == 0;
  return rep;
}

CheckReport barrier_sign_check(const DomainDescriptor& dom, const BarrierSpec& spec, int samples,
                               unsigned seed) {
  const int n = dom.dim();
  CheckReport rep;
  rep.name = "barrier-signs";
  const double delta = spec.delta > 0 ? spec.delta : dom.sphere_radius() / 8.0;
  std::vector<DistanceData> dds;
  sample_interior(dom, samples, seed, 1e-4 * delta, delta, &dds);

  for (const DistanceData& dd : dds) {
    switch (spec.kind) {
      case BarrierKind::kAlphaSupersolution: {
        // -L(d^alpha) = d^alpha * bracket with bracket >= 0 for small delta
        const double bracket =
            (spec.alpha + 2.0) * (n - 1.0 - spec.alpha) - spec.alpha * dd.d * dd.laplacian_d;
        track(rep, bracket, 0.0);
        break;
      }
      case BarrierKind::kEpsilonSingular: {
        const double invariant = n * spec.B + (2.0 + spec.B * dd.d) * dd.laplacian_d;
        const double image = closed_form_L_singular(dd, n, spec.B);
        track(rep, invariant, 0.0);
        track(rep, -image, 0.0);  // image must be <= 0
        break;
      }
      case BarrierKind::kW0PlusAd: {
        const double cond = -(2.0 * (2.0 - n) + dd.d * dd.laplacian_d);  // >= 0 required
        track(rep, cond, 0.0);
        break;
      }
      case BarrierKind::kSphereSandwich:
        throw ArgumentError("barrier_sign_check: sandwich has no sign condition");
    }
  }
  rep.metrics["delta"] = delta;
  rep.pass = rep.violations == 0;
  return rep;
}

std::optional<double> select_delta(const DomainDescriptor& dom, const BarrierSpec& spec,
                                   int samples, unsigned seed) {
  const double r0 = dom.sphere_radius();
  for (double frac : {0.5, 0.25, 0.125}) {
    BarrierSpec trial = spec;
    trial.delta = frac * r0;
    const CheckReport rep = barrier_sign_check(dom, trial, samples, seed);
    if (rep.pass) return trial.delta;
  }
  return std::nullopt;
}

CheckReport sphere_sandwich_check(const ScalarField& u, double tol) {
  const MaskedGrid& g = *u.grid;
  const int n = g.dim();
  const double r0 = g.domain().sphere_radius();
  CheckReport rep;
  rep.name = "sphere-sandwich";

  for (std::int64_t idx = 0; idx < g.lattice_size(); ++idx) {
    const double uval = u[idx];
    if (!std::isfinite(uval) || !g.has_distance(idx)) continue;
    const double d = g.d_at(idx);
    if (!(d > 0) || d > r0) continue;
    const double lower = std::pow(2.0 * d + d * d / r0, 1.0 - 0.5 * n);
    const double upper = std::pow(2.0 * d - d * d / r0, 1.0 - 0.5 * n);
    track(rep, std::min(uval - lower, upper - uval), tol);
  }
  rep.metrics["tolerance"] = tol;
  rep.pass = rep.violations == 0;
  return rep;
}

CheckReport profile_sandwich_check(const RadialProfile& prof, double r0, double tol) {
  CheckReport rep;
  rep.name = "profile-sandwich";
  const int n = prof.n;
  for (std::size_t i = 0; i < prof.size(); ++i) {
    const double d = prof.distance(i);
    if (!(d > 0) || d > r0) continue;
    const double lower = std::pow(2.0 * d + d * d / r0, 1.0 - 0.5 * n);
    const double upper = std::pow(2.0 * d - d * d / r0, 1.0 - 0.5 * n);
    track(rep, std::min(prof.u[i] - lower, upper - prof.u[i]), tol);
  }
  rep.metrics["tolerance"] = tol;
  rep.pass = rep.violations == 0;
  return rep;
}

CheckReport profile_w_bound_check(const RadialProfile& prof, double r0, double tol) {
  CheckReport rep;
  rep.name = "profile-w-bound";
  double wmax = 0.0;
  for (std::size_t i = 0; i < prof.size(); ++i) {
    const double d = prof.distance(i);
    if (!(d > 0) || d > r0) continue;
    const double w = prof.w(i);
    if (!std::isfinite(w)) continue;
    wmax = std::max(wmax, std::fabs(w));
    track(rep, 1.0 / r0 + tol - std::fabs(w), 0.0);
  }
  rep.metrics["max_abs_w"] = wmax;
  rep.metrics["bound"] = 1.0 / r0;
  rep.pass = rep.violations == 0;
  return rep;
}

CheckReport verify_tilde_w_bound(const ScalarField& w, const std::vector<double>& shells,
                                 double A, double delta, double slack) {
  const MaskedGrid& g = *w.grid;
  CheckReport rep;
  rep.name = "tilde-w-bound";
  const double width = delta > 0 ? delta : 0.5 * g.domain().sphere_radius();

  std::vector<double> shell_max(shells.size(), 0.0);
  std::vector<std::int64_t> shell_cnt(shells.size(), 0);

  for (std::int64_t idx = 0; idx < g.lattice_size(); ++idx) {
    const double wval = w[idx];
    if (!std::isfinite(wval) || !g.has_distance(idx)) continue;
    const DistanceData dd = g.distance(idx);
    if (!(dd.d > 0) || dd.d > width) continue;
    const double err = std::fabs(wval + dd.mean_curvature);
    track(rep, A * dd.d + slack - err, 0.0);
    for (std::size_t s = 0; s < shells.size(); ++s) {
      const double half = 0.25 * shells[s];
      if (std::fabs(dd.d - shells[s]) <= half) {
        shell_max[s] = std::max(shell_max[s], err);
        ++shell_cnt[s];
      }
    }
  }

  std::vector<double> xs, ys;
  for (std::size_t s = 0; s < shells.size(); ++s) {
    rep.metrics["shell_" + std::to_string(s) + "_d"] = shells[s];
    rep.metrics["shell_" + std::to_string(s) + "_max"] = shell_max[s];
    rep.metrics["shell_" + std::to_string(s) + "_count"] =
        static_cast<double>(shell_cnt[s]);
    if (shell_cnt[s] > 0 && shell_max[s] > 0) {
      xs.push_back(shells[s]);
      ys.push_back(shell_max[s]);
    }
  }
  if (xs.size() >= 2) rep.metrics["fitted_slope"] = fitted_log_slope(xs, ys);
  rep.pass = rep.violations == 0;
  return rep;
}

CheckReport profile_tilde_w_slope(const RadialProfile& prof, const std::vector<double>& shells) {
  CheckReport rep;
  rep.name = "profile-tilde-w-slope";
  const int n = prof.n;

  auto H_at = [&](std::size_t i) {
    switch (prof.kind) {
      case ProfileKind::kMaximalInBall:
        return 1.0 / prof.ball_radius;
      case ProfileKind::kShellMaximal:
        return (prof.r[i] - prof.inner_radius <= prof.outer_radius - prof.r[i])
                   ? -1.0 / prof.inner_radius
                   : 1.0 / prof.outer_radius;
      case ProfileKind::kExteriorBarrier:
        return -1.0 / prof.barrier_r0;
    }
    return 0.0;
  };
  (void)n;

  std::vector<double> shell_max(shells.size(), 0.0);
  std::vector<std::int64_t> shell_cnt(shells.size(), 0);
  for (std::size_t i = 0; i < prof.size(); ++i) {
    const double d = prof.distance(i);
    const double w = prof.w(i);
    if (!(d > 0) || !std::isfinite(w)) continue;
    const double err = std::fabs(w + H_at(i));
    ++rep.samples;
    for (std::size_t s = 0; s < shells.size(); ++s) {
      if (std::fabs(d - shells[s]) <= 0.25 * shells[s]) {
        shell_max[s] = std::max(shell_max[s], err);
        ++shell_cnt[s];
      }
    }
  }
  std::vector<double> xs, ys;
  for (std::size_t s = 0; s < shells.size(); ++s) {
    rep.metrics["shell_" + std::to_string(s) + "_d"] = shells[s];
    rep.metrics["shell_" + std::to_string(s) + "_max"] = shell_max[s];
    if (shell_cnt[s] > 0 && shell_max[s] > 0) {
      xs.push_back(shells[s]);
      ys.push_back(shell_max[s]);
    }
  }
  if (xs.size() >= 2) {
    rep.metrics["fitted_slope"] = fitted_log_slope(xs, ys);
  } else {
    rep.pass = false;
    rep.note = "insufficient shell samples";
  }
  return rep;
}

CheckReport max_principle_witness(const ScalarField& w, const BarrierSpec& spec) {
  const MaskedGrid& g = *w.grid;
  CheckReport rep;
  rep.name = "z-eps-max-principle";
  const double delta = spec.delta > 0 ? spec.delta : 0.5 * g.domain().sphere_radius();
  const double band = g.max_spacing();

  double slice_min = std::numeric_limits<double>::infinity();
  double interior_min = std::numeric_limits<double>::infinity();
  std::int64_t interior_count = 0, slice_count = 0;

  for (std::int64_t idx = 0; idx < g.lattice_size(); ++idx) {
    const double wval = w[idx];
    if (!std::isfinite(wval) || !g.has_distance(idx)) continue;
    const DistanceData dd = g.distance(idx);
    if (!(dd.d > 0) || dd.d > delta) continue;
    const double z = spec.epsilon * (1.0 / (dd.d * dd.d) + spec.B / dd.d) +
                     (-dd.mean_curvature + spec.A * dd.d) - wval;
    if (dd.d >= delta - band) {
      slice_min = std::min(slice_min, z);
      ++slice_count;
    } else {
      interior_min = std::min(interior_min, z);
      ++interior_count;
    }
  }
  rep.samples = interior_count + slice_count;
  const double floor_value = std::min(0.0, slice_min);
  rep.metrics["interior_min"] = interior_min;
  rep.metrics["slice_min"] = slice_min;
  rep.metrics["delta"] = delta;
  // discretisation slack: one cell of barrier variation
  const double slack = 1e-8 + spec.epsilon * 2.0 * band / (delta * delta * delta) * 4.0;
  rep.worst_margin = interior_min - floor_value + slack;
  rep.violations = rep.worst_margin < 0 ? 1 : 0;
  rep.pass = rep.violations == 0 && interior_count > 0 && slice_count > 0;
  return rep;
}

}  // namespace lnr
