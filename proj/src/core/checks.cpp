#include "checks.hpp"

#include <cmath>

namespace lnr {

CheckReport expansion_check(const ScalarField& v, const std::vector<double>& shells) {
  const MaskedGrid& g = *v.grid;
  CheckReport rep;
  rep.name = "expansion";

  std::vector<double> shell_max(shells.size(), 0.0);
  std::vector<std::int64_t> shell_cnt(shells.size(), 0);
  // only solved values carry the expansion defect; collar nodes reproduce the
  // data formula exactly and are excluded
  for (const std::int64_t idx : g.interior_nodes()) {
    const double vval = v[idx];
    if (!std::isfinite(vval)) continue;
    const DistanceData dd = g.distance(idx);
    const double defect = std::fabs(vval - 2.0 * dd.d + dd.d * dd.d * dd.mean_curvature);
    ++rep.samples;
    for (std::size_t s = 0; s < shells.size(); ++s) {
      if (std::fabs(dd.d - shells[s]) <= 0.25 * shells[s]) {
        shell_max[s] = std::max(shell_max[s], defect);
        ++shell_cnt[s];
      }
    }
  }

  std::vector<double> xs, ys;
  for (std::size_t s = 0; s < shells.size(); ++s) {
    rep.metrics["shell_" + std::to_string(s) + "_d"] = shells[s];
    rep.metrics["shell_" + std::to_string(s) + "_max"] = shell_max[s];
    rep.metrics["shell_" + std::to_string(s) + "_count"] = static_cast<double>(shell_cnt[s]);
    if (shell_cnt[s] > 0 && shell_max[s] > 0) {
      xs.push_back(shells[s]);
      ys.push_back(shell_max[s]);
    }
  }
  if (xs.size() >= 2) {
    rep.metrics["fitted_slope"] = fitted_log_slope(xs, ys);
  } else {
    rep.pass = false;
    rep.note = "insufficient solved shell samples (h_trunc too deep?)";
  }
  return rep;
}

CheckReport gradient_check(const ScalarField& v, double d_max, double band) {
  const MaskedGrid& g = *v.grid;
  const int n = g.dim();
  CheckReport rep;
  rep.name = "gradient-v";
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  for (std::int64_t idx = 0; idx < g.lattice_size(); ++idx) {
    if (!std::isfinite(v[idx]) || !g.has_distance(idx)) continue;
    const double d = g.d_at(idx);
    if (!(d > 0) || d >= d_max) continue;
    const auto mi = g.multi_index(idx);
    bool full = true;
    double g2 = 0.0;
    for (int a = 0; a < n && full; ++a) {
      const int ia = mi[static_cast<std::size_t>(a)];
      if (ia == 0 || ia == g.resolution()[static_cast<std::size_t>(a)] - 1) {
        full = false;
        break;
      }
      const double lo_v = v[idx - g.stride(a)];
      const double hi_v = v[idx + g.stride(a)];
      if (!std::isfinite(lo_v) || !std::isfinite(hi_v)) {
        full = false;
        break;
      }
      const double gx = (hi_v - lo_v) / (2.0 * g.spacing()[a]);
      g2 += gx * gx;
    }
    if (!full) continue;
    const double gn = std::sqrt(g2);
    lo = std::min(lo, gn);
    hi = std::max(hi, gn);
    ++rep.samples;
    const double margin = band - std::fabs(gn - 2.0);
    rep.worst_margin = std::min(rep.worst_margin, margin);
    if (margin < 0) ++rep.violations;
  }
  rep.metrics["min_grad"] = lo;
  rep.metrics["max_grad"] = hi;
  rep.metrics["d_max"] = d_max;
  rep.metrics["band"] = band;
  rep.pass = rep.violations == 0 && rep.samples > 0;
  if (rep.samples == 0) rep.note = "no nodes with full stencils below d_max";
  return rep;
}

CheckReport asy_v_check(const ScalarField& v) {
  const MaskedGrid& g = *v.grid;
  CheckReport rep;
  rep.name = "asy-v";
  const double ht = g.h_trunc();
  double worst = 0.0;
  for (std::int64_t idx = 0; idx < g.lattice_size(); ++idx) {
    if (!std::isfinite(v[idx]) || !g.has_distance(idx)) continue;
    const double d = g.d_at(idx);
    if (d < ht || d > 2.0 * ht) continue;
    worst = std::max(worst, std::fabs(v[idx] - 2.0 * d));
    ++rep.samples;
  }
  rep.metrics["max_defect"] = worst;
  rep.metrics["h_trunc"] = ht;
  rep.metrics["stability_constant"] = worst / (ht * ht);
  rep.pass = rep.samples > 0;
  return rep;
}

CheckReport fr_residual_check(const ScalarField& u, double d_min, double d_max) {
  FuchsianOperatorContext ctx;
  ctx.grid = u.grid;
  const MaskedGrid& g = *u.grid;
  const ScalarField res = fr_residual(ctx, u);

  CheckReport rep;
  rep.name = "fr-residual";
  double worst = 0.0;
  for (std::int64_t idx = 0; idx < g.lattice_size(); ++idx) {
    const double rv = res[idx];
    if (!std::isfinite(rv) || !g.has_distance(idx)) continue;
    const double d = g.d_at(idx);
    if (d <= d_min || d >= d_max) continue;
    worst = std::max(worst, std::fabs(rv));
    ++rep.samples;
  }
  const double h = g.max_spacing();
  rep.metrics["max_residual"] = worst;
  rep.metrics["h_grid"] = h;
  rep.metrics["stability_constant"] = worst / (h * h);
  rep.pass = rep.samples > 0;
  return rep;
}

}  // namespace lnr
