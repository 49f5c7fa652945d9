#include "lnr/lnr.h"

#include <cstring>
#include <limits>
#include <string>

#include "core/checks.hpp"
#include "core/io.hpp"

#if defined(__GNUC__)
#define LNR_EXPORT __attribute__((visibility("default")))
#else
#define LNR_EXPORT
#endif

namespace {

thread_local std::string g_last_error;

lnr_status fail(lnr_status code, const std::string& msg) {
  g_last_error = msg;
  return code;
}

template <typename Fn>
lnr_status guarded(const Fn& fn) {
  try {
    fn();
    return LNR_OK;
  } catch (const lnr::ArgumentError& e) {
    return fail(LNR_ERR_ARGUMENT, e.what());
  } catch (const lnr::MathDomainError& e) {
    return fail(LNR_ERR_MATH_DOMAIN, e.what());
  } catch (const lnr::ConvergenceError& e) {
    return fail(LNR_ERR_NO_CONVERGENCE, e.what());
  } catch (const lnr::SingularityError& e) {
    return fail(LNR_ERR_SINGULAR, e.what());
  } catch (const std::exception& e) {
    return fail(LNR_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(LNR_ERR_INTERNAL, "unknown error");
  }
}

lnr::Vector to_vec(int dim, const double* p) {
  lnr::Vector v(dim);
  for (int i = 0; i < dim; ++i) v[i] = p[i];
  return v;
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

struct lnr_domain {
  lnr::DomainDescriptor dom;
};
struct lnr_profile {
  lnr::RadialProfile prof;
};
struct lnr_grid {
  std::shared_ptr<lnr::MaskedGrid> grid;
};
struct lnr_field {
  lnr::ScalarField field;
};
struct lnr_strip {
  lnr::StripField strip;
};

extern "C" {

LNR_EXPORT const char* lnr_status_name(lnr_status status) {
  switch (status) {
    case LNR_OK:
      return "ok";
    case LNR_ERR_ARGUMENT:
      return "argument";
    case LNR_ERR_MATH_DOMAIN:
      return "math-domain";
    case LNR_ERR_NO_CONVERGENCE:
      return "no-convergence";
    case LNR_ERR_SINGULAR:
      return "singular";
    case LNR_ERR_IO:
      return "io";
    case LNR_ERR_INTERNAL:
      return "internal";
  }
  return "unknown";
}

LNR_EXPORT const char* lnr_last_error(void) { return g_last_error.c_str(); }

LNR_EXPORT void lnr_string_free(char* s) { delete[] s; }

/* ---------------- domains ---------------- */

LNR_EXPORT lnr_status lnr_domain_create_ball(int dim, const double* center, double radius,
                                             lnr_domain** out) {
  if (!center || !out) return fail(LNR_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new lnr_domain{lnr::DomainDescriptor::ball(dim, to_vec(dim, center), radius)};
  });
}

LNR_EXPORT lnr_status lnr_domain_create_ellipsoid(int dim, const double* center,
                                                  const double* semi_axes, lnr_domain** out) {
  if (!center || !semi_axes || !out) return fail(LNR_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new lnr_domain{
        lnr::DomainDescriptor::ellipsoid(dim, to_vec(dim, center), to_vec(dim, semi_axes))};
  });
}

LNR_EXPORT lnr_status lnr_domain_create_shell(int dim, const double* center, double inner_radius,
                                              double outer_radius, lnr_domain** out) {
  if (!center || !out) return fail(LNR_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new lnr_domain{
        lnr::DomainDescriptor::shell(dim, to_vec(dim, center), inner_radius, outer_radius)};
  });
}

LNR_EXPORT void lnr_domain_free(lnr_domain* dom) { delete dom; }

LNR_EXPORT int lnr_domain_dim(const lnr_domain* dom) { return dom ? dom->dom.dim() : 0; }

LNR_EXPORT double lnr_domain_r0(const lnr_domain* dom) {
  return dom ? dom->dom.sphere_radius() : 0.0;
}

LNR_EXPORT void lnr_domain_bbox(const lnr_domain* dom, double* lo, double* hi) {
  if (!dom) return;
  for (int a = 0; a < dom->dom.dim(); ++a) {
    if (lo) lo[a] = dom->dom.bbox_lo()[a];
    if (hi) hi[a] = dom->dom.bbox_hi()[a];
  }
}

LNR_EXPORT lnr_status lnr_distance(const lnr_domain* dom, const double* x,
                                   lnr_distance_data* out) {
  if (!dom || !x || !out) return fail(LNR_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    const lnr::DistanceData dd = lnr::signed_distance(dom->dom, to_vec(dom->dom.dim(), x));
    out->d = dd.d;
    out->laplacian = dd.laplacian_d;
    out->mean_curvature = dd.mean_curvature;
    for (int a = 0; a < dom->dom.dim(); ++a) {
      out->grad[a] = dd.grad_d[a];
      out->nearest[a] = dd.nearest[a];
    }
  });
}

LNR_EXPORT lnr_status lnr_mean_curvature(const lnr_domain* dom, const double* q, double* out) {
  if (!dom || !q || !out) return fail(LNR_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    *out = lnr::boundary_mean_curvature(dom->dom, to_vec(dom->dom.dim(), q));
  });
}

/* ---------------- radial ---------------- */

LNR_EXPORT lnr_status lnr_barrier_interior(int dim, double r0, double dist_from_center,
                                           double* out) {
  if (!out) return fail(LNR_ERR_ARGUMENT, "null argument");
  return guarded([&] { *out = lnr::interior_sphere_barrier(dim, r0, dist_from_center); });
}

LNR_EXPORT lnr_status lnr_barrier_exterior(int dim, double r0, double dist_from_center,
                                           double* out) {
  if (!out) return fail(LNR_ERR_ARGUMENT, "null argument");
  return guarded([&] { *out = lnr::exterior_sphere_barrier(dim, r0, dist_from_center); });
}

namespace {
double normalize_m(double m) {
  return m <= 0 ? std::numeric_limits<double>::infinity() : m;
}
}  // namespace

LNR_EXPORT lnr_status lnr_radial_solve_ball(int dim, double radius, int points, double m,
                                            lnr_profile** out) {
  if (!out) return fail(LNR_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new lnr_profile{lnr::solve_radial_ball(dim, radius, points, normalize_m(m))};
  });
}

LNR_EXPORT lnr_status lnr_radial_solve_shell(int dim, double inner_radius, double outer_radius,
                                             int points, double m, lnr_profile** out) {
  if (!out) return fail(LNR_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new lnr_profile{
        lnr::solve_radial_shell(dim, inner_radius, outer_radius, points, normalize_m(m))};
  });
}

LNR_EXPORT void lnr_profile_free(lnr_profile* prof) { delete prof; }

LNR_EXPORT int64_t lnr_profile_points(const lnr_profile* prof) {
  return prof ? static_cast<int64_t>(prof->prof.size()) : 0;
}

LNR_EXPORT lnr_status lnr_profile_get(const lnr_profile* prof, double* r, double* u, double* v,
                                      double* w) {
  if (!prof) return fail(LNR_ERR_ARGUMENT, "null profile");
  return guarded([&] {
    for (std::size_t i = 0; i < prof->prof.size(); ++i) {
      if (r) r[i] = prof->prof.r[i];
      if (u) u[i] = prof->prof.u[i];
      if (v) v[i] = prof->prof.v[i];
      if (w) w[i] = prof->prof.w(i);
    }
  });
}

LNR_EXPORT lnr_status lnr_profile_residual(const lnr_profile* prof, double* max_residual) {
  if (!prof || !max_residual) return fail(LNR_ERR_ARGUMENT, "null argument");
  return guarded([&] { *max_residual = prof->prof.residual_max(); });
}

LNR_EXPORT lnr_status lnr_profile_write_csv(const lnr_profile* prof, const char* path) {
  if (!prof || !path) return fail(LNR_ERR_ARGUMENT, "null argument");
  return guarded([&] { lnr::write_profile_csv(prof->prof, path); });
}

/* ---------------- grids and fields ---------------- */

LNR_EXPORT lnr_status lnr_grid_build(const lnr_domain* dom, const int* resolution, double h_trunc,
                                     lnr_grid** out) {
  if (!dom || !resolution || !out) return fail(LNR_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    std::vector<int> res(resolution, resolution + dom->dom.dim());
    *out = new lnr_grid{lnr::build_masked_grid(dom->dom, res, h_trunc)};
  });
}

LNR_EXPORT lnr_status lnr_grid_build_collar(const lnr_domain* dom, const int* resolution,
                                            double h_trunc, double depth_limit, lnr_grid** out) {
  if (!dom || !resolution || !out) return fail(LNR_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    std::vector<int> res(resolution, resolution + dom->dom.dim());
    *out = new lnr_grid{lnr::build_masked_grid(dom->dom, res, h_trunc, depth_limit)};
  });
}

LNR_EXPORT void lnr_grid_free(lnr_grid* grid) { delete grid; }

LNR_EXPORT int64_t lnr_grid_count(const lnr_grid* grid, int node_class) {
  if (!grid) return 0;
  return grid->grid->count(static_cast<lnr::NodeClass>(node_class));
}

LNR_EXPORT int64_t lnr_grid_lattice_size(const lnr_grid* grid) {
  return grid ? grid->grid->lattice_size() : 0;
}

LNR_EXPORT void lnr_solver_options_init(lnr_solver_options* opts) {
  if (!opts) return;
  opts->mode = 0;
  opts->formulation = 0;
  opts->data_order = 2;
  opts->tolerance = 1e-10;
  opts->max_iterations = 60;
  opts->m_ladder = nullptr;
  opts->m_ladder_count = 0;
  opts->threads = 0;
}

LNR_EXPORT lnr_status lnr_solve(const lnr_grid* grid, const lnr_solver_options* opts,
                                const lnr_field* inner_source, lnr_field** u_out,
                                char** summary_json) {
  if (!grid || !opts || !u_out) return fail(LNR_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    if (opts->threads > 0) lnr::set_thread_budget(opts->threads);
    lnr::SolverConfig cfg;
    cfg.mode = opts->mode == 1 ? lnr::SolveMode::kMonotoneSequence : lnr::SolveMode::kNewton;
    cfg.formulation = opts->formulation == 1 ? lnr::Formulation::kHyperbolicRadius
                                             : lnr::Formulation::kPrimal;
    cfg.data_order = opts->data_order;
    cfg.tolerance = opts->tolerance;
    cfg.max_iterations = opts->max_iterations;
    if (opts->m_ladder && opts->m_ladder_count > 0)
      cfg.m_ladder.assign(opts->m_ladder, opts->m_ladder + opts->m_ladder_count);
    lnr::SolveSummary summary;
    lnr::ScalarField u = lnr::solve_truncated(
        grid->grid, cfg, &summary, inner_source ? &inner_source->field : nullptr);
    *u_out = new lnr_field{std::move(u)};
    if (summary_json) *summary_json = dup_string(lnr::summary_to_json(summary).dump(2));
  });
}

LNR_EXPORT lnr_status lnr_field_hyperbolic_radius(const lnr_field* u, lnr_field** v_out) {
  if (!u || !v_out) return fail(LNR_ERR_ARGUMENT, "null argument");
  return guarded([&] { *v_out = new lnr_field{lnr::hyperbolic_radius(u->field)}; });
}

LNR_EXPORT lnr_status lnr_field_renormalized_w(const lnr_field* v, lnr_field** w_out) {
  if (!v || !w_out) return fail(LNR_ERR_ARGUMENT, "null argument");
  return guarded([&] { *w_out = new lnr_field{lnr::renormalized_w(v->field)}; });
}

LNR_EXPORT void lnr_field_free(lnr_field* field) { delete field; }

LNR_EXPORT int64_t lnr_field_size(const lnr_field* field) {
  return field ? static_cast<int64_t>(field->field.values.size()) : 0;
}

LNR_EXPORT const double* lnr_field_values(const lnr_field* field) {
  return field ? field->field.values.data() : nullptr;
}

LNR_EXPORT lnr_status lnr_field_sample(const lnr_field* field, const double* x, double* out) {
  if (!field || !x || !out) return fail(LNR_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    const lnr::MaskedGrid& g = *field->field.grid;
    std::int64_t idx = 0;
    for (int a = 0; a < g.dim(); ++a) {
      double t = (x[a] - g.origin()[a]) / g.spacing()[a];
      std::int64_t i = static_cast<std::int64_t>(std::llround(t));
      if (i < 0) i = 0;
      if (i >= g.resolution()[static_cast<std::size_t>(a)])
        i = g.resolution()[static_cast<std::size_t>(a)] - 1;
      idx += i * g.stride(a);
    }
    *out = field->field[idx];
  });
}

LNR_EXPORT lnr_status lnr_field_write(const lnr_field* field, const char* path) {
  if (!field || !path) return fail(LNR_ERR_ARGUMENT, "null argument");
  return guarded([&] { lnr::write_field(field->field, path); });
}

LNR_EXPORT lnr_status lnr_field_critical_points(const lnr_field* v, char** json_out) {
  if (!v || !json_out) return fail(LNR_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    const auto pts = lnr::hyperbolic_critical_points(v->field);
    *json_out = dup_string(lnr::critical_points_to_json(pts).dump(2));
  });
}

/* ---------------- checks ---------------- */

namespace {
template <typename Fn>
lnr_status report_call(char** json_out, const Fn& fn) {
  if (!json_out) return fail(LNR_ERR_ARGUMENT, "null json output");
  return guarded([&] { *json_out = dup_string(lnr::report_to_json(fn()).dump(2)); });
}
}  // namespace

LNR_EXPORT lnr_status lnr_check_operator_identities(const lnr_domain* dom, int samples,
                                                    unsigned seed, double alpha, double barrier_b,
                                                    char** json_out) {
  if (!dom) return fail(LNR_ERR_ARGUMENT, "null domain");
  return report_call(json_out, [&] {
    return lnr::operator_identity_check(dom->dom, samples, seed, alpha, barrier_b);
  });
}

LNR_EXPORT lnr_status lnr_check_sphere_sandwich(const lnr_field* u, double tol, char** json_out) {
  if (!u) return fail(LNR_ERR_ARGUMENT, "null field");
  return report_call(json_out, [&] { return lnr::sphere_sandwich_check(u->field, tol); });
}

LNR_EXPORT lnr_status lnr_check_profile_sandwich(const lnr_profile* prof, double r0, double tol,
                                                 char** json_out) {
  if (!prof) return fail(LNR_ERR_ARGUMENT, "null profile");
  return report_call(json_out, [&] { return lnr::profile_sandwich_check(prof->prof, r0, tol); });
}

LNR_EXPORT lnr_status lnr_check_profile_w_bound(const lnr_profile* prof, double r0, double tol,
                                                char** json_out) {
  if (!prof) return fail(LNR_ERR_ARGUMENT, "null profile");
  return report_call(json_out, [&] { return lnr::profile_w_bound_check(prof->prof, r0, tol); });
}

LNR_EXPORT lnr_status lnr_check_tilde_w(const lnr_field* w, const double* shells, int shell_count,
                                        double a_const, double delta, double slack,
                                        char** json_out) {
  if (!w || !shells) return fail(LNR_ERR_ARGUMENT, "null argument");
  return report_call(json_out, [&] {
    return lnr::verify_tilde_w_bound(w->field, std::vector<double>(shells, shells + shell_count),
                                     a_const, delta, slack);
  });
}

LNR_EXPORT lnr_status lnr_check_expansion(const lnr_field* v, const double* shells,
                                          int shell_count, char** json_out) {
  if (!v || !shells) return fail(LNR_ERR_ARGUMENT, "null argument");
  return report_call(json_out, [&] {
    return lnr::expansion_check(v->field, std::vector<double>(shells, shells + shell_count));
  });
}

LNR_EXPORT lnr_status lnr_check_gradient(const lnr_field* v, double d_max, char** json_out) {
  if (!v) return fail(LNR_ERR_ARGUMENT, "null field");
  return report_call(json_out, [&] { return lnr::gradient_check(v->field, d_max); });
}

LNR_EXPORT lnr_status lnr_check_fr_residual(const lnr_field* u, double d_min, double d_max,
                                            char** json_out) {
  if (!u) return fail(LNR_ERR_ARGUMENT, "null field");
  return report_call(json_out, [&] { return lnr::fr_residual_check(u->field, d_min, d_max); });
}

/* ---------------- strip ---------------- */

LNR_EXPORT lnr_status lnr_strip_create(int dim, double theta, const int* ny, int nt,
                                       const double* values, lnr_strip** out) {
  if (!ny || !values || !out) return fail(LNR_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    std::vector<int> sizes(ny, ny + (dim - 1));
    lnr::StripField s = lnr::make_strip(dim, theta, sizes, nt);
    std::copy(values, values + s.values.size(), s.values.begin());
    *out = new lnr_strip{std::move(s)};
  });
}

LNR_EXPORT void lnr_strip_free(lnr_strip* strip) { delete strip; }

LNR_EXPORT lnr_status lnr_strip_shape(const lnr_strip* strip, int* ny, int* nt) {
  if (!strip) return fail(LNR_ERR_ARGUMENT, "null strip");
  return guarded([&] {
    if (ny)
      for (std::size_t a = 0; a < strip->strip.ny.size(); ++a) ny[a] = strip->strip.ny[a];
    if (nt) *nt = strip->strip.nt;
  });
}

LNR_EXPORT const double* lnr_strip_values(const lnr_strip* strip) {
  return strip ? strip->strip.values.data() : nullptr;
}

LNR_EXPORT lnr_status lnr_strip_write(const lnr_strip* strip, const char* name,
                                      const char* path) {
  if (!strip || !name || !path) return fail(LNR_ERR_ARGUMENT, "null argument");
  return guarded([&] { lnr::write_strip(strip->strip, name, path); });
}

LNR_EXPORT lnr_status lnr_fuchsian_invert(const lnr_strip* k, lnr_strip** f0_out,
                                          char** diagnostics_json) {
  if (!k || !f0_out) return fail(LNR_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    lnr::ModelInverse inv = lnr::invert_model_operator(k->strip);

    lnr::Json diag;
    if (diagnostics_json) {
      // trace deviation f0(Y,0) + k(Y,0)/2 and inversion residual
      double trace_dev = 0.0;
      const std::int64_t ysz = k->strip.y_size();
      for (std::int64_t y = 0; y < ysz; ++y)
        trace_dev = std::max(trace_dev,
                             std::fabs(inv.f0.at(0, y) + 0.5 * k->strip.at(0, y)));
      const lnr::StripField resid = lnr::apply_L0prime(inv.f0);
      double rmax = 0.0;
      for (int j = 5; j < k->strip.nt; ++j)
        for (std::int64_t y = 0; y < ysz; ++y)
          rmax = std::max(rmax, std::fabs(resid.at(j, y) - k->strip.at(j, y)));
      diag["trace_deviation"] = trace_dev;
      diag["inversion_residual"] = rmax;
      diag["nt"] = k->strip.nt;
    }
    *f0_out = new lnr_strip{std::move(inv.f0)};
    if (diagnostics_json) *diagnostics_json = dup_string(diag.dump(2));
  });
}

LNR_EXPORT lnr_status lnr_fuchsian_boundary_solution(const lnr_strip* k, lnr_strip** f_out) {
  if (!k || !f_out) return fail(LNR_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    *f_out = new lnr_strip{lnr::assemble_boundary_solution(k->strip)};
  });
}

LNR_EXPORT lnr_status lnr_strip_apply(int op, const lnr_strip* f, lnr_strip** out) {
  if (!f || !out) return fail(LNR_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    switch (op) {
      case 0:
        *out = new lnr_strip{lnr::apply_D(f->strip)};
        break;
      case 1:
        *out = new lnr_strip{lnr::apply_L0(f->strip)};
        break;
      case 2:
        *out = new lnr_strip{lnr::apply_L0prime(f->strip)};
        break;
      default:
        throw lnr::ArgumentError("lnr_strip_apply: op must be 0 (D), 1 (L0) or 2 (L0')");
    }
  });
}

}  // extern "C"
