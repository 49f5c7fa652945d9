/* lnr: boundary blow-up solutions of the Loewner-Nirenberg equation and the
 * hyperbolic radius on smooth bounded domains.
 *
 * C interface: opaque handles, integer status codes, JSON strings for
 * structured reports. Every handle returned through an out-parameter is
 * owned by the caller and released with the matching _free function; strings
 * returned through char** are released with lnr_string_free.
 */
#ifndef LNR_H
#define LNR_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define LNR_MAX_DIM 8

typedef enum lnr_status {
  LNR_OK = 0,
  LNR_ERR_ARGUMENT = 1,       /* precondition violated */
  LNR_ERR_MATH_DOMAIN = 2,    /* formula evaluated outside its domain */
  LNR_ERR_NO_CONVERGENCE = 3, /* iteration stalled or diverged */
  LNR_ERR_SINGULAR = 4,       /* singular denominator / degenerate gradient */
  LNR_ERR_IO = 5,
  LNR_ERR_INTERNAL = 6
} lnr_status;

const char* lnr_status_name(lnr_status status);
/* thread-local detail message for the last failing call */
const char* lnr_last_error(void);
void lnr_string_free(char* s);

typedef struct lnr_domain lnr_domain;
typedef struct lnr_profile lnr_profile;
typedef struct lnr_grid lnr_grid;
typedef struct lnr_field lnr_field;
typedef struct lnr_strip lnr_strip;

/* ------------------------------------------------------------------ */
/* domains and distance geometry                                       */
/* ------------------------------------------------------------------ */

lnr_status lnr_domain_create_ball(int dim, const double* center, double radius,
                                  lnr_domain** out);
lnr_status lnr_domain_create_ellipsoid(int dim, const double* center, const double* semi_axes,
                                       lnr_domain** out);
lnr_status lnr_domain_create_shell(int dim, const double* center, double inner_radius,
                                   double outer_radius, lnr_domain** out);
void lnr_domain_free(lnr_domain* dom);

int lnr_domain_dim(const lnr_domain* dom);
double lnr_domain_r0(const lnr_domain* dom);
void lnr_domain_bbox(const lnr_domain* dom, double* lo, double* hi);

typedef struct lnr_distance_data {
  double d;                    /* positive inside, negative outside */
  double grad[LNR_MAX_DIM];    /* unit gradient of the signed distance */
  double laplacian;
  double nearest[LNR_MAX_DIM]; /* nearest boundary point */
  double mean_curvature;       /* of the boundary at the nearest point */
} lnr_distance_data;

lnr_status lnr_distance(const lnr_domain* dom, const double* x, lnr_distance_data* out);
lnr_status lnr_mean_curvature(const lnr_domain* dom, const double* q, double* out);

/* ------------------------------------------------------------------ */
/* radial oracle                                                       */
/* ------------------------------------------------------------------ */

lnr_status lnr_barrier_interior(int dim, double r0, double dist_from_center, double* out);
lnr_status lnr_barrier_exterior(int dim, double r0, double dist_from_center, double* out);

/* m > 0 for a finite boundary value; pass INFINITY (or m <= 0) for the
 * truncated maximal profile */
lnr_status lnr_radial_solve_ball(int dim, double radius, int points, double m,
                                 lnr_profile** out);
lnr_status lnr_radial_solve_shell(int dim, double inner_radius, double outer_radius, int points,
                                  double m, lnr_profile** out);
void lnr_profile_free(lnr_profile* prof);

int64_t lnr_profile_points(const lnr_profile* prof);
/* fills any non-NULL array (each of length lnr_profile_points) */
lnr_status lnr_profile_get(const lnr_profile* prof, double* r, double* u, double* v, double* w);
lnr_status lnr_profile_residual(const lnr_profile* prof, double* max_residual);
lnr_status lnr_profile_write_csv(const lnr_profile* prof, const char* path);

/* ------------------------------------------------------------------ */
/* masked grids and the truncated Dirichlet solver                     */
/* ------------------------------------------------------------------ */

lnr_status lnr_grid_build(const lnr_domain* dom, const int* resolution /* per axis */,
                          double h_trunc, lnr_grid** out);
/* depth-limited variant: only the band {d <= depth_limit} stays active and
 * deeper values come from a coarse solved field during lnr_solve */
lnr_status lnr_grid_build_collar(const lnr_domain* dom, const int* resolution, double h_trunc,
                                 double depth_limit, lnr_grid** out);
void lnr_grid_free(lnr_grid* grid);

/* node classes: 0 exterior, 1 interior, 2 truncation data, 3 collar,
 * 4 inner data */
int64_t lnr_grid_count(const lnr_grid* grid, int node_class);
int64_t lnr_grid_lattice_size(const lnr_grid* grid);

typedef struct lnr_solver_options {
  int mode;            /* 0 = newton, 1 = monotone-sequence */
  int formulation;     /* 0 = primal u, 1 = hyperbolic radius v */
  int data_order;      /* 1 = one-term, 2 = two-term */
  double tolerance;    /* residual max norm */
  int max_iterations;
  const double* m_ladder;
  int m_ladder_count;
  int threads; /* <= 0 keeps the current budget */
} lnr_solver_options;

void lnr_solver_options_init(lnr_solver_options* opts);

/* summary_json (optional) receives iterations/residuals as a JSON string */
lnr_status lnr_solve(const lnr_grid* grid, const lnr_solver_options* opts,
                     const lnr_field* inner_source, lnr_field** u_out, char** summary_json);

lnr_status lnr_field_hyperbolic_radius(const lnr_field* u, lnr_field** v_out);
lnr_status lnr_field_renormalized_w(const lnr_field* v, lnr_field** w_out);
void lnr_field_free(lnr_field* field);

int64_t lnr_field_size(const lnr_field* field);
const double* lnr_field_values(const lnr_field* field);
/* value at the lattice node nearest to x (NaN where undefined) */
lnr_status lnr_field_sample(const lnr_field* field, const double* x, double* out);
lnr_status lnr_field_write(const lnr_field* field, const char* path);

lnr_status lnr_field_critical_points(const lnr_field* v, char** json_out);

/* ------------------------------------------------------------------ */
/* verification checks (JSON reports)                                  */
/* ------------------------------------------------------------------ */

lnr_status lnr_check_operator_identities(const lnr_domain* dom, int samples, unsigned seed,
                                         double alpha, double barrier_b, char** json_out);
lnr_status lnr_check_sphere_sandwich(const lnr_field* u, double tol, char** json_out);
lnr_status lnr_check_profile_sandwich(const lnr_profile* prof, double r0, double tol,
                                      char** json_out);
lnr_status lnr_check_profile_w_bound(const lnr_profile* prof, double r0, double tol,
                                     char** json_out);
lnr_status lnr_check_tilde_w(const lnr_field* w, const double* shells, int shell_count,
                             double a_const, double delta, double slack, char** json_out);
lnr_status lnr_check_expansion(const lnr_field* v, const double* shells, int shell_count,
                               char** json_out);
lnr_status lnr_check_gradient(const lnr_field* v, double d_max, char** json_out);
lnr_status lnr_check_fr_residual(const lnr_field* u, double d_min, double d_max,
                                 char** json_out);

/* ------------------------------------------------------------------ */
/* Fuchsian model operator on the periodic strip                       */
/* ------------------------------------------------------------------ */

/* values: (ny[0] x ... x ny[dim-2]) x (nt + 1) row-major samples with the T
 * rows slowest; row 0 holds the T -> 0 limit values */
lnr_status lnr_strip_create(int dim, double theta, const int* ny, int nt, const double* values,
                            lnr_strip** out);
void lnr_strip_free(lnr_strip* strip);
lnr_status lnr_strip_shape(const lnr_strip* strip, int* ny, int* nt);
const double* lnr_strip_values(const lnr_strip* strip);
lnr_status lnr_strip_write(const lnr_strip* strip, const char* name, const char* path);

/* f0 = G[k] with L0' f0 = k; diagnostics include the f0 trace deviation and
 * the inversion residual over {T > 4 dT} */
lnr_status lnr_fuchsian_invert(const lnr_strip* k, lnr_strip** f0_out, char** diagnostics_json);
/* f = G[k/(n-1)] with trace f(Y,0) = k(Y,0)/(2-2n) */
lnr_status lnr_fuchsian_boundary_solution(const lnr_strip* k, lnr_strip** f_out);
/* op: 0 = D, 1 = L0, 2 = L0' */
lnr_status lnr_strip_apply(int op, const lnr_strip* f, lnr_strip** out);

#ifdef __cplusplus
}
#endif

#endif /* LNR_H */
