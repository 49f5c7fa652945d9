#include "solver.hpp"

#include <cmath>
#include <deque>
#include <sstream>

namespace lnr {

double asymptotic_dirichlet_v(const DistanceData& dd, int n, int order) {
  (void)n;
  if (!(dd.d > 0)) throw ArgumentError("asymptotic data requires d > 0");
  if (order != 1 && order != 2) throw ArgumentError("data order must be 1 or 2");
  const double v0 = order == 1 ? 2.0 * dd.d : 2.0 * dd.d - dd.d * dd.d * dd.mean_curvature;
  if (!(v0 > 0)) {
    std::ostringstream os;
    os << "nonpositive expansion value v0 = " << v0 << " at d = " << dd.d
       << " (H = " << dd.mean_curvature << "); reduce h_trunc";
    throw MathDomainError(os.str());
  }
  return v0;
}

double asymptotic_dirichlet_data(const DistanceData& dd, int n, int order) {
  return std::pow(asymptotic_dirichlet_v(dd, n, order), 1.0 - 0.5 * n);
}

namespace {

struct StencilOps {
  const MaskedGrid* g;
  int n;
  std::vector<double> inv_h2;  // 1/h_a^2
  std::vector<double> inv_2h;  // 1/(2 h_a)
  double diag_lap = 0.0;       // sum_a 2/h_a^2

  explicit StencilOps(const MaskedGrid& grid) : g(&grid), n(grid.dim()) {
    inv_h2.resize(static_cast<std::size_t>(n));
    inv_2h.resize(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a) {
      const double h = grid.spacing()[a];
      inv_h2[static_cast<std::size_t>(a)] = 1.0 / (h * h);
      inv_2h[static_cast<std::size_t>(a)] = 0.5 / h;
      diag_lap += 2.0 / (h * h);
    }
  }

  double laplacian(const std::vector<double>& x, std::int64_t i) const {
    double s = 0.0;
    for (int a = 0; a < n; ++a) {
      const std::int64_t st = g->stride(a);
      s += (x[static_cast<std::size_t>(i + st)] - 2.0 * x[static_cast<std::size_t>(i)] +
            x[static_cast<std::size_t>(i - st)]) *
           inv_h2[static_cast<std::size_t>(a)];
    }
    return s;
  }
};

// Compact indexing of the interior unknowns with a per-node neighbour table;
// Krylov work vectors then scale with the unknown count, not the lattice.
struct KrylovSpace {
  const std::vector<std::int64_t>* nodes;
  int n;
  std::vector<std::int32_t> nb;  // 2n entries per unknown; -1 marks Dirichlet

  KrylovSpace(const MaskedGrid& g) : nodes(&g.interior_nodes()), n(g.dim()) {
    const std::int64_t count = static_cast<std::int64_t>(nodes->size());
    std::vector<std::int32_t> map(static_cast<std::size_t>(g.lattice_size()), -1);
    for (std::int64_t k = 0; k < count; ++k)
      map[static_cast<std::size_t>((*nodes)[static_cast<std::size_t>(k)])] =
          static_cast<std::int32_t>(k);
    nb.resize(static_cast<std::size_t>(count) * 2 * n);
    parallel_for(count, [&](std::int64_t k) {
      const std::int64_t i = (*nodes)[static_cast<std::size_t>(k)];
      for (int a = 0; a < n; ++a) {
        nb[static_cast<std::size_t>(k) * 2 * n + 2 * a] =
            map[static_cast<std::size_t>(i - g.stride(a))];
        nb[static_cast<std::size_t>(k) * 2 * n + 2 * a + 1] =
            map[static_cast<std::size_t>(i + g.stride(a))];
      }
    });
  }

  std::int64_t count() const { return static_cast<std::int64_t>(nodes->size()); }
  double at(const std::vector<double>& compact, std::int32_t idx) const {
    return idx >= 0 ? compact[static_cast<std::size_t>(idx)] : 0.0;
  }
};

// Primal form: F(u) = -Lap u + n(n-2) u^{(n+2)/(n-2)}; SPD linearisation.
struct PrimalForm {
  int n;
  double p, q;
  const StencilOps& ops;

  PrimalForm(int nn, const StencilOps& o)
      : n(nn), p(double(nn + 2) / (nn - 2)), q(4.0 / (nn - 2)), ops(o) {}

  bool symmetric() const { return true; }
  bool admissible(double value) const { return value > 0.0; }

  double residual(const std::vector<double>& u, std::int64_t i) const {
    return -ops.laplacian(u, i) + n * (n - 2.0) * std::pow(u[static_cast<std::size_t>(i)], p);
  }
  double diagonal(const std::vector<double>& u, std::int64_t i) const {
    return ops.diag_lap + n * (n + 2.0) * std::pow(u[static_cast<std::size_t>(i)], q);
  }
  double apply(const KrylovSpace& ws, const std::vector<double>& u,
               const std::vector<double>& delta, std::int64_t k) const {
    const std::int64_t i = (*ws.nodes)[static_cast<std::size_t>(k)];
    double lap = 0.0;
    const double dk = delta[static_cast<std::size_t>(k)];
    for (int a = 0; a < n; ++a) {
      const std::int32_t lo = ws.nb[static_cast<std::size_t>(k) * 2 * n + 2 * a];
      const std::int32_t hi = ws.nb[static_cast<std::size_t>(k) * 2 * n + 2 * a + 1];
      lap += (ws.at(delta, lo) - 2.0 * dk + ws.at(delta, hi)) *
             ops.inv_h2[static_cast<std::size_t>(a)];
    }
    return -lap + n * (n + 2.0) * std::pow(u[static_cast<std::size_t>(i)], q) * dk;
  }
};

// Hyperbolic-radius form: F(v) = v Lap v - (n/2)(|grad v|^2 - 4);
// nonsymmetric linearisation.
struct RadiusForm {
  int n;
  const StencilOps& ops;

  RadiusForm(int nn, const StencilOps& o) : n(nn), ops(o) {}

  bool symmetric() const { return false; }
  bool admissible(double value) const { return value > 0.0; }

  double residual(const std::vector<double>& v, std::int64_t i) const {
    const double lap = ops.laplacian(v, i);
    double g2 = 0.0;
    for (int a = 0; a < n; ++a) {
      const std::int64_t st = ops.g->stride(a);
      const double gx = (v[static_cast<std::size_t>(i + st)] -
                         v[static_cast<std::size_t>(i - st)]) *
                        ops.inv_2h[static_cast<std::size_t>(a)];
      g2 += gx * gx;
    }
    return v[static_cast<std::size_t>(i)] * lap - 0.5 * n * (g2 - 4.0);
  }
  double diagonal(const std::vector<double>& v, std::int64_t i) const {
    return -v[static_cast<std::size_t>(i)] * ops.diag_lap + ops.laplacian(v, i);
  }
  double apply(const KrylovSpace& ws, const std::vector<double>& v,
               const std::vector<double>& delta, std::int64_t k) const {
    const std::int64_t i = (*ws.nodes)[static_cast<std::size_t>(k)];
    const std::size_t si = static_cast<std::size_t>(i);
    const double dk = delta[static_cast<std::size_t>(k)];
    double out = ops.laplacian(v, i) * dk;
    double lap = 0.0;
    for (int a = 0; a < n; ++a) {
      const std::int32_t lo = ws.nb[static_cast<std::size_t>(k) * 2 * n + 2 * a];
      const std::int32_t hi = ws.nb[static_cast<std::size_t>(k) * 2 * n + 2 * a + 1];
      const double dlo = ws.at(delta, lo);
      const double dhi = ws.at(delta, hi);
      lap += (dlo - 2.0 * dk + dhi) * ops.inv_h2[static_cast<std::size_t>(a)];
      const std::int64_t st = ops.g->stride(a);
      const double gv = (v[static_cast<std::size_t>(i + st)] -
                         v[static_cast<std::size_t>(i - st)]) *
                        ops.inv_2h[static_cast<std::size_t>(a)];
      const double gd = (dhi - dlo) * ops.inv_2h[static_cast<std::size_t>(a)];
      out -= n * gv * gd;
    }
    out += v[si] * lap;
    return out;
  }
};

template <typename Fn>
double compact_dot(std::int64_t count, const Fn& term) {
  return parallel_sum(count, term);
}

// Jacobi-preconditioned conjugate gradients (primal linearisation).
template <typename Form>
int solve_cg(const Form& form, const KrylovSpace& ws, const std::vector<double>& state,
             const std::vector<double>& rhs, std::vector<double>& delta, double rel_tol,
             int max_iter) {
  const std::int64_t count = ws.count();
  std::vector<double> r(rhs), z(static_cast<std::size_t>(count)),
      p(static_cast<std::size_t>(count)), q(static_cast<std::size_t>(count));
  std::vector<double> diag(static_cast<std::size_t>(count));
  parallel_for(count, [&](std::int64_t k) {
    diag[static_cast<std::size_t>(k)] =
        form.diagonal(state, (*ws.nodes)[static_cast<std::size_t>(k)]);
    delta[static_cast<std::size_t>(k)] = 0.0;
    z[static_cast<std::size_t>(k)] = r[static_cast<std::size_t>(k)] / diag[static_cast<std::size_t>(k)];
    p[static_cast<std::size_t>(k)] = z[static_cast<std::size_t>(k)];
  });
  double rz = compact_dot(count, [&](std::int64_t k) {
    return r[static_cast<std::size_t>(k)] * z[static_cast<std::size_t>(k)];
  });
  const double rhs_norm = std::sqrt(compact_dot(count, [&](std::int64_t k) {
    return rhs[static_cast<std::size_t>(k)] * rhs[static_cast<std::size_t>(k)];
  }));
  const double target = rel_tol * (rhs_norm > 0 ? rhs_norm : 1.0);

  int it = 0;
  for (; it < max_iter; ++it) {
    parallel_for(count, [&](std::int64_t k) {
      q[static_cast<std::size_t>(k)] = form.apply(ws, state, p, k);
    });
    const double pq = compact_dot(count, [&](std::int64_t k) {
      return p[static_cast<std::size_t>(k)] * q[static_cast<std::size_t>(k)];
    });
    if (!(std::fabs(pq) > 0)) break;
    const double alpha = rz / pq;
    parallel_for(count, [&](std::int64_t k) {
      delta[static_cast<std::size_t>(k)] += alpha * p[static_cast<std::size_t>(k)];
      r[static_cast<std::size_t>(k)] -= alpha * q[static_cast<std::size_t>(k)];
    });
    const double rnorm = std::sqrt(compact_dot(count, [&](std::int64_t k) {
      return r[static_cast<std::size_t>(k)] * r[static_cast<std::size_t>(k)];
    }));
    if (rnorm <= target) {
      ++it;
      break;
    }
    parallel_for(count, [&](std::int64_t k) {
      z[static_cast<std::size_t>(k)] = r[static_cast<std::size_t>(k)] / diag[static_cast<std::size_t>(k)];
    });
    const double rz_new = compact_dot(count, [&](std::int64_t k) {
      return r[static_cast<std::size_t>(k)] * z[static_cast<std::size_t>(k)];
    });
    const double beta = rz_new / rz;
    rz = rz_new;
    parallel_for(count, [&](std::int64_t k) {
      p[static_cast<std::size_t>(k)] =
          z[static_cast<std::size_t>(k)] + beta * p[static_cast<std::size_t>(k)];
    });
  }
  return it;
}

// Jacobi-preconditioned BiCGStab (hyperbolic-radius linearisation).
template <typename Form>
int solve_bicgstab(const Form& form, const KrylovSpace& ws, const std::vector<double>& state,
                   const std::vector<double>& rhs, std::vector<double>& delta, double rel_tol,
                   int max_iter) {
  const std::int64_t count = ws.count();
  const std::size_t sz = static_cast<std::size_t>(count);
  std::vector<double> r(rhs), rhat(rhs), p(sz, 0.0), v(sz, 0.0), s(sz, 0.0), t(sz, 0.0),
      y(sz, 0.0), z(sz, 0.0), diag(sz);
  parallel_for(count, [&](std::int64_t k) {
    const double dg = form.diagonal(state, (*ws.nodes)[static_cast<std::size_t>(k)]);
    diag[static_cast<std::size_t>(k)] = std::fabs(dg) > 1e-300 ? dg : 1.0;
    delta[static_cast<std::size_t>(k)] = 0.0;
  });
  auto dot = [&](const std::vector<double>& a, const std::vector<double>& b) {
    return compact_dot(count, [&](std::int64_t k) {
      return a[static_cast<std::size_t>(k)] * b[static_cast<std::size_t>(k)];
    });
  };
  const double rhs_norm = std::sqrt(dot(rhs, rhs));
  const double target = rel_tol * (rhs_norm > 0 ? rhs_norm : 1.0);

  double rho = 1.0, alpha = 1.0, omega = 1.0;
  int it = 0;
  for (; it < max_iter; ++it) {
    const double rho_new = dot(rhat, r);
    if (std::fabs(rho_new) < 1e-300) break;
    if (it == 0) {
      p = r;
    } else {
      const double beta = (rho_new / rho) * (alpha / omega);
      parallel_for(count, [&](std::int64_t k) {
        const std::size_t sk = static_cast<std::size_t>(k);
        p[sk] = r[sk] + beta * (p[sk] - omega * v[sk]);
      });
    }
    rho = rho_new;
    parallel_for(count, [&](std::int64_t k) {
      y[static_cast<std::size_t>(k)] = p[static_cast<std::size_t>(k)] / diag[static_cast<std::size_t>(k)];
    });
    parallel_for(count, [&](std::int64_t k) { v[static_cast<std::size_t>(k)] = form.apply(ws, state, y, k); });
    const double rv = dot(rhat, v);
    if (std::fabs(rv) < 1e-300) break;
    alpha = rho / rv;
    parallel_for(count, [&](std::int64_t k) {
      const std::size_t sk = static_cast<std::size_t>(k);
      s[sk] = r[sk] - alpha * v[sk];
    });
    if (std::sqrt(dot(s, s)) <= target) {
      parallel_for(count, [&](std::int64_t k) {
        delta[static_cast<std::size_t>(k)] += alpha * y[static_cast<std::size_t>(k)];
      });
      ++it;
      break;
    }
    parallel_for(count, [&](std::int64_t k) {
      z[static_cast<std::size_t>(k)] = s[static_cast<std::size_t>(k)] / diag[static_cast<std::size_t>(k)];
    });
    parallel_for(count, [&](std::int64_t k) { t[static_cast<std::size_t>(k)] = form.apply(ws, state, z, k); });
    const double tt = dot(t, t);
    if (tt < 1e-300) break;
    omega = dot(t, s) / tt;
    parallel_for(count, [&](std::int64_t k) {
      const std::size_t sk = static_cast<std::size_t>(k);
      delta[sk] += alpha * y[sk] + omega * z[sk];
      r[sk] = s[sk] - omega * t[sk];
    });
    if (std::sqrt(dot(r, r)) <= target) {
      ++it;
      break;
    }
    if (std::fabs(omega) < 1e-300) break;
  }
  return it;
}

template <typename Form>
void damped_newton(const Form& form, const KrylovSpace& ws, std::vector<double>& x,
                   const SolverConfig& cfg, SolveSummary* summary) {
  const std::int64_t count = ws.count();
  const std::size_t sz = static_cast<std::size_t>(count);
  std::vector<double> rhs(sz), delta(sz), trial(x);

  double xmax = 0.0;
  for (double val : x)
    if (std::isfinite(val)) xmax = std::max(xmax, std::fabs(val));
  const double hmin = form.ops.g->spacing().minCoeff();
  const double eps = std::numeric_limits<double>::epsilon();
  const double tol_eff =
      std::max(cfg.tolerance, 32.0 * eps * std::max(1.0, xmax) / (hmin * hmin));

  auto residual_norm = [&](const std::vector<double>& state) {
    return parallel_max(count, [&](std::int64_t k) {
      return std::fabs(form.residual(state, (*ws.nodes)[static_cast<std::size_t>(k)]));
    });
  };

  std::vector<double> history;
  double rn = residual_norm(x);
  for (int it = 0; it < cfg.max_iterations; ++it) {
    history.push_back(rn);
    if (summary) summary->newton_residuals.push_back(rn);
    if (rn <= tol_eff) {
      if (summary) summary->final_residual = rn;
      return;
    }
    parallel_for(count, [&](std::int64_t k) {
      rhs[static_cast<std::size_t>(k)] =
          -form.residual(x, (*ws.nodes)[static_cast<std::size_t>(k)]);
    });
    const int lin_it =
        form.symmetric()
            ? solve_cg(form, ws, x, rhs, delta, 1e-9, cfg.max_linear_iterations)
            : solve_bicgstab(form, ws, x, rhs, delta, 1e-9, cfg.max_linear_iterations);
    if (summary) summary->linear_iterations.push_back(lin_it);

    double step = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < cfg.max_line_search; ++ls) {
      std::vector<std::uint8_t> ok(static_cast<std::size_t>(kParallelChunks), 1);
      parallel_for_chunks(count, [&](std::int64_t c, std::int64_t lo, std::int64_t hi) {
        bool good = true;
        for (std::int64_t k = lo; k < hi; ++k) {
          const std::int64_t i = (*ws.nodes)[static_cast<std::size_t>(k)];
          const std::size_t si = static_cast<std::size_t>(i);
          trial[si] = x[si] + step * delta[static_cast<std::size_t>(k)];
          if (!form.admissible(trial[si])) good = false;
        }
        if (!good) ok[static_cast<std::size_t>(c)] = 0;
      });
      bool admissible = true;
      for (std::uint8_t o : ok) admissible = admissible && o;
      if (admissible) {
        const double rn_try = residual_norm(trial);
        if (rn_try < rn) {
          std::swap(x, trial);
          rn = rn_try;
          accepted = true;
          break;
        }
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (rn <= 4.0 * tol_eff) {
        if (summary) summary->final_residual = rn;
        return;  // stagnated at the roundoff floor
      }
      history.push_back(rn);
      throw ConvergenceError("grid Newton stalled; residual " + std::to_string(rn), history);
    }
    // keep trial in sync with the accepted state for the next line search
    trial = x;
  }
  if (rn > 4.0 * tol_eff) {
    history.push_back(rn);
    throw ConvergenceError("grid Newton did not reach tolerance; residual " + std::to_string(rn),
                           history);
  }
  if (summary) summary->final_residual = rn;
}

}  // namespace

ScalarField solve_truncated(std::shared_ptr<const MaskedGrid> grid, const SolverConfig& cfg,
                            SolveSummary* summary, const ScalarField* inner_source,
                            std::vector<ScalarField>* ladder_fields) {
  const MaskedGrid& g = *grid;
  const int n = g.dim();
  if (cfg.data_order != 1 && cfg.data_order != 2)
    throw ArgumentError("solver: data order must be 1 (one-term) or 2 (two-term)");
  if (!(g.h_trunc() >= 2.0 * g.max_spacing() * (1.0 - 1e-9)))
    throw ArgumentError("solver: h_trunc must be at least 2 grid spacings");
  if (cfg.mode == SolveMode::kMonotoneSequence) {
    if (cfg.m_ladder.empty()) throw ArgumentError("solver: monotone mode requires an m-ladder");
    for (std::size_t i = 1; i < cfg.m_ladder.size(); ++i)
      if (!(cfg.m_ladder[i] > cfg.m_ladder[i - 1]))
        throw ArgumentError("solver: m-ladder must be strictly increasing");
  }
  if (!g.inner_data_nodes().empty() && inner_source == nullptr)
    throw ArgumentError("solver: depth-limited grid requires an inner data field");

  const StencilOps ops(g);
  const KrylovSpace ws(g);
  const bool primal = cfg.formulation == Formulation::kPrimal;
  const double r0 = g.domain().sphere_radius();
  const double vexp = -2.0 / (n - 2);

  std::vector<double> layer_data(g.truncation_nodes().size());
  for (std::size_t k = 0; k < g.truncation_nodes().size(); ++k) {
    const DistanceData dd = g.distance(g.truncation_nodes()[k]);
    layer_data[k] = primal ? asymptotic_dirichlet_data(dd, n, cfg.data_order)
                           : asymptotic_dirichlet_v(dd, n, cfg.data_order);
  }

  std::vector<double> x(static_cast<std::size_t>(g.lattice_size()),
                        std::numeric_limits<double>::quiet_NaN());

  // initial guess: two-term expansion, floored at its value on {d = r0/2}
  auto init_value = [&](DistanceData dd) {
    if (dd.d > 0.5 * r0) dd.d = 0.5 * r0;
    return primal ? asymptotic_dirichlet_data(dd, n, 2) : asymptotic_dirichlet_v(dd, n, 2);
  };
  for (const std::int64_t idx : g.interior_nodes())
    x[static_cast<std::size_t>(idx)] = init_value(g.distance(idx));
  for (const std::int64_t idx : g.inner_data_nodes()) {
    const double uval = interpolate_field(*inner_source, g.position(idx));
    if (!(uval > 0)) throw ArgumentError("solver: inner data field must be positive");
    x[static_cast<std::size_t>(idx)] = primal ? uval : std::pow(uval, vexp);
  }

  auto set_layer = [&](double m_cap) {
    for (std::size_t k = 0; k < g.truncation_nodes().size(); ++k) {
      double val = layer_data[k];
      if (std::isfinite(m_cap)) {
        const double cap = primal ? m_cap : std::pow(m_cap, vexp);
        // capping u at m floors v
        val = primal ? std::min(val, cap) : std::max(val, cap);
      }
      x[static_cast<std::size_t>(g.truncation_nodes()[k])] = val;
    }
  };

  auto run_newton = [&]() {
    if (primal) {
      PrimalForm form(n, ops);
      damped_newton(form, ws, x, cfg, summary);
    } else {
      RadiusForm form(n, ops);
      damped_newton(form, ws, x, cfg, summary);
    }
  };

  auto snapshot_u = [&]() {
    ScalarField f = make_field(grid, Quantity::kU);
    auto to_u = [&](double val) { return primal ? val : std::pow(val, -0.5 * (n - 2)); };
    for (const std::int64_t idx : g.interior_nodes())
      f[idx] = to_u(x[static_cast<std::size_t>(idx)]);
    for (const std::int64_t idx : g.truncation_nodes())
      f[idx] = to_u(x[static_cast<std::size_t>(idx)]);
    for (const std::int64_t idx : g.inner_data_nodes())
      f[idx] = to_u(x[static_cast<std::size_t>(idx)]);
    for (const std::int64_t idx : g.collar_nodes())
      f[idx] = asymptotic_dirichlet_data(g.distance(idx), n, cfg.data_order);
    return f;
  };

  if (cfg.mode == SolveMode::kNewton) {
    set_layer(std::numeric_limits<double>::infinity());
    run_newton();
    return snapshot_u();
  }

  // monotone-sequence mode: ladder of capped boundary values, then the full
  // expansion data; successive iterates must be pointwise nondecreasing
  ScalarField previous;
  bool have_previous = false;
  auto check_monotone = [&](const ScalarField& cur) {
    if (!have_previous) return;
    for (const std::int64_t idx : g.interior_nodes()) {
      const double a = previous[idx];
      const double b = cur[idx];
      if (a > b + 1e-10 * (1.0 + std::fabs(a))) {
        std::ostringstream os;
        os << "monotone-sequence violation at node " << idx << " (" << a << " > " << b << ")";
        throw ConvergenceError(os.str(), {a - b});
      }
    }
  };
  auto record_max_principle = [&](const ScalarField& cur) {
    if (!summary) return;
    double data_max = 0.0;
    for (const std::int64_t idx : g.truncation_nodes()) data_max = std::max(data_max, cur[idx]);
    double interior_max = 0.0;
    for (const std::int64_t idx : g.interior_nodes())
      interior_max = std::max(interior_max, cur[idx]);
    const double margin = data_max - interior_max;
    summary->max_principle_margin = std::min(summary->max_principle_margin, margin);
    if (interior_max > data_max * (1.0 + 1e-9) + 10.0 * cfg.tolerance)
      summary->max_principle_ok = false;
  };

  for (const double m : cfg.m_ladder) {
    if (!(m > 0)) throw ArgumentError("solver: ladder values must be positive");
    set_layer(m);
    run_newton();
    ScalarField f = snapshot_u();
    if (summary) summary->ladder.push_back(m);
    record_max_principle(f);
    check_monotone(f);
    if (ladder_fields) ladder_fields->push_back(f);
    previous = std::move(f);
    have_previous = true;
  }
  set_layer(std::numeric_limits<double>::infinity());
  run_newton();
  ScalarField final_field = snapshot_u();
  record_max_principle(final_field);
  check_monotone(final_field);
  return final_field;
}

ScalarField hyperbolic_radius(const ScalarField& u) {
  const int n = u.grid->dim();
  const double e = -2.0 / (n - 2);
  // validate positivity before transforming (no throwing inside workers)
  bool positive = true;
  for (const double val : u.values)
    if (std::isfinite(val) && !(val > 0)) positive = false;
  if (!positive) throw MathDomainError("hyperbolic_radius: u must be positive");
  ScalarField v = make_field(u.grid, Quantity::kV);
  parallel_for(u.grid->lattice_size(), [&](std::int64_t idx) {
    const double val = u[idx];
    if (std::isfinite(val)) v[idx] = std::pow(val, e);
  });
  return v;
}

ScalarField renormalized_w(const ScalarField& v) {
  const MaskedGrid& g = *v.grid;
  ScalarField w = make_field(v.grid, Quantity::kW);
  parallel_for(g.lattice_size(), [&](std::int64_t idx) {
    const double val = v[idx];
    if (!std::isfinite(val) || !g.has_distance(idx)) return;
    const double d = g.d_at(idx);
    if (!(d > 0)) return;
    w[idx] = (val - 2.0 * d) / (d * d);
  });
  return w;
}

std::vector<CriticalPoint> hyperbolic_critical_points(const ScalarField& v, double grad_tol) {
  const MaskedGrid& g = *v.grid;
  const int n = g.dim();
  if (grad_tol <= 0) grad_tol = 2.0 * g.max_spacing();

  std::vector<std::int64_t> flagged;
  std::vector<double> gnorm_at;
  std::vector<std::int64_t> flag_index(static_cast<std::size_t>(g.lattice_size()), -1);
  for (const std::int64_t idx : g.interior_nodes()) {
    bool full = true;
    double g2 = 0.0;
    for (int a = 0; a < n && full; ++a) {
      const std::int64_t st = g.stride(a);
      const double lo = v[idx - st];
      const double hi = v[idx + st];
      if (!std::isfinite(lo) || !std::isfinite(hi)) {
        full = false;
        break;
      }
      const double gx = (hi - lo) / (2.0 * g.spacing()[a]);
      g2 += gx * gx;
    }
    if (!full) continue;
    if (std::sqrt(g2) <= grad_tol) {
      flag_index[static_cast<std::size_t>(idx)] = static_cast<std::int64_t>(flagged.size());
      flagged.push_back(idx);
      gnorm_at.push_back(std::sqrt(g2));
    }
  }

  std::vector<CriticalPoint> out;
  std::vector<std::uint8_t> seen(flagged.size(), 0);
  for (std::size_t start = 0; start < flagged.size(); ++start) {
    if (seen[start]) continue;
    std::deque<std::size_t> queue{start};
    seen[start] = 1;
    std::size_t best = start;
    std::int64_t members = 0;
    while (!queue.empty()) {
      const std::size_t cur = queue.front();
      queue.pop_front();
      ++members;
      if (gnorm_at[cur] < gnorm_at[best] ||
          (gnorm_at[cur] == gnorm_at[best] && flagged[cur] < flagged[best]))
        best = cur;
      for (int a = 0; a < n; ++a) {
        for (const std::int64_t nb : {flagged[cur] - g.stride(a), flagged[cur] + g.stride(a)}) {
          const std::int64_t fi = flag_index[static_cast<std::size_t>(nb)];
          if (fi >= 0 && !seen[static_cast<std::size_t>(fi)]) {
            seen[static_cast<std::size_t>(fi)] = 1;
            queue.push_back(static_cast<std::size_t>(fi));
          }
        }
      }
    }

    const std::int64_t idx = flagged[best];
    CriticalPoint cp;
    cp.node = idx;
    cp.cluster_size = members;
    cp.x = g.position(idx);
    cp.value = v[idx];

    Matrix H = Matrix::Zero(n, n);
    bool complete = true;
    for (int a = 0; a < n && complete; ++a) {
      const std::int64_t sa = g.stride(a);
      const double ha = g.spacing()[a];
      H(a, a) = (v[idx + sa] - 2.0 * v[idx] + v[idx - sa]) / (ha * ha);
      for (int b = a + 1; b < n && complete; ++b) {
        const std::int64_t sb = g.stride(b);
        const double hb = g.spacing()[b];
        const double vpp = v[idx + sa + sb], vpm = v[idx + sa - sb], vmp = v[idx - sa + sb],
                     vmm = v[idx - sa - sb];
        if (!std::isfinite(vpp) || !std::isfinite(vpm) || !std::isfinite(vmp) ||
            !std::isfinite(vmm)) {
          complete = false;
          break;
        }
        H(a, b) = H(b, a) = (vpp - vpm - vmp + vmm) / (4.0 * ha * hb);
      }
    }
    if (!complete) {
      cp.type = CriticalPoint::Type::kDegenerate;
      out.push_back(cp);
      continue;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(H);
    const double scale = std::max(1e-12, eig.eigenvalues().cwiseAbs().maxCoeff());
    int pos = 0, neg = 0;
    for (int a = 0; a < n; ++a) {
      const double lam = eig.eigenvalues()[a];
      if (lam > 1e-6 * scale)
        ++pos;
      else if (lam < -1e-6 * scale)
        ++neg;
    }
    if (pos == n)
      cp.type = CriticalPoint::Type::kMin;
    else if (neg == n)
      cp.type = CriticalPoint::Type::kMax;
    else if (pos + neg == n)
      cp.type = CriticalPoint::Type::kSaddle;
    else
      cp.type = CriticalPoint::Type::kDegenerate;
    out.push_back(cp);
  }
  return out;
}

}  // namespace lnr
