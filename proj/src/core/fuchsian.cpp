#include "fuchsian.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

namespace lnr {

// ---------------------------------------------------------------------------
// grid-field operators
// ---------------------------------------------------------------------------

namespace {

// nodes where a field has a full finite central stencil
bool full_stencil(const MaskedGrid& g, const ScalarField& f, std::int64_t idx) {
  if (!std::isfinite(f[idx])) return false;
  const auto mi = g.multi_index(idx);
  for (int a = 0; a < g.dim(); ++a) {
    const int ia = mi[static_cast<std::size_t>(a)];
    if (ia == 0 || ia == g.resolution()[static_cast<std::size_t>(a)] - 1) return false;
    if (!std::isfinite(f[idx - g.stride(a)]) || !std::isfinite(f[idx + g.stride(a)]))
      return false;
  }
  return true;
}

}  // namespace

ScalarField apply_L(const FuchsianOperatorContext& ctx, const ScalarField& w,
                    std::int64_t* skipped) {
  const MaskedGrid& g = *ctx.grid;
  const int n = g.dim();
  ScalarField out = make_field(ctx.grid, Quantity::kResidual);
  std::int64_t skip_count = 0;

  for (std::int64_t idx = 0; idx < g.lattice_size(); ++idx) {
    if (!std::isfinite(w[idx])) continue;
    if (!g.has_distance(idx)) continue;
    if (!full_stencil(g, w, idx)) {
      ++skip_count;
      continue;
    }
    const DistanceData dd = g.distance(idx);
    double lap = 0.0, drift = 0.0;
    for (int a = 0; a < n; ++a) {
      const std::int64_t st = g.stride(a);
      const double h = g.spacing()[a];
      lap += (w[idx + st] - 2.0 * w[idx] + w[idx - st]) / (h * h);
      drift += dd.grad_d[a] * (w[idx + st] - w[idx - st]) / (2.0 * h);
    }
    out[idx] = dd.d * dd.d * lap + (4.0 - n) * dd.d * drift + (2.0 - 2.0 * n) * w[idx];
  }
  if (skipped) *skipped = skip_count;
  return out;
}

ScalarField apply_Mw(const FuchsianOperatorContext& ctx, const ScalarField& w,
                     const ScalarField& f) {
  const MaskedGrid& g = *ctx.grid;
  const int n = g.dim();
  ScalarField out = make_field(ctx.grid, Quantity::kResidual);
  std::vector<std::int64_t> singular;

  for (std::int64_t idx = 0; idx < g.lattice_size(); ++idx) {
    if (!std::isfinite(w[idx]) || !std::isfinite(f[idx])) continue;
    if (!g.has_distance(idx)) continue;
    if (!full_stencil(g, w, idx) || !full_stencil(g, f, idx)) continue;
    const DistanceData dd = g.distance(idx);
    const double denom = 2.0 + dd.d * w[idx];
    if (!(denom > 0)) {
      singular.push_back(idx);
      continue;
    }
    double gw_gd = 0.0, gw_gf = 0.0;
    for (int a = 0; a < n; ++a) {
      const std::int64_t st = g.stride(a);
      const double h = g.spacing()[a];
      const double gw = (w[idx + st] - w[idx - st]) / (2.0 * h);
      const double gf = (f[idx + st] - f[idx - st]) / (2.0 * h);
      gw_gd += gw * dd.grad_d[a];
      gw_gf += gw * gf;
    }
    out[idx] = n * dd.d * dd.d / (2.0 * denom) *
                   (2.0 * f[idx] * gw_gd + dd.d * gw_gf) -
               2.0 * dd.d * f[idx] * dd.laplacian_d;
  }
  if (!singular.empty()) {
    std::ostringstream os;
    os << "M_w: singular denominator 2 + d w <= 0 at " << singular.size()
       << " node(s), first at lattice index " << singular.front();
    throw SingularityError(os.str());
  }
  return out;
}

ScalarField fr_residual(const FuchsianOperatorContext& ctx, const ScalarField& u) {
  const MaskedGrid& g = *ctx.grid;
  const ScalarField v = hyperbolic_radius(u);
  const ScalarField w = renormalized_w(v);
  const ScalarField Lw = apply_L(ctx, w);
  const ScalarField Mw = apply_Mw(ctx, w, w);

  ScalarField out = make_field(ctx.grid, Quantity::kResidual);
  parallel_for(g.lattice_size(), [&](std::int64_t idx) {
    if (!std::isfinite(Lw[idx]) || !std::isfinite(Mw[idx])) return;
    const DistanceData dd = g.distance(idx);
    out[idx] = Lw[idx] + 2.0 * dd.laplacian_d - Mw[idx];
  });
  return out;
}

// ---------------------------------------------------------------------------
// strip machinery
// ---------------------------------------------------------------------------

StripField make_strip(int n, double theta, const std::vector<int>& ny, int nt) {
  if (n < 3) throw ArgumentError("strip: dimension n >= 3 required");
  if (static_cast<int>(ny.size()) != n - 1)
    throw ArgumentError("strip: need n-1 Y axis sizes");
  for (int m : ny)
    if (m < 1) throw ArgumentError("strip: Y sizes must be >= 1");
  if (nt < 8) throw ArgumentError("strip: need nt >= 8");
  if (!(theta > 0)) throw ArgumentError("strip: theta must be positive");
  StripField f;
  f.n = n;
  f.theta = theta;
  f.ny = ny;
  f.nt = nt;
  f.values.assign(static_cast<std::size_t>((nt + 1) * f.y_size()), 0.0);
  return f;
}

namespace {

void require_same_shape(const StripField& a, const StripField& b, const char* what) {
  if (a.n != b.n || a.nt != b.nt || a.ny != b.ny || a.theta != b.theta)
    throw ArgumentError(std::string(what) + ": strip shapes differ");
}

// Spectral multiplier application along the Y axes, one T row at a time.
// symbol(m_vector) receives the integer mode indices (already centred).
template <typename Symbol>
StripField y_spectral_apply(const StripField& f, const Symbol& symbol) {
  StripField out = make_strip(f.n, f.theta, f.ny, f.nt);
  const int rank = f.n - 1;
  const std::int64_t ysz = f.y_size();
  if (ysz == 1) {
    // single Y point: only the zero mode exists
    std::vector<int> zero(static_cast<std::size_t>(rank), 0);
    const std::complex<double> s = symbol(zero);
    for (int j = 0; j <= f.nt; ++j) out.at(j, 0) = (s * f.at(j, 0)).real();
    return out;
  }

  std::vector<int> dims(f.ny.begin(), f.ny.end());
  fftw_complex* buf = fftw_alloc_complex(static_cast<std::size_t>(ysz));
  fftw_plan fwd = fftw_plan_dft(rank, dims.data(), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  fftw_plan bwd = fftw_plan_dft(rank, dims.data(), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);

  std::vector<std::complex<double>> sym(static_cast<std::size_t>(ysz));
  {
    std::vector<int> mode(static_cast<std::size_t>(rank));
    for (std::int64_t y = 0; y < ysz; ++y) {
      std::int64_t rem = y;
      for (int a = rank - 1; a >= 0; --a) {
        const int nya = f.ny[static_cast<std::size_t>(a)];
        int m = static_cast<int>(rem % nya);
        rem /= nya;
        if (m > nya / 2) m -= nya;
        mode[static_cast<std::size_t>(a)] = m;
      }
      sym[static_cast<std::size_t>(y)] = symbol(mode);
    }
  }

  const double scale = 1.0 / static_cast<double>(ysz);
  for (int j = 0; j <= f.nt; ++j) {
    for (std::int64_t y = 0; y < ysz; ++y) {
      buf[y][0] = f.at(j, y);
      buf[y][1] = 0.0;
    }
    fftw_execute(fwd);
    for (std::int64_t y = 0; y < ysz; ++y) {
      const std::complex<double> c(buf[y][0], buf[y][1]);
      const std::complex<double> r = c * sym[static_cast<std::size_t>(y)];
      buf[y][0] = r.real();
      buf[y][1] = r.imag();
    }
    fftw_execute(bwd);
    for (std::int64_t y = 0; y < ysz; ++y) out.at(j, y) = buf[y][0] * scale;
  }
  fftw_destroy_plan(fwd);
  fftw_destroy_plan(bwd);
  fftw_free(buf);
  return out;
}

// Lap' along Y (periodic with period 2*theta): symbol -(pi/theta)^2 sum m_a^2.
StripField y_laplacian(const StripField& f) {
  const double xi0 = std::numbers::pi / f.theta;
  return y_spectral_apply(f, [&](const std::vector<int>& mode) {
    double s = 0.0;
    for (int m : mode) s += static_cast<double>(m) * m * xi0 * xi0;
    return std::complex<double>(-s, 0.0);
  });
}

// d/dY_a spectral derivative (Nyquist mode dropped, as usual for odd orders).
StripField y_derivative(const StripField& f, int axis) {
  const double xi0 = std::numbers::pi / f.theta;
  const int nya = f.ny[static_cast<std::size_t>(axis)];
  return y_spectral_apply(f, [&](const std::vector<int>& mode) {
    const int m = mode[static_cast<std::size_t>(axis)];
    if (2 * std::abs(m) == nya) return std::complex<double>(0.0, 0.0);
    return std::complex<double>(0.0, xi0 * m);
  });
}

// second-order T derivative tables (central inside, one-sided at the edges)
double t_deriv(const StripField& f, int j, std::int64_t y) {
  const double dt = f.dt();
  if (j == 0)
    return (-1.5 * f.at(0, y) + 2.0 * f.at(1, y) - 0.5 * f.at(2, y)) / dt;
  if (j == f.nt)
    return (1.5 * f.at(f.nt, y) - 2.0 * f.at(f.nt - 1, y) + 0.5 * f.at(f.nt - 2, y)) / dt;
  return (f.at(j + 1, y) - f.at(j - 1, y)) / (2.0 * dt);
}

double t_second(const StripField& f, int j, std::int64_t y) {
  const double dt = f.dt();
  if (j == 0)
    return (2.0 * f.at(0, y) - 5.0 * f.at(1, y) + 4.0 * f.at(2, y) - f.at(3, y)) / (dt * dt);
  if (j == f.nt)
    return (2.0 * f.at(f.nt, y) - 5.0 * f.at(f.nt - 1, y) + 4.0 * f.at(f.nt - 2, y) -
            f.at(f.nt - 3, y)) /
           (dt * dt);
  return (f.at(j + 1, y) - 2.0 * f.at(j, y) + f.at(j - 1, y)) / (dt * dt);
}

// Catmull-Rom style cubic interpolation of a column sampled on the closed
// uniform T grid.
double cubic_sample(const std::vector<double>& col, int nt, double dt, double t) {
  const double s = t / dt;
  int j = static_cast<int>(std::floor(s));
  if (j < 1) j = 1;
  if (j > nt - 3) j = nt - 3;
  if (nt < 4) {  // tiny grids fall back to linear
    const int k = std::min(nt - 1, std::max(0, static_cast<int>(std::floor(s))));
    const double fr = s - k;
    return col[static_cast<std::size_t>(k)] * (1 - fr) + col[static_cast<std::size_t>(k + 1)] * fr;
  }
  const double x = s - j;
  const double f0 = col[static_cast<std::size_t>(j - 1)], f1 = col[static_cast<std::size_t>(j)],
               f2 = col[static_cast<std::size_t>(j + 1)], f3 = col[static_cast<std::size_t>(j + 2)];
  // Lagrange cubic through the four surrounding nodes
  const double xm = x + 1.0, x0 = x, x1 = x - 1.0, x2 = x - 2.0;
  return f0 * (x0 * x1 * x2) / (-6.0) + f1 * (xm * x1 * x2) / 2.0 +
         f2 * (xm * x0 * x2) / (-2.0) + f3 * (xm * x0 * x1) / 6.0;
}

// Gauss-Legendre nodes/weights on [0,1], computed by Newton iteration on the
// Legendre recurrence (deterministic).
void gauss_legendre_01(int m, std::vector<double>& xs, std::vector<double>& ws) {
  xs.resize(static_cast<std::size_t>(m));
  ws.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= m; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = m * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= m; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const double dp = m * (x * p1 - p0) / (x * x - 1.0);
    xs[static_cast<std::size_t>(m - 1 - i)] = 0.5 * (x + 1.0);
    ws[static_cast<std::size_t>(m - 1 - i)] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
}

constexpr int kSimpsonPanels = 64;
constexpr int kGaussPoints = 32;

}  // namespace

StripField apply_D(const StripField& f) {
  StripField out = make_strip(f.n, f.theta, f.ny, f.nt);
  const std::int64_t ysz = f.y_size();
  for (int j = 0; j <= f.nt; ++j) {
    const double T = f.t_of(j);
    for (std::int64_t y = 0; y < ysz; ++y) out.at(j, y) = T * t_deriv(f, j, y);
  }
  return out;
}

StripField apply_L0(const StripField& f) {
  StripField lap = y_laplacian(f);
  StripField out = make_strip(f.n, f.theta, f.ny, f.nt);
  const std::int64_t ysz = f.y_size();
  const double n = f.n;
  for (int j = 0; j <= f.nt; ++j) {
    const double T = f.t_of(j);
    for (std::int64_t y = 0; y < ysz; ++y) {
      const double ftt = t_second(f, j, y);
      const double ft = t_deriv(f, j, y);
      out.at(j, y) = T * T * ftt + (4.0 - n) * T * ft + (2.0 - 2.0 * n) * f.at(j, y) +
                     T * T * lap.at(j, y);
    }
  }
  return out;
}

StripField apply_L0prime(const StripField& f) {
  StripField lap = y_laplacian(f);
  StripField out = make_strip(f.n, f.theta, f.ny, f.nt);
  const std::int64_t ysz = f.y_size();
  for (int j = 0; j <= f.nt; ++j) {
    const double T = f.t_of(j);
    for (std::int64_t y = 0; y < ysz; ++y) {
      const double ftt = t_second(f, j, y);
      const double ft = t_deriv(f, j, y);
      out.at(j, y) = T * T * ftt + 2.0 * T * ft - 2.0 * f.at(j, y) + T * T * lap.at(j, y);
    }
  }
  return out;
}

StripField apply_L1(const StripField& f, const StripCoefficients& coef) {
  const int rank = f.n - 1;
  if (static_cast<int>(coef.grad_tilde.size()) != rank)
    throw ArgumentError("apply_L1: need n-1 tangential gradient components");
  require_same_shape(f, coef.lap_d, "apply_L1");

  StripField Df = apply_D(f);
  // T f and its Y-derivatives; D f and its Y-derivatives
  StripField Tf = make_strip(f.n, f.theta, f.ny, f.nt);
  const std::int64_t ysz = f.y_size();
  for (int j = 0; j <= f.nt; ++j) {
    const double T = f.t_of(j);
    for (std::int64_t y = 0; y < ysz; ++y) Tf.at(j, y) = T * f.at(j, y);
  }

  StripField out = make_strip(f.n, f.theta, f.ny, f.nt);
  for (int a = 0; a < rank; ++a) {
    require_same_shape(f, coef.grad_tilde[static_cast<std::size_t>(a)], "apply_L1");
    StripField dTf = y_derivative(Tf, a);
    StripField dDf = y_derivative(Df, a);
    for (int j = 0; j <= f.nt; ++j) {
      const double T = f.t_of(j);
      for (std::int64_t y = 0; y < ysz; ++y) {
        const double gd = coef.grad_tilde[static_cast<std::size_t>(a)].at(j, y);
        out.at(j, y) += (4.0 - f.n) * gd * dTf.at(j, y) + 2.0 * T * gd * dDf.at(j, y);
      }
    }
  }
  for (int j = 0; j <= f.nt; ++j) {
    const double T = f.t_of(j);
    for (std::int64_t y = 0; y < ysz; ++y)
      out.at(j, y) += T * Df.at(j, y) * coef.lap_d.at(j, y);
  }
  return out;
}

ModelInverse invert_model_operator(const StripField& k) {
  const int nt = k.nt;
  const std::int64_t ysz = k.y_size();
  const double dt = k.dt();
  const double theta = k.theta;

  ModelInverse out;
  out.ktilde = make_strip(k.n, theta, k.ny, nt);

  // ktilde(Y,T) = int_1^{theta/T} k(Y, T s) s^{-2} ds + k(Y,theta) T/theta;
  // the tail is the closed form for the constant extension beyond theta.
  std::vector<double> col(static_cast<std::size_t>(nt + 1));
  for (std::int64_t y = 0; y < ysz; ++y) {
    for (int j = 0; j <= nt; ++j) col[static_cast<std::size_t>(j)] = k.at(j, y);
    out.ktilde.at(0, y) = k.at(0, y);  // limit value: ktilde = k at T = 0
    for (int j = 1; j <= nt; ++j) {
      const double T = k.t_of(j);
      const double smax = theta / T;
      double integral = 0.0;
      if (smax > 1.0) {
        const double hpanel = (smax - 1.0) / kSimpsonPanels;
        for (int l = 0; l <= kSimpsonPanels; ++l) {
          const double s = 1.0 + l * hpanel;
          const double wgt = (l == 0 || l == kSimpsonPanels) ? 1.0 : (l % 2 == 1 ? 4.0 : 2.0);
          const double ts = std::min(T * s, theta);
          integral += wgt * cubic_sample(col, nt, dt, ts) / (s * s);
        }
        integral *= hpanel / 3.0;
      }
      out.ktilde.at(j, y) = integral + k.at(nt, y) * T / theta;
    }
  }

  // Fourier in Y reduces the Poisson problem to per-mode two-point BVPs in T:
  //   h'' - |xi|^2 h = -ktilde,  h(0) = 0,  h'(theta) = 0.
  out.h = make_strip(k.n, theta, k.ny, nt);
  {
    const int rank = k.n - 1;
    const double xi0 = std::numbers::pi / theta;

    std::vector<int> dims(k.ny.begin(), k.ny.end());
    const bool spectral = ysz > 1;
    fftw_complex* buf = spectral ? fftw_alloc_complex(static_cast<std::size_t>(ysz)) : nullptr;
    fftw_plan fwd = nullptr, bwd = nullptr;
    if (spectral) {
      fwd = fftw_plan_dft(rank, dims.data(), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
      bwd = fftw_plan_dft(rank, dims.data(), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    }

    // transform each T row of ktilde
    std::vector<std::complex<double>> khat(static_cast<std::size_t>((nt + 1) * ysz));
    for (int j = 0; j <= nt; ++j) {
      if (!spectral) {
        khat[static_cast<std::size_t>(j)] = out.ktilde.at(j, 0);
        continue;
      }
      for (std::int64_t y = 0; y < ysz; ++y) {
        buf[y][0] = out.ktilde.at(j, y);
        buf[y][1] = 0.0;
      }
      fftw_execute(fwd);
      for (std::int64_t y = 0; y < ysz; ++y)
        khat[static_cast<std::size_t>(j * ysz + y)] = {buf[y][0], buf[y][1]};
    }

    // per-mode tridiagonal solves (real system applied to re and im parts)
    std::vector<std::complex<double>> hhat(static_cast<std::size_t>((nt + 1) * ysz));
    std::vector<double> xi2(static_cast<std::size_t>(ysz), 0.0);
    for (std::int64_t y = 0; y < ysz; ++y) {
      std::int64_t rem = y;
      double s = 0.0;
      for (int a = rank - 1; a >= 0; --a) {
        const int nya = k.ny[static_cast<std::size_t>(a)];
        int m = static_cast<int>(rem % nya);
        rem /= nya;
        if (m > nya / 2) m -= nya;
        s += xi0 * xi0 * m * m;
      }
      xi2[static_cast<std::size_t>(y)] = s;
    }

    std::vector<double> dl(static_cast<std::size_t>(nt)), dm(static_cast<std::size_t>(nt)),
        du(static_cast<std::size_t>(nt)), rr(static_cast<std::size_t>(nt)),
        ri(static_cast<std::size_t>(nt));
    for (std::int64_t y = 0; y < ysz; ++y) {
      // unknowns j = 1..nt (row 0 is the Dirichlet zero)
      for (int j = 1; j <= nt; ++j) {
        const std::size_t kk = static_cast<std::size_t>(j - 1);
        const bool top = j == nt;
        dl[kk] = top ? 2.0 / (dt * dt) : 1.0 / (dt * dt);
        dm[kk] = -2.0 / (dt * dt) - xi2[static_cast<std::size_t>(y)];
        du[kk] = 1.0 / (dt * dt);
        const std::complex<double> rhs = -khat[static_cast<std::size_t>(j * ysz + y)];
        rr[kk] = rhs.real();
        ri[kk] = rhs.imag();
      }
      // forward elimination / back substitution on both parts
      for (int pass = 0; pass < 2; ++pass) {
        std::vector<double>& rhs = pass == 0 ? rr : ri;
        std::vector<double> b(dm), c(du), a(dl);
        for (std::size_t i2 = 1; i2 < b.size(); ++i2) {
          const double mfac = a[i2] / b[i2 - 1];
          b[i2] -= mfac * c[i2 - 1];
          rhs[i2] -= mfac * rhs[i2 - 1];
        }
        rhs.back() /= b.back();
        for (std::size_t i2 = b.size() - 1; i2-- > 0;)
          rhs[i2] = (rhs[i2] - c[i2] * rhs[i2 + 1]) / b[i2];
      }
      hhat[static_cast<std::size_t>(y)] = 0.0;  // h(Y,0) = 0
      for (int j = 1; j <= nt; ++j)
        hhat[static_cast<std::size_t>(j * ysz + y)] = {rr[static_cast<std::size_t>(j - 1)],
                                                       ri[static_cast<std::size_t>(j - 1)]};
    }

    for (int j = 0; j <= nt; ++j) {
      if (!spectral) {
        out.h.at(j, 0) = hhat[static_cast<std::size_t>(j)].real();
        continue;
      }
      for (std::int64_t y = 0; y < ysz; ++y) {
        buf[y][0] = hhat[static_cast<std::size_t>(j * ysz + y)].real();
        buf[y][1] = hhat[static_cast<std::size_t>(j * ysz + y)].imag();
      }
      fftw_execute(bwd);
      const double scale = 1.0 / static_cast<double>(ysz);
      for (std::int64_t y = 0; y < ysz; ++y) out.h.at(j, y) = buf[y][0] * scale;
    }
    if (spectral) {
      fftw_destroy_plan(fwd);
      fftw_destroy_plan(bwd);
      fftw_free(buf);
    }
  }

  // h_TT from the equation itself: h_TT = -ktilde - Lap' h (spectrally exact
  // in Y), available on every row including T = 0.
  StripField htt = y_laplacian(out.h);
  for (int j = 0; j <= nt; ++j)
    for (std::int64_t y = 0; y < ysz; ++y)
      htt.at(j, y) = -out.ktilde.at(j, y) - htt.at(j, y);

  // f0 = int_0^1 sigma h_TT(Y, T sigma) dsigma (Gauss-Legendre), and
  // f0(Y,0) = h_TT(Y,0)/2 = -k(Y,0)/2 at the limit row.
  out.f0 = make_strip(k.n, theta, k.ny, nt);
  std::vector<double> gx, gw;
  gauss_legendre_01(kGaussPoints, gx, gw);
  std::vector<double> hcol(static_cast<std::size_t>(nt + 1));
  for (std::int64_t y = 0; y < ysz; ++y) {
    for (int j = 0; j <= nt; ++j) hcol[static_cast<std::size_t>(j)] = htt.at(j, y);
    out.f0.at(0, y) = 0.5 * hcol[0];
    for (int j = 1; j <= nt; ++j) {
      const double T = k.t_of(j);
      double acc = 0.0;
      for (int q = 0; q < kGaussPoints; ++q) {
        const double sigma = gx[static_cast<std::size_t>(q)];
        acc += gw[static_cast<std::size_t>(q)] * sigma *
               cubic_sample(hcol, nt, dt, T * sigma);
      }
      out.f0.at(j, y) = acc;
    }
  }
  return out;
}

StripField assemble_boundary_solution(const StripField& k) {
  ModelInverse inv = invert_model_operator(k);
  StripField f = inv.f0;
  const double a = 1.0 / (k.n - 1.0);
  for (double& val : f.values) val *= a;
  return f;
}

}  // namespace lnr
