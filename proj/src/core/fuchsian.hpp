#pragma once

#include <memory>
#include <vector>

#include "grid.hpp"
#include "solver.hpp"

namespace lnr {

/// Context for the degenerate boundary operators on grid fields:
///   L w   = d^2 Lap w + (4-n) d grad d . grad w + (2-2n) w
///   M_w f = n d^2 / (2(2+dw)) [2 f grad d . grad w + d grad w . grad f] - 2 d f Lap d
/// Distance quantities are analytic (grid cache); field derivatives are
/// central differences.
struct FuchsianOperatorContext {
  std::shared_ptr<const MaskedGrid> grid;
  double alpha = 0.5;  // Hoelder exponent used by the L(d^alpha) diagnostics
  double delta = 0.0;  // thin-domain width Omega_delta = {0 < d < delta}; 0 = r0/2

  int n() const { return grid->dim(); }
  double width() const { return delta > 0 ? delta : 0.5 * grid->domain().sphere_radius(); }
};

/// Pointwise L on a field; nodes lacking a full finite stencil are skipped
/// (NaN) and counted.
ScalarField apply_L(const FuchsianOperatorContext& ctx, const ScalarField& w,
                    std::int64_t* skipped = nullptr);

/// Pointwise M_w(f). Throws SingularityError when 2 + d w <= 0 somewhere.
ScalarField apply_Mw(const FuchsianOperatorContext& ctx, const ScalarField& w,
                     const ScalarField& f);

/// Fuchsian residual L w + 2 Lap d - M_w(w) of a positive u-field, where
/// w = (u^{-2/(n-2)} - 2d)/d^2. Vanishes identically for exact solutions.
ScalarField fr_residual(const FuchsianOperatorContext& ctx, const ScalarField& u);

// ---------------------------------------------------------------------------
// Periodic strip (Y, T): model operator L0 and its inverse
// ---------------------------------------------------------------------------

/// Function on the strip {0 <= T <= theta}, periodic with period 2*theta in
/// each of the n-1 Y variables. The T grid is closed; row 0 stores the
/// T -> 0 limit values. Y layout is row-major with the last axis fastest.
struct StripField {
  int n = 3;
  double theta = 1.0;
  std::vector<int> ny;  // n-1 sizes
  int nt = 0;           // rows 0..nt at T_j = j*theta/nt
  std::vector<double> values;

  std::int64_t y_size() const {
    std::int64_t s = 1;
    for (int m : ny) s *= m;
    return s;
  }
  double dt() const { return theta / nt; }
  double t_of(int j) const { return static_cast<double>(j) * dt(); }
  double& at(int j, std::int64_t y) { return values[static_cast<std::size_t>(j) * y_size() + y]; }
  double at(int j, std::int64_t y) const {
    return values[static_cast<std::size_t>(j) * y_size() + static_cast<std::size_t>(y)];
  }
  std::size_t size() const { return values.size(); }
};

StripField make_strip(int n, double theta, const std::vector<int>& ny, int nt);

/// Samples an analytic function k(Y, T) on the strip grid.
template <typename Fn>
StripField sample_strip(int n, double theta, const std::vector<int>& ny, int nt,
                        const Fn& k) {
  StripField f = make_strip(n, theta, ny, nt);
  const std::int64_t ysz = f.y_size();
  std::vector<double> Y(static_cast<std::size_t>(n - 1));
  for (int j = 0; j <= nt; ++j) {
    for (std::int64_t y = 0; y < ysz; ++y) {
      std::int64_t rem = y;
      for (int a = n - 2; a >= 0; --a) {
        const int nya = f.ny[static_cast<std::size_t>(a)];
        const std::int64_t ia = rem % nya;
        rem /= nya;
        Y[static_cast<std::size_t>(a)] = 2.0 * theta * static_cast<double>(ia) / nya;
      }
      f.at(j, y) = k(Y, f.t_of(j));
    }
  }
  return f;
}

/// Euler operator D = T d/dT (exact zero on the T = 0 row).
StripField apply_D(const StripField& f);
/// L0 = (D+2)(D+1-n) + T^2 Lap'  (Y derivatives spectral, T second order).
StripField apply_L0(const StripField& f);
/// L0' = (D+2)(D-1) + T^2 Lap' = L0 + (n-2)(D+2).
StripField apply_L0prime(const StripField& f);

/// Strip coefficients for L1: the tangential distance gradient components
/// and the distance Laplacian as functions on the strip.
struct StripCoefficients {
  std::vector<StripField> grad_tilde;  // n-1 components
  StripField lap_d;
};

/// L1 = (4-n) grad~d . grad'(T f) + 2 T grad~d . grad'(D f) + T (D f) Lap d.
StripField apply_L1(const StripField& f, const StripCoefficients& coef);

/// Result of inverting the model operator: f0 = G[k] with L0' f0 = k,
/// together with the Poisson potential h and the transported source ktilde.
struct ModelInverse {
  StripField f0;
  StripField h;
  StripField ktilde;
};

/// Inverse of L0' on the periodic strip: builds ktilde with (D-1)ktilde = -k
/// (constant extension of k beyond T = theta gives the closed-form tail),
/// solves the Poisson problem (d_TT + Lap') h = -ktilde with h(Y, 0) = 0 and
/// h_T(Y, theta) = 0 by Fourier reduction to tridiagonal systems, then
/// evaluates f0 = int_0^1 sigma h_TT(Y, T sigma) dsigma by Gauss-Legendre
/// quadrature with h_TT taken from the equation itself.
ModelInverse invert_model_operator(const StripField& k);

/// Theorem-style assembly: f = G[k/(n-1)], with trace f(Y,0) = k(Y,0)/(2-2n).
StripField assemble_boundary_solution(const StripField& k);

}  // namespace lnr
