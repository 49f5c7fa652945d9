#pragma once

#include <map>
#include <optional>
#include <string>

#include "fuchsian.hpp"
#include "radial.hpp"

namespace lnr {

enum class BarrierKind { kSphereSandwich, kW0PlusAd, kEpsilonSingular, kAlphaSupersolution };

/// Constants for the comparison barriers: w_A = w0 + A d, the singular
/// barrier eps (d^-2 + B d^-1), and the A d^alpha supersolution dominating
/// right-hand sides bounded by a d^alpha.
struct BarrierSpec {
  BarrierKind kind = BarrierKind::kSphereSandwich;
  double A = 1.0;
  double B = 2.0;
  double epsilon = 1e-3;
  double a = 1.0;
  double alpha = 0.5;
  double delta = 0.0;  // 0 = auto-select
};

/// Outcome of a verification pass: violations are data, not errors.
struct CheckReport {
  std::string name;
  std::int64_t samples = 0;
  std::int64_t violations = 0;
  double worst_margin = std::numeric_limits<double>::infinity();  // min slack; < 0 = violation
  std::map<std::string, double> metrics;
  bool pass = true;
  std::string note;
};

/// L applied to a radial function g(d) through analytic distance data:
/// L(g) = d^2 (g'' + g' Lap d) + (4-n) d g' + (2-2n) g.
double apply_L_radial(double g, double gp, double gpp, const DistanceData& dd, int n);

// closed forms of the barrier images under L
double closed_form_L_d(const DistanceData& dd, int n);
double closed_form_L_d_alpha(const DistanceData& dd, int n, double alpha);
double closed_form_L_singular(const DistanceData& dd, int n, double B);

struct SingularBarrierValues {
  double barrier = 0.0;  // eps (d^-2 + B d^-1)
  double image = 0.0;    // L(d^-2 + B d^-1), nonpositive under the B invariant
};
SingularBarrierValues singular_barrier_values(const DistanceData& dd, const BarrierSpec& spec,
                                              int n);

/// Closed-form identity check of L(d), L(d^alpha) and L(d^-2 + B d^-1) at
/// random interior points, analytic derivatives against the closed forms.
CheckReport operator_identity_check(const DomainDescriptor& dom, int samples, unsigned seed,
                                    double alpha, double B, double tol = 1e-10);

/// Sign checks of the barrier images on a sampled Omega_delta under the
/// BarrierSpec invariants.
CheckReport barrier_sign_check(const DomainDescriptor& dom, const BarrierSpec& spec, int samples,
                               unsigned seed);

/// Largest delta in {r0/2, r0/4, r0/8} whose sign condition holds on a dense
/// sample; empty when none qualifies.
std::optional<double> select_delta(const DomainDescriptor& dom, const BarrierSpec& spec,
                                   int samples, unsigned seed);

/// Sphere sandwich on a solved grid field: every non-exterior node with
/// 0 < d <= r0 lies on the inward normal of its nearest boundary point, and
/// must satisfy (2d + d^2/r0)^{1-n/2} <= u <= (2d - d^2/r0)^{1-n/2}.
CheckReport sphere_sandwich_check(const ScalarField& u, double tol = 1e-8);

/// Radial version at profile nodes with d <= r0.
CheckReport profile_sandwich_check(const RadialProfile& prof, double r0, double tol = 1e-8);

/// |w| <= 1/r0 + tol on {d <= r0} along a radial profile.
CheckReport profile_w_bound_check(const RadialProfile& prof, double r0, double tol = 1e-6);

/// Theorem-IV style bound on a grid w-field: |w + H(Q)| <= A d + slack over
/// Omega_delta, with -H standing in for w0, plus the fitted slope of
/// log max-shell |w + H| against log d over the given shells.
CheckReport verify_tilde_w_bound(const ScalarField& w, const std::vector<double>& shells,
                                 double A, double delta, double slack);

/// Radial analogue: slope of log |w + H| against log d near each blow-up
/// boundary of the profile.
CheckReport profile_tilde_w_slope(const RadialProfile& prof, const std::vector<double>& shells);

/// Discrete maximum-principle witness for z_eps = eps (d^-2 + B d^-1)
/// + (-H + A d) - w on Omega_delta: no interior node may fall strictly below
/// min(0, minimum over the d = delta slice).
CheckReport max_principle_witness(const ScalarField& w, const BarrierSpec& spec);

}  // namespace lnr
