#pragma once

#include "comparison.hpp"

namespace lnr {

/// Shell maxima of the expansion defect |v - 2d + d^2 H(Q)| over the given
/// d-shells, with the fitted log-log slope (continuum prediction: the defect
/// is d^2 o(1), slope above 2).
CheckReport expansion_check(const ScalarField& v, const std::vector<double>& shells);

/// Range of |grad v| (central differences over finite stencils) at nodes
/// with 0 < d < d_max; the boundary asymptotics force |grad v| -> 2.
CheckReport gradient_check(const ScalarField& v, double d_max, double band = 0.1);

/// Max |v - 2d| over the shell {h_trunc <= d <= 2 h_trunc} and the stability
/// constant C = max / h_trunc^2.
CheckReport asy_v_check(const ScalarField& v);

/// Max Fuchsian residual |L w + 2 Lap d - M_w(w)| over full-stencil nodes
/// with d in (d_min, d_max).
CheckReport fr_residual_check(const ScalarField& u, double d_min, double d_max);

}  // namespace lnr
