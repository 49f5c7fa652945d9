#pragma once

#include <limits>
#include <memory>
#include <vector>

#include "grid.hpp"

namespace lnr {

enum class SolveMode { kNewton, kMonotoneSequence };

// Unknown of the discrete problem: the blow-up solution u itself, or the
// hyperbolic radius v = u^{-2/(n-2)}. The primal form carries the
// second-order convergence signature of the (2n+1)-point scheme; the
// hyperbolic-radius form is far more accurate near the boundary (exact for
// balls) and backs the expansion diagnostics.
enum class Formulation { kPrimal, kHyperbolicRadius };

struct SolverConfig {
  SolveMode mode = SolveMode::kNewton;
  Formulation formulation = Formulation::kPrimal;
  int data_order = 2;  // 1 = one-term (2d)^{1-n/2}, 2 = two-term (2d - d^2 H)^{1-n/2}
  double tolerance = 1e-10;
  int max_iterations = 60;
  int max_line_search = 40;
  int max_linear_iterations = 4000;
  std::vector<double> m_ladder;  // monotone-sequence mode boundary values
};

/// Dirichlet value of u on the truncation layer from the boundary expansion
/// of the hyperbolic radius, evaluated at the node's own distance.
double asymptotic_dirichlet_data(const DistanceData& dd, int n, int order);
/// Same expansion in terms of v.
double asymptotic_dirichlet_v(const DistanceData& dd, int n, int order);

struct SolveSummary {
  std::vector<double> newton_residuals;
  std::vector<int> linear_iterations;
  std::vector<double> ladder;  // m values in monotone mode
  double final_residual = 0.0;
  // discrete maximum-principle sanity (monotone mode): interior values may
  // not exceed the truncation-layer data maximum
  bool max_principle_ok = true;
  double max_principle_margin = std::numeric_limits<double>::infinity();
};

/// Solves the Dirichlet problem for the blow-up equation on the truncated
/// domain {d > h_trunc} carried by the grid. Returns the u-field extended by
/// the asymptotic data over the inner collar {0 < d < h_trunc}. Grids with a
/// depth limit need inner_source (a solved coarse field of the same quantity
/// tag kU) for their inner Dirichlet layer. ladder_fields, when given,
/// receives the intermediate monotone-mode iterates.
ScalarField solve_truncated(std::shared_ptr<const MaskedGrid> grid, const SolverConfig& cfg,
                            SolveSummary* summary = nullptr,
                            const ScalarField* inner_source = nullptr,
                            std::vector<ScalarField>* ladder_fields = nullptr);

/// v = u^{-2/(n-2)} wherever u is defined.
ScalarField hyperbolic_radius(const ScalarField& u);

/// w = (v - 2d)/d^2 wherever v is defined and d > 0.
ScalarField renormalized_w(const ScalarField& v);

struct CriticalPoint {
  Vector x;
  double value = 0.0;
  enum class Type { kMax, kMin, kSaddle, kDegenerate } type = Type::kDegenerate;
  std::int64_t node = -1;
  std::int64_t cluster_size = 1;  // flagged nodes merged into this point
};

/// Interior critical points of the interpolated field: nodes where the
/// central-difference gradient drops below grad_tol (default 2 * max
/// spacing), clustered by adjacency and labelled by the discrete Hessian
/// signature.
std::vector<CriticalPoint> hyperbolic_critical_points(const ScalarField& v,
                                                      double grad_tol = -1.0);

}  // namespace lnr
