#pragma once

#include <string>

#include "json.hpp"

#include "comparison.hpp"
#include "solver.hpp"

namespace lnr {

using Json = nlohmann::ordered_json;

/// Structured-grid ASCII format: a small key/value header (n, extents,
/// spacing, origin, h_trunc, quantity) followed by one value per line in
/// row-major order (first axis fastest); undefined nodes print as nan.
void write_field(const ScalarField& field, const std::string& path);

/// Strip fields use the same header family with (Y, T) axes and theta.
void write_strip(const StripField& strip, const std::string& name, const std::string& path);

/// Radial profiles as CSV with columns r, u, v, w.
void write_profile_csv(const RadialProfile& prof, const std::string& path);

struct ConvergenceRow {
  int resolution = 0;
  double h_grid = 0.0;
  double h_trunc = 0.0;
  double error = 0.0;
};

/// CSV columns: resolution, h_grid, h_trunc, error, observed_order (order
/// between consecutive rows; first row leaves it empty).
void write_convergence_csv(const std::vector<ConvergenceRow>& rows, const std::string& metric,
                           const std::string& path);

Json report_to_json(const CheckReport& rep);
Json summary_to_json(const SolveSummary& summary);
Json critical_points_to_json(const std::vector<CriticalPoint>& pts);

void write_json(const Json& j, const std::string& path);

}  // namespace lnr
