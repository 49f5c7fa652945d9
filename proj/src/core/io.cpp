#include "io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>

namespace lnr {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  return os;
}

const char* quantity_name(Quantity q) {
  switch (q) {
    case Quantity::kU:
      return "u";
    case Quantity::kV:
      return "v";
    case Quantity::kW:
      return "w";
    case Quantity::kResidual:
      return "residual";
  }
  return "u";
}

}  // namespace

void write_field(const ScalarField& field, const std::string& path) {
  const MaskedGrid& g = *field.grid;
  std::ofstream os = open_out(path);
  os << "lnr-field 1\n";
  os << "quantity " << quantity_name(field.quantity) << "\n";
  os << "n " << g.dim() << "\n";
  os << "extents";
  for (int r : g.resolution()) os << ' ' << r;
  os << "\nspacing";
  for (int a = 0; a < g.dim(); ++a) os << ' ' << fmt(g.spacing()[a]);
  os << "\norigin";
  for (int a = 0; a < g.dim(); ++a) os << ' ' << fmt(g.origin()[a]);
  os << "\nh_trunc " << fmt(g.h_trunc()) << "\n";
  os << "values " << g.lattice_size() << "\n";
  for (std::int64_t i = 0; i < g.lattice_size(); ++i)
    os << fmt(field.values[static_cast<std::size_t>(i)]) << '\n';
}

void write_strip(const StripField& strip, const std::string& name, const std::string& path) {
  std::ofstream os = open_out(path);
  os << "lnr-strip 1\n";
  os << "quantity " << name << "\n";
  os << "n " << strip.n << "\n";
  os << "theta " << fmt(strip.theta) << "\n";
  os << "extents";
  for (int m : strip.ny) os << ' ' << m;
  os << ' ' << (strip.nt + 1) << "\nspacing";
  for (int m : strip.ny) os << ' ' << fmt(2.0 * strip.theta / m);
  os << ' ' << fmt(strip.dt()) << "\n";
  os << "axes";
  for (std::size_t a = 0; a + 1 < strip.ny.size() + 1; ++a) os << " Y" << (a + 1);
  os << " T\n";
  os << "values " << strip.values.size() << "\n";
  for (const double v : strip.values) os << fmt(v) << '\n';
}

void write_profile_csv(const RadialProfile& prof, const std::string& path) {
  std::ofstream os = open_out(path);
  os << "r,u,v,w\n";
  for (std::size_t i = 0; i < prof.size(); ++i)
    os << fmt(prof.r[i]) << ',' << fmt(prof.u[i]) << ',' << fmt(prof.v[i]) << ','
       << fmt(prof.w(i)) << '\n';
}

void write_convergence_csv(const std::vector<ConvergenceRow>& rows, const std::string& metric,
                           const std::string& path) {
  std::ofstream os = open_out(path);
  os << "resolution,h_grid,h_trunc," << metric << ",observed_order\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    os << rows[i].resolution << ',' << fmt(rows[i].h_grid) << ',' << fmt(rows[i].h_trunc) << ','
       << fmt(rows[i].error) << ',';
    if (i > 0 && rows[i].error > 0 && rows[i - 1].error > 0) {
      const double order = std::log(rows[i - 1].error / rows[i].error) /
                           std::log(rows[i - 1].h_grid / rows[i].h_grid);
      os << fmt(order);
    }
    os << '\n';
  }
}

Json report_to_json(const CheckReport& rep) {
  Json j;
  j["check"] = rep.name;
  j["samples"] = rep.samples;
  j["violations"] = rep.violations;
  j["worst_margin"] = rep.worst_margin;
  Json metrics = Json::object();
  for (const auto& [k, v] : rep.metrics) metrics[k] = v;
  j["metrics"] = metrics;
  j["pass"] = rep.pass;
  if (!rep.note.empty()) j["note"] = rep.note;
  return j;
}

Json summary_to_json(const SolveSummary& summary) {
  Json j;
  j["newton_residuals"] = summary.newton_residuals;
  j["linear_iterations"] = summary.linear_iterations;
  j["final_residual"] = summary.final_residual;
  if (!summary.ladder.empty()) {
    j["m_ladder"] = summary.ladder;
    j["max_principle_ok"] = summary.max_principle_ok;
    j["max_principle_margin"] = summary.max_principle_margin;
  }
  return j;
}

Json critical_points_to_json(const std::vector<CriticalPoint>& pts) {
  Json arr = Json::array();
  for (const CriticalPoint& cp : pts) {
    Json j;
    Json x = Json::array();
    for (int a = 0; a < cp.x.size(); ++a) x.push_back(cp.x[a]);
    j["x"] = x;
    j["value"] = cp.value;
    switch (cp.type) {
      case CriticalPoint::Type::kMax:
        j["type"] = "max";
        break;
      case CriticalPoint::Type::kMin:
        j["type"] = "min";
        break;
      case CriticalPoint::Type::kSaddle:
        j["type"] = "saddle";
        break;
      case CriticalPoint::Type::kDegenerate:
        j["type"] = "degenerate";
        break;
    }
    j["cluster_size"] = cp.cluster_size;
    arr.push_back(j);
  }
  return arr;
}

void write_json(const Json& j, const std::string& path) {
  std::ofstream os = open_out(path);
  os << j.dump(2) << '\n';
}

}  // namespace lnr
