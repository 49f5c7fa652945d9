#include "grid.hpp"

#include <cmath>
#include <sstream>

namespace lnr {

DistanceData MaskedGrid::distance(std::int64_t idx) const {
  const std::int32_t c = cache_index_[static_cast<std::size_t>(idx)];
  if (c < 0) throw ArgumentError("MaskedGrid::distance: no cache at exterior node");
  DistanceData dd;
  dd.d = cache_d_[static_cast<std::size_t>(c)];
  dd.laplacian_d = cache_lap_[static_cast<std::size_t>(c)];
  dd.mean_curvature = cache_H_[static_cast<std::size_t>(c)];
  dd.grad_d.resize(dim_);
  dd.nearest.resize(dim_);
  for (int a = 0; a < dim_; ++a) {
    dd.grad_d[a] = cache_grad_[static_cast<std::size_t>(c) * dim_ + a];
    dd.nearest[a] = cache_Q_[static_cast<std::size_t>(c) * dim_ + a];
  }
  return dd;
}

Vector MaskedGrid::position(std::int64_t idx) const {
  Vector x(dim_);
  for (int a = 0; a < dim_; ++a) {
    const std::int64_t i = (idx / strides_[static_cast<std::size_t>(a)]) %
                           res_[static_cast<std::size_t>(a)];
    x[a] = origin_[a] + static_cast<double>(i) * spacing_[a];
  }
  return x;
}

std::vector<int> MaskedGrid::multi_index(std::int64_t idx) const {
  std::vector<int> mi(static_cast<std::size_t>(dim_));
  for (int a = 0; a < dim_; ++a)
    mi[static_cast<std::size_t>(a)] = static_cast<int>(
        (idx / strides_[static_cast<std::size_t>(a)]) % res_[static_cast<std::size_t>(a)]);
  return mi;
}

std::int64_t MaskedGrid::count(NodeClass c) const {
  switch (c) {
    case NodeClass::kInterior:
      return static_cast<std::int64_t>(interior_.size());
    case NodeClass::kTruncationData:
      return static_cast<std::int64_t>(truncation_.size());
    case NodeClass::kCollar:
      return static_cast<std::int64_t>(collar_.size());
    case NodeClass::kInnerData:
      return static_cast<std::int64_t>(inner_data_.size());
    case NodeClass::kExterior:
      return lattice_size_ - static_cast<std::int64_t>(interior_.size() + truncation_.size() +
                                                       collar_.size() + inner_data_.size());
  }
  return 0;
}

namespace {

// Cheap two-sided distance bounds (exact for ball/shell, osculating bounds
// for the ellipsoid) used to skip projections at clearly inactive nodes.
void distance_bounds(const DomainDescriptor& dom, const Vector& x, double& lo, double& hi) {
  if (auto ed = dom.exact_distance(x)) {
    lo = hi = *ed;
    return;
  }
  // ellipsoid: amin (1 - rho) <= d <= amax (1 - rho) for interior points
  const Vector y = x - dom.center();
  double s = 0.0;
  for (int i = 0; i < dom.dim(); ++i) {
    const double ai = dom.semi_axes()[i];
    s += y[i] * y[i] / (ai * ai);
  }
  const double rho = std::sqrt(s);
  const double amin = dom.semi_axes().minCoeff();
  const double amax = dom.semi_axes().maxCoeff();
  lo = amin * (1.0 - rho);
  hi = amax * (1.0 - rho);
}

}  // namespace

std::shared_ptr<MaskedGrid> build_masked_grid(const DomainDescriptor& dom,
                                              const std::vector<int>& resolution, double h_trunc,
                                              double depth_limit) {
  const int n = dom.dim();
  if (static_cast<int>(resolution.size()) != n)
    throw ArgumentError("build_masked_grid: resolution must give one cell count per axis");
  for (int r : resolution)
    if (r < 17) throw ArgumentError("build_masked_grid: resolution >= 17 required");
  if (!(h_trunc > 0 && h_trunc < dom.sphere_radius() / 4))
    throw ArgumentError("build_masked_grid: need 0 < h_trunc < r0/4");

  auto grid = std::make_shared<MaskedGrid>();
  MaskedGrid& g = *grid;
  g.dom_ = dom;
  g.dim_ = n;
  g.res_ = resolution;
  g.h_trunc_ = h_trunc;
  g.depth_limit_ = depth_limit;
  g.origin_.resize(n);
  g.spacing_.resize(n);
  g.strides_.assign(static_cast<std::size_t>(n), 1);
  g.lattice_size_ = 1;
  for (int a = 0; a < n; ++a) {
    g.strides_[static_cast<std::size_t>(a)] = g.lattice_size_;
    g.lattice_size_ *= resolution[static_cast<std::size_t>(a)];
    const double width = dom.bbox_hi()[a] - dom.bbox_lo()[a];
    g.spacing_[a] = width / resolution[static_cast<std::size_t>(a)];
    g.origin_[a] = dom.bbox_lo()[a] + 0.5 * g.spacing_[a];
  }
  g.max_spacing_ = g.spacing_.maxCoeff();

  // band of nodes that must stay active beyond the depth limit (stencil reach)
  const double store_limit = depth_limit + 2.0 * g.max_spacing_;

  g.classes_.assign(static_cast<std::size_t>(g.lattice_size_), 0);
  g.cache_index_.assign(static_cast<std::size_t>(g.lattice_size_), -1);

  // pass 1: distances at candidate nodes (parallel); full data comes later
  // and only at cached nodes, keeping transient memory small
  std::vector<double> dvals(static_cast<std::size_t>(g.lattice_size_),
                            -std::numeric_limits<double>::infinity());

  parallel_for(g.lattice_size_, [&](std::int64_t idx) {
    const Vector x = g.position(idx);
    if (dom.phi(x) >= 0.0) return;  // outside the open domain
    double blo, bhi;
    distance_bounds(dom, x, blo, bhi);
    if (blo > store_limit) return;  // deep beyond the active band
    dvals[static_cast<std::size_t>(idx)] = signed_distance(dom, x).d;
  });

  // pass 2: classification
  auto covered = [&](std::int64_t idx) {  // node belongs to {d >= h_trunc}
    const double d = dvals[static_cast<std::size_t>(idx)];
    return d >= h_trunc;
  };

  parallel_for(g.lattice_size_, [&](std::int64_t idx) {
    const double d = dvals[static_cast<std::size_t>(idx)];
    std::uint8_t& cls = g.classes_[static_cast<std::size_t>(idx)];
    if (std::isinf(d)) {
      cls = static_cast<std::uint8_t>(NodeClass::kExterior);
      return;
    }
    if (d > store_limit) {
      cls = static_cast<std::uint8_t>(NodeClass::kExterior);
      return;
    }
    if (d < h_trunc) {
      cls = static_cast<std::uint8_t>(d > 0.0 ? NodeClass::kCollar : NodeClass::kExterior);
      return;
    }
    if (d > depth_limit) {
      cls = static_cast<std::uint8_t>(NodeClass::kInnerData);
      return;
    }
    // interior needs d strictly above h_trunc (ties join the data layer) and
    // a full set of covered axis neighbours
    bool interior = d > h_trunc;
    if (interior) {
      const auto mi = g.multi_index(idx);
      for (int a = 0; a < n && interior; ++a) {
        const int ia = mi[static_cast<std::size_t>(a)];
        const std::int64_t st = g.strides_[static_cast<std::size_t>(a)];
        if (ia == 0 || ia == g.res_[static_cast<std::size_t>(a)] - 1) {
          interior = false;
          break;
        }
        if (!covered(idx - st) || !covered(idx + st)) interior = false;
      }
    }
    cls = static_cast<std::uint8_t>(interior ? NodeClass::kInterior : NodeClass::kTruncationData);
  });

  // pass 3: gather index lists and build the cache (sequential, deterministic)
  std::int64_t cached = 0;
  for (std::int64_t idx = 0; idx < g.lattice_size_; ++idx) {
    const NodeClass c = g.node_class(idx);
    if (c == NodeClass::kExterior) continue;
    g.cache_index_[static_cast<std::size_t>(idx)] = static_cast<std::int32_t>(cached++);
    switch (c) {
      case NodeClass::kInterior:
        g.interior_.push_back(idx);
        break;
      case NodeClass::kTruncationData:
        g.truncation_.push_back(idx);
        break;
      case NodeClass::kCollar:
        g.collar_.push_back(idx);
        break;
      case NodeClass::kInnerData:
        g.inner_data_.push_back(idx);
        break;
      default:
        break;
    }
  }
  g.cache_d_.resize(static_cast<std::size_t>(cached));
  g.cache_lap_.resize(static_cast<std::size_t>(cached));
  g.cache_H_.resize(static_cast<std::size_t>(cached));
  g.cache_grad_.resize(static_cast<std::size_t>(cached) * n);
  g.cache_Q_.resize(static_cast<std::size_t>(cached) * n);
  parallel_for(g.lattice_size_, [&](std::int64_t idx) {
    const std::int32_t c = g.cache_index_[static_cast<std::size_t>(idx)];
    if (c < 0) return;
    const DistanceData dd = signed_distance(dom, g.position(idx));
    const std::size_t t = static_cast<std::size_t>(c);
    g.cache_d_[t] = dd.d;
    g.cache_lap_[t] = dd.laplacian_d;
    g.cache_H_[t] = dd.mean_curvature;
    for (int a = 0; a < n; ++a) {
      g.cache_grad_[t * n + a] = dd.grad_d[a];
      g.cache_Q_[t * n + a] = dd.nearest[a];
    }
  });

  if (g.interior_.empty()) {
    std::ostringstream os;
    os << "domain unresolved at this resolution (no interior nodes for h_trunc = " << h_trunc
       << ")";
    throw ArgumentError(os.str());
  }
  return grid;
}

ScalarField make_field(std::shared_ptr<const MaskedGrid> grid, Quantity q) {
  ScalarField f;
  f.grid = std::move(grid);
  f.quantity = q;
  f.values.assign(static_cast<std::size_t>(f.grid->lattice_size()),
                  std::numeric_limits<double>::quiet_NaN());
  return f;
}

double interpolate_field(const ScalarField& field, const Vector& x) {
  const MaskedGrid& g = *field.grid;
  const int n = g.dim();
  std::vector<int> base(static_cast<std::size_t>(n));
  std::vector<double> frac(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) {
    const double t = (x[a] - g.origin()[a]) / g.spacing()[a];
    double f = std::floor(t);
    int i = static_cast<int>(f);
    if (i < 0) {
      i = 0;
      f = 0;
    }
    if (i > g.resolution()[static_cast<std::size_t>(a)] - 2)
      i = g.resolution()[static_cast<std::size_t>(a)] - 2;
    base[static_cast<std::size_t>(a)] = i;
    frac[static_cast<std::size_t>(a)] = t - i;
  }
  const int corners = 1 << n;
  double acc = 0.0;
  for (int c = 0; c < corners; ++c) {
    double wgt = 1.0;
    std::int64_t idx = 0;
    for (int a = 0; a < n; ++a) {
      const int bit = (c >> a) & 1;
      wgt *= bit ? frac[static_cast<std::size_t>(a)] : 1.0 - frac[static_cast<std::size_t>(a)];
      idx += (base[static_cast<std::size_t>(a)] + bit) * g.stride(a);
    }
    const double val = field.values[static_cast<std::size_t>(idx)];
    if (!std::isfinite(val)) throw ArgumentError("interpolate_field: undefined corner value");
    acc += wgt * val;
  }
  return acc;
}

}  // namespace lnr
