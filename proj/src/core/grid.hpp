#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "geometry.hpp"

namespace lnr {

enum class NodeClass : std::uint8_t {
  kExterior = 0,        // outside the truncated domain (or untouched deep zone)
  kInterior = 1,        // unknown of the Dirichlet problem
  kTruncationData = 2,  // Dirichlet layer along {d = h_trunc}
  kCollar = 3,          // inside the domain with 0 < d < h_trunc (data extension zone)
  kInnerData = 4,       // Dirichlet layer of a depth-limited grid (values from a coarse field)
};

/// Cell-centered masked lattice over the domain bounding box. Node (i_0 ...)
/// sits at lo + (i + 1/2) * spacing per axis. Nodes carry a class and, where
/// non-exterior, cached distance data.
///
/// Classification: nodes outside the closure of the domain are exterior;
/// inside, d < h_trunc is collar, d = h_trunc lands on the truncation layer,
/// and a node with d > h_trunc is interior exactly when every axis neighbour
/// has d >= h_trunc (otherwise it joins the truncation layer). A finite
/// depth_limit turns nodes with d > depth_limit into inner-data nodes, so a
/// boundary collar can be re-solved against coarse interior values.
class MaskedGrid {
 public:
  int dim() const { return dim_; }
  const DomainDescriptor& domain() const { return dom_; }
  const std::vector<int>& resolution() const { return res_; }
  const Vector& origin() const { return origin_; }
  const Vector& spacing() const { return spacing_; }
  double max_spacing() const { return max_spacing_; }
  double h_trunc() const { return h_trunc_; }
  double depth_limit() const { return depth_limit_; }

  std::int64_t lattice_size() const { return lattice_size_; }
  std::int64_t stride(int axis) const { return strides_[static_cast<std::size_t>(axis)]; }

  NodeClass node_class(std::int64_t idx) const {
    return static_cast<NodeClass>(classes_[static_cast<std::size_t>(idx)]);
  }
  bool has_distance(std::int64_t idx) const {
    return cache_index_[static_cast<std::size_t>(idx)] >= 0;
  }
  /// Distance data cached at non-exterior nodes.
  DistanceData distance(std::int64_t idx) const;
  double d_at(std::int64_t idx) const {
    return cache_d_[static_cast<std::size_t>(cache_index_[static_cast<std::size_t>(idx)])];
  }

  Vector position(std::int64_t idx) const;
  std::vector<int> multi_index(std::int64_t idx) const;

  const std::vector<std::int64_t>& interior_nodes() const { return interior_; }
  const std::vector<std::int64_t>& truncation_nodes() const { return truncation_; }
  const std::vector<std::int64_t>& collar_nodes() const { return collar_; }
  const std::vector<std::int64_t>& inner_data_nodes() const { return inner_data_; }

  std::int64_t count(NodeClass c) const;

 private:
  friend std::shared_ptr<MaskedGrid> build_masked_grid(const DomainDescriptor&,
                                                       const std::vector<int>&, double, double);
  DomainDescriptor dom_;
  int dim_ = 0;
  std::vector<int> res_;
  Vector origin_, spacing_;
  double max_spacing_ = 0.0;
  double h_trunc_ = 0.0;
  double depth_limit_ = 0.0;
  std::int64_t lattice_size_ = 0;
  std::vector<std::int64_t> strides_;

  std::vector<std::uint8_t> classes_;
  std::vector<std::int32_t> cache_index_;
  // struct-of-arrays distance cache
  std::vector<double> cache_d_, cache_lap_, cache_H_;
  std::vector<double> cache_grad_, cache_Q_;  // dim_ entries per cached node

  std::vector<std::int64_t> interior_, truncation_, collar_, inner_data_;
};

/// Builds the masked grid. resolution is the cell count per axis (>= 17);
/// h_trunc must satisfy 0 < h_trunc < r0/4. depth_limit (default infinite)
/// keeps only the band {d <= depth_limit} active.
std::shared_ptr<MaskedGrid> build_masked_grid(
    const DomainDescriptor& dom, const std::vector<int>& resolution, double h_trunc,
    double depth_limit = std::numeric_limits<double>::infinity());

enum class Quantity { kU, kV, kW, kResidual };

/// Values on a masked grid, one per lattice node, NaN where undefined.
struct ScalarField {
  std::shared_ptr<const MaskedGrid> grid;
  Quantity quantity = Quantity::kU;
  std::vector<double> values;

  double operator[](std::int64_t idx) const { return values[static_cast<std::size_t>(idx)]; }
  double& operator[](std::int64_t idx) { return values[static_cast<std::size_t>(idx)]; }
};

ScalarField make_field(std::shared_ptr<const MaskedGrid> grid, Quantity q);

/// Multilinear interpolation of a field at a point; all surrounding lattice
/// nodes must carry finite values.
double interpolate_field(const ScalarField& field, const Vector& x);

}  // namespace lnr
