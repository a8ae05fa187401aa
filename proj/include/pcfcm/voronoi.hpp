#pragma once

#include "pcfcm/geometry.hpp"
#include "pcfcm/point_cloud.hpp"

#include <compare>
#include <set>
#include <string>
#include <vector>

namespace pcfcm {

/// Implicit handle of an order-k Voronoi region: the ascending indices of the
/// k points shared as nearest neighbors by every point of the region.
class RegionKey {
 public:
  RegionKey() = default;
  /// Takes any index list; sorts it and checks for duplicates.
  explicit RegionKey(std::vector<int> indices);

  [[nodiscard]] const std::vector<int>& indices() const { return idx_; }
  [[nodiscard]] int order() const { return static_cast<int>(idx_.size()); }
  [[nodiscard]] bool valid_for(const PointCloud& cloud) const;

  /// "i-j-k" form used in CSV dumps.
  [[nodiscard]] std::string str() const;

  auto operator<=>(const RegionKey&) const = default;

 private:
  std::vector<int> idx_;
};

/// Test points per direction on one query subcell. Points sit at the
/// centers of an m x m split of the subcell.
struct RegionSampleGrid {
  int nx = 3;
  int ny = 3;
  void validate() const;
};

RegionKey region_key(const PointCloud& cloud, const Vec2& x, int k);

/// True iff x lies in the region of `key` (index tie-break makes regions
/// half-open along bisectors).
bool region_contains(const PointCloud& cloud, const Vec2& x, const RegionKey& key);

/// Keys seen on a resolution x resolution grid of cell-centered samples.
std::set<RegionKey> brute_force_regions_in_box(const PointCloud& cloud, int k, const Box& box,
                                               int resolution);

}  // namespace pcfcm
