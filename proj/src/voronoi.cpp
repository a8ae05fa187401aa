#include "pcfcm/voronoi.hpp"

#include <algorithm>
#include <array>

namespace pcfcm {

namespace {
constexpr int kMaxOrder = 64;
}

RegionKey::RegionKey(std::vector<int> indices) : idx_(std::move(indices)) {
  std::sort(idx_.begin(), idx_.end());
  if (std::adjacent_find(idx_.begin(), idx_.end()) != idx_.end()) {
    throw ArgumentError("region key with repeated index");
  }
}

bool RegionKey::valid_for(const PointCloud& cloud) const {
  if (idx_.empty()) return false;
  return idx_.front() >= 0 && static_cast<std::size_t>(idx_.back()) < cloud.size();
}

std::string RegionKey::str() const {
  std::string s;
  for (std::size_t i = 0; i < idx_.size(); ++i) {
    if (i) s += '-';
    s += std::to_string(idx_[i]);
  }
  return s;
}

void RegionSampleGrid::validate() const {
  if (nx < 2 || ny < 2) throw ArgumentError("region sample grid needs >= 2 points per direction");
}

RegionKey region_key(const PointCloud& cloud, const Vec2& x, int k) {
  if (k < 1 || k > kMaxOrder || static_cast<std::size_t>(k) > cloud.size()) {
    throw ArgumentError("region_key: k out of range");
  }
  std::array<Neighbor, kMaxOrder> nb;
  cloud.knn_into(x, k, std::span<Neighbor>(nb.data(), nb.size()), true);
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[i] = nb[i].index;
  return RegionKey(std::move(idx));
}

bool region_contains(const PointCloud& cloud, const Vec2& x, const RegionKey& key) {
  const int k = key.order();
  if (k < 1 || k > kMaxOrder || !key.valid_for(cloud) || static_cast<std::size_t>(k) > cloud.size()) {
    throw ArgumentError("region_contains: key not valid for this cloud");
  }
  std::array<Neighbor, kMaxOrder> nb;
  cloud.knn_into(x, k, std::span<Neighbor>(nb.data(), nb.size()), true);
  std::array<int, kMaxOrder> idx;
  for (int i = 0; i < k; ++i) idx[i] = nb[i].index;
  std::sort(idx.begin(), idx.begin() + k);
  return std::equal(idx.begin(), idx.begin() + k, key.indices().begin());
}

std::set<RegionKey> brute_force_regions_in_box(const PointCloud& cloud, int k, const Box& box,
                                               int resolution) {
  if (resolution < 2) throw ArgumentError("resolution must be >= 2");
  if (k < 1 || k > kMaxOrder || static_cast<std::size_t>(k) > cloud.size()) {
    throw ArgumentError("brute_force_regions_in_box: k out of range");
  }
  std::set<RegionKey> keys;
  std::vector<int> last;
  std::array<Neighbor, kMaxOrder> nb;
  std::vector<int> idx(static_cast<std::size_t>(k));
  const Vec2 step = box.size() / static_cast<double>(resolution);
  for (int j = 0; j < resolution; ++j) {
    for (int i = 0; i < resolution; ++i) {
      const Vec2 x(box.lo.x() + (i + 0.5) * step.x(), box.lo.y() + (j + 0.5) * step.y());
      cloud.knn_into(x, k, std::span<Neighbor>(nb.data(), nb.size()), true);
      for (int a = 0; a < k; ++a) idx[a] = nb[a].index;
      std::sort(idx.begin(), idx.end());
      if (idx == last) continue;  // neighbors along a row mostly share a region
      last = idx;
      keys.insert(RegionKey(idx));
    }
  }
  return keys;
}

}  // namespace pcfcm
