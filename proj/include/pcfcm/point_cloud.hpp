#pragma once

#include "pcfcm/geometry.hpp"

#include <cstddef>
#include <istream>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace pcfcm {

struct Neighbor {
  int index = -1;
  double distance = 0.0;
};

/// Boundary sample points plus a static 2d-tree over them.
///
/// Points keep the order they were given in, so index i always refers to the
/// i-th input point. Exact duplicates are rejected on construction. The tree
/// returns the same neighbor lists as a linear scan, including ties, which
/// are broken by ascending index.
class PointCloud {
 public:
  PointCloud() = default;
  explicit PointCloud(std::vector<Vec2> points);

  [[nodiscard]] std::size_t size() const { return points_.size(); }
  [[nodiscard]] const Vec2& operator[](std::size_t i) const { return points_[i]; }
  [[nodiscard]] const std::vector<Vec2>& points() const { return points_; }

  /// k nearest neighbors sorted by (distance, index).
  [[nodiscard]] std::vector<Neighbor> knn(const Vec2& x, int k) const;

  /// Allocation-free variant; `out` must hold at least k entries and
  /// receives them sorted. Squared distances are written to `out[i].distance`
  /// only if `squared` is set, otherwise plain distances.
  void knn_into(const Vec2& x, int k, std::span<Neighbor> out, bool squared = false) const;

  /// Only the nearest neighbor.
  [[nodiscard]] Neighbor nearest(const Vec2& x) const;

  [[nodiscard]] Box bounding_box() const;

 private:
  struct Node {
    int begin = 0;   // range into order_
    int end = 0;
    int left = -1;   // child nodes, -1 for a leaf
    int right = -1;
    int axis = 0;
    double split = 0.0;
  };

  int build(int begin, int end, int depth);

  std::vector<Vec2> points_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
};

/// Result of parsing a point-cloud text stream.
struct LoadedCloud {
  PointCloud cloud;
  std::size_t ignored_rows = 0;  // comment and blank lines
};

/// Parses one point per row, first two whitespace-separated columns x y.
/// Further columns are ignored; '#' starts a comment line.
LoadedCloud load_point_cloud(std::istream& in);
LoadedCloud load_point_cloud_file(const std::string& path);

/// Free-function form of PointCloud::knn with range checking.
std::vector<Neighbor> knn_query(const PointCloud& cloud, const Vec2& x, int k);

struct DistanceParams {
  int k = 4;
  double r = std::numeric_limits<double>::infinity();

  void validate(std::size_t cloud_size) const;
};

/// Least-squares line through a small point set.
struct LocalPlane {
  Vec2 support = Vec2::Zero();
  Vec2 normal = Vec2::UnitY();
  bool degenerate = false;  // isotropic covariance, normal is arbitrary

  [[nodiscard]] Vec2 tangent() const { return {normal.y(), -normal.x()}; }
  [[nodiscard]] double signed_distance(const Vec2& x) const { return normal.dot(x - support); }
};

/// Centroid and smallest-eigenvalue eigenvector of the scatter matrix.
/// Normal sign: first nonzero component positive.
LocalPlane fit_local_plane(std::span<const Vec2> pts);

/// Unsigned distance to the locally fitted boundary line, falling back to
/// the nearest-neighbor distance beyond radius r.
double d_pca(const PointCloud& cloud, const Vec2& x, const DistanceParams& params);

}  // namespace pcfcm
