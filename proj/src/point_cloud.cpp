#include "pcfcm/point_cloud.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace pcfcm {

namespace {

constexpr int kLeafSize = 8;

// Fixed-capacity list kept sorted by (squared distance, index).
struct Candidates {
  std::span<Neighbor> slots;
  int count = 0;

  [[nodiscard]] bool full() const { return count == static_cast<int>(slots.size()); }
  [[nodiscard]] double worst() const { return slots[count - 1].distance; }

  void offer(int index, double d2) {
    const auto cap = static_cast<int>(slots.size());
    if (full()) {
      const Neighbor& w = slots[cap - 1];
      if (d2 > w.distance || (d2 == w.distance && index > w.index)) return;
    }
    int pos = full() ? cap - 1 : count++;
    while (pos > 0) {
      const Neighbor& prev = slots[pos - 1];
      if (prev.distance < d2 || (prev.distance == d2 && prev.index < index)) break;
      slots[pos] = prev;
      --pos;
    }
    slots[pos] = {index, d2};
  }
};

inline double squared_distance(const Vec2& a, const Vec2& b) {
  const double dx = a.x() - b.x();
  const double dy = a.y() - b.y();
  return dx * dx + dy * dy;
}

}  // namespace

PointCloud::PointCloud(std::vector<Vec2> points) : points_(std::move(points)) {
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), 0);

  // duplicate check on a sorted copy of the indices
  std::vector<int> sorted = order_;
  std::sort(sorted.begin(), sorted.end(), [&](int a, int b) {
    const Vec2& pa = points_[a];
    const Vec2& pb = points_[b];
    return pa.x() < pb.x() || (pa.x() == pb.x() && pa.y() < pb.y());
  });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (points_[sorted[i]] == points_[sorted[i - 1]]) {
      throw ParseError("duplicate point: indices " + std::to_string(sorted[i - 1]) + " and " +
                       std::to_string(sorted[i]));
    }
  }
  for (const Vec2& p : points_) {
    if (!p.allFinite()) throw ParseError("non-finite point coordinate");
  }

  if (!points_.empty()) {
    nodes_.reserve(2 * points_.size() / kLeafSize + 2);
    build(0, static_cast<int>(points_.size()), 0);
  }
}

int PointCloud::build(int begin, int end, int depth) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back({begin, end, -1, -1, 0, 0.0});
  if (end - begin <= kLeafSize) return id;

  // split along the axis of larger spread
  double lo[2] = {points_[order_[begin]].x(), points_[order_[begin]].y()};
  double hi[2] = {lo[0], lo[1]};
  for (int i = begin; i < end; ++i) {
    const Vec2& p = points_[order_[i]];
    for (int a = 0; a < 2; ++a) {
      lo[a] = std::min(lo[a], p[a]);
      hi[a] = std::max(hi[a], p[a]);
    }
  }
  const int axis = (hi[0] - lo[0] >= hi[1] - lo[1]) ? 0 : 1;
  const int mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](int a, int b) { return points_[a][axis] < points_[b][axis]; });
  const double split = points_[order_[mid]][axis];

  const int left = build(begin, mid, depth + 1);
  const int right = build(mid, end, depth + 1);
  Node& n = nodes_[id];
  n.left = left;
  n.right = right;
  n.axis = axis;
  n.split = split;
  return id;
}

void PointCloud::knn_into(const Vec2& x, int k, std::span<Neighbor> out, bool squared) const {
  if (k < 1 || static_cast<std::size_t>(k) > points_.size()) {
    throw ArgumentError("knn: k=" + std::to_string(k) + " outside [1, " +
                        std::to_string(points_.size()) + "]");
  }
  Candidates cand{out.first(static_cast<std::size_t>(k)), 0};

  // explicit stack; entries carry the lower bound on squared distance
  std::array<std::pair<int, double>, 128> stack{};
  int top = 0;
  stack[top++] = {0, 0.0};
  while (top > 0) {
    const auto [id, bound] = stack[--top];
    if (cand.full() && bound > cand.worst()) continue;
    const Node& n = nodes_[id];
    if (n.left < 0) {
      for (int i = n.begin; i < n.end; ++i) {
        const int idx = order_[i];
        cand.offer(idx, squared_distance(x, points_[idx]));
      }
      continue;
    }
    const double diff = x[n.axis] - n.split;
    const int near = diff < 0.0 ? n.left : n.right;
    const int far = diff < 0.0 ? n.right : n.left;
    stack[top++] = {far, std::max(bound, diff * diff)};
    stack[top++] = {near, bound};
  }
  if (!squared) {
    for (int i = 0; i < k; ++i) out[i].distance = std::sqrt(out[i].distance);
  }
}

std::vector<Neighbor> PointCloud::knn(const Vec2& x, int k) const {
  if (k < 1 || static_cast<std::size_t>(k) > points_.size()) {
    throw ArgumentError("knn: k=" + std::to_string(k) + " outside [1, " +
                        std::to_string(points_.size()) + "]");
  }
  std::vector<Neighbor> out(static_cast<std::size_t>(k));
  knn_into(x, k, out);
  return out;
}

Neighbor PointCloud::nearest(const Vec2& x) const {
  Neighbor n;
  knn_into(x, 1, std::span<Neighbor>(&n, 1));
  return n;
}

Box PointCloud::bounding_box() const {
  if (points_.empty()) return {};
  Box b(points_[0], points_[0]);
  for (const Vec2& p : points_) {
    b.lo = b.lo.cwiseMin(p);
    b.hi = b.hi.cwiseMax(p);
  }
  return b;
}

LoadedCloud load_point_cloud(std::istream& in) {
  std::vector<Vec2> pts;
  std::size_t ignored = 0;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') {
      ++ignored;
      continue;
    }
    std::istringstream fields(line);
    std::string tok[2];
    double v[2];
    for (int c = 0; c < 2; ++c) {
      if (!(fields >> tok[c])) {
        throw ParseError("row " + std::to_string(row) + ": expected at least 2 numeric fields");
      }
      try {
        std::size_t used = 0;
        v[c] = std::stod(tok[c], &used);
        if (used != tok[c].size()) throw std::invalid_argument(tok[c]);
      } catch (const std::exception&) {
        throw ParseError("row " + std::to_string(row) + ": malformed number '" + tok[c] + "'");
      }
    }
    pts.emplace_back(v[0], v[1]);
  }
  if (pts.size() < 2) throw ParseError("degenerate cloud: fewer than 2 data rows");
  return {PointCloud(std::move(pts)), ignored};
}

LoadedCloud load_point_cloud_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open point cloud '" + path + "'");
  return load_point_cloud(f);
}

std::vector<Neighbor> knn_query(const PointCloud& cloud, const Vec2& x, int k) {
  return cloud.knn(x, k);
}

void DistanceParams::validate(std::size_t cloud_size) const {
  if (k < 1) throw ArgumentError("k must be >= 1");
  if (static_cast<std::size_t>(k) > cloud_size) {
    throw ArgumentError("k=" + std::to_string(k) + " exceeds cloud size " +
                        std::to_string(cloud_size));
  }
  if (!(r > 0.0)) throw ArgumentError("r must be positive");
}

LocalPlane fit_local_plane(std::span<const Vec2> pts) {
  if (pts.size() < 2) throw DegenerateGeometry("plane fit needs at least 2 points");
  Vec2 c = Vec2::Zero();
  for (const Vec2& p : pts) c += p;
  c /= static_cast<double>(pts.size());

  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const Vec2& p : pts) {
    const Vec2 d = p - c;
    sxx += d.x() * d.x();
    sxy += d.x() * d.y();
    syy += d.y() * d.y();
  }
  const double trace = sxx + syy;
  if (trace == 0.0) throw DegenerateGeometry("plane fit: all points identical");

  LocalPlane plane;
  plane.support = c;
  const double half_gap = std::hypot(0.5 * (sxx - syy), sxy);
  if (half_gap <= 1e-12 * trace) {
    plane.degenerate = true;
    plane.normal = Vec2::UnitX();
    return plane;
  }

  Vec2 n;
  if (sxy == 0.0) {
    n = sxx < syy ? Vec2::UnitX() : Vec2::UnitY();
  } else {
    const double lmin = 0.5 * trace - half_gap;
    // two algebraically equivalent eigenvector forms; keep the better conditioned one
    const Vec2 v1(sxy, lmin - sxx);
    const Vec2 v2(lmin - syy, sxy);
    n = v1.squaredNorm() >= v2.squaredNorm() ? v1 : v2;
    n.normalize();
  }
  if (n.x() < 0.0 || (n.x() == 0.0 && n.y() < 0.0)) n = -n;
  plane.normal = n;
  return plane;
}

double d_pca(const PointCloud& cloud, const Vec2& x, const DistanceParams& params) {
  constexpr int kMaxK = 64;
  if (params.k < 1 || params.k > kMaxK || static_cast<std::size_t>(params.k) > cloud.size()) {
    throw ArgumentError("d_pca: k out of range");
  }
  std::array<Neighbor, kMaxK> nb;
  cloud.knn_into(x, params.k, std::span<Neighbor>(nb.data(), nb.size()));
  if (nb[0].distance > params.r || params.k == 1) return nb[0].distance;

  std::array<Vec2, kMaxK> pts;
  for (int i = 0; i < params.k; ++i) pts[i] = cloud[nb[i].index];
  const LocalPlane plane =
      fit_local_plane(std::span<const Vec2>(pts.data(), static_cast<std::size_t>(params.k)));
  if (plane.degenerate) {
    throw DegenerateGeometry("d_pca: isotropic neighborhood, local plane undefined");
  }
  return std::abs(plane.signed_distance(x));
}

}  // namespace pcfcm
