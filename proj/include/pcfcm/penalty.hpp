#pragma once

#include "pcfcm/fcm.hpp"
#include "pcfcm/point_cloud.hpp"
#include "pcfcm/quadrature.hpp"
#include "pcfcm/voronoi.hpp"

#include <cstddef>
#include <set>
#include <utility>
#include <vector>

namespace pcfcm {

/// beta * (u - u_hat, w) on the Dirichlet boundary. An empty u_hat means zero.
struct PenaltyParams {
  double beta = 1.0;
  FieldFn u_hat;

  void validate() const;
};

struct DiffuseParams {
  double epsilon = 5e-3;
  int n_sub = 7;
  int n_gauss = 10;
  int test_points = 5;
  double eps_d = 1e-5;
  bool guard = true;

  void validate() const;
  [[nodiscard]] DiffuseTreeParams tree() const { return {epsilon, n_sub, test_points, eps_d, guard}; }
};

struct SharpParams {
  int n_query = 12;
  int n_sub = 3;
  int n_gauss = 11;
  double l_max = 3e-4;
  RegionSampleGrid test_grid;

  void validate() const;
};

/// Piece of the local plane of one region, kept by the bisection. Intervals
/// are parameters t of support + t * tangent.
struct BoundedSegment {
  LocalPlane plane;
  RegionKey key;
  std::vector<std::pair<double, double>> intervals;
  bool support_outside = false;  // support point missed its own region; nothing kept

  [[nodiscard]] Vec2 point(double t) const { return plane.support + t * plane.tangent(); }
  [[nodiscard]] Segment piece(std::size_t i) const {
    return {point(intervals[i].first), point(intervals[i].second)};
  }
  [[nodiscard]] double kept_length() const;
};

/// Penalty contribution of one cell. K is the scalar block (modes x modes);
/// vector problems repeat it per component. f has one column per component.
struct CellPenalty {
  Eigen::MatrixXd K;
  Eigen::MatrixXd f;
  std::size_t quadrature_points = 0;  // points evaluated
};

/// Diffuse-interface term: the boundary integral replaced by a volume
/// integral of the regularized delta of d_pca over the cell's delta tree.
CellPenalty diffuse_penalty_cell(const StructuredMesh& mesh, int cell, int components,
                                 const PointCloud& cloud, const DistanceParams& dparams,
                                 const DiffuseParams& params, const PenaltyParams& penalty);

/// Keys of the order-k regions found on the test grids of the query tree
/// over `cell`. Subcells with d_pca(center) > half-diagonal + r are dropped;
/// test points farther than r from the cloud are ignored.
std::set<RegionKey> identify_contributing_regions(const Box& cell, const PointCloud& cloud,
                                                  const DistanceParams& dparams,
                                                  const SharpParams& params);

/// Plane fitted to the points of a key.
LocalPlane region_plane(const PointCloud& cloud, const RegionKey& key);

/// Bisects the l_max segment through the plane's support point against the
/// region of `key`.
BoundedSegment bisect_plane_segments(const LocalPlane& plane, const RegionKey& key,
                                     const PointCloud& cloud, const SharpParams& params);

/// Sharp-interface term of one cell. `contributing`, if given, receives the
/// quadrature points that passed both membership checks.
CellPenalty sharp_penalty_cell(const StructuredMesh& mesh, int cell, int components,
                               const PointCloud& cloud, const DistanceParams& dparams,
                               const SharpParams& params, const PenaltyParams& penalty,
                               std::vector<Vec2>* contributing = nullptr);

/// Exact-geometry term over an explicit polyline, clipped to the cell.
CellPenalty reference_segment_penalty(const StructuredMesh& mesh, int cell, int components,
                                      const std::vector<Segment>& segments, int n_gauss,
                                      const PenaltyParams& penalty);

/// Sharp boundary of a whole mesh: every key found by any cell, bisected once.
struct SharpReconstruction {
  std::vector<BoundedSegment> segments;        // sorted by key
  std::vector<std::vector<int>> cell_regions;  // per cell, indices into segments
  std::size_t warnings = 0;                    // support-outside-region cases

  [[nodiscard]] double kept_length() const;
};

SharpReconstruction reconstruct_sharp(const StructuredMesh& mesh, const PointCloud& cloud,
                                      const DistanceParams& dparams, const SharpParams& params);

/// Global penalty matrix and vector over all component blocks.
struct PenaltySystem {
  SparseMatrix K;
  Eigen::VectorXd f;
  std::size_t quadrature_points = 0;
  std::vector<Vec2> contributing;  // sharp only, if requested
};

PenaltySystem assemble_diffuse_penalty(const StructuredMesh& mesh, int components,
                                       const PointCloud& cloud, const DistanceParams& dparams,
                                       const DiffuseParams& params, const PenaltyParams& penalty);

PenaltySystem assemble_sharp_penalty(const StructuredMesh& mesh, int components,
                                     const PointCloud& cloud, const SharpReconstruction& recon,
                                     const SharpParams& params, const PenaltyParams& penalty,
                                     bool collect_points = false);

PenaltySystem assemble_reference_penalty(const StructuredMesh& mesh, int components,
                                         const std::vector<Segment>& segments, int n_gauss,
                                         const PenaltyParams& penalty);

/// Quadrature points the diffuse assembly would evaluate, from the trees alone.
std::size_t count_diffuse_points(const StructuredMesh& mesh, const PointCloud& cloud,
                                 const DistanceParams& dparams, const DiffuseParams& params);

/// volume + scale * penalty, keeping the volume system's fixed dofs.
GlobalSystem add_penalty(const GlobalSystem& volume, const PenaltySystem& penalty, double scale = 1.0);

}  // namespace pcfcm
