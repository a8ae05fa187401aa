#include "pcfcm/penalty.hpp"

#include "pcfcm/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pcfcm {

void PenaltyParams::validate() const {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw ArgumentError("penalty: beta must be positive");
}

void DiffuseParams::validate() const {
  if (!(epsilon > 0.0)) throw ArgumentError("diffuse: epsilon must be positive");
  if (n_sub < 0) throw ArgumentError("diffuse: n_sub must be >= 0");
  if (n_gauss < 1) throw ArgumentError("diffuse: n_gauss must be >= 1");
  tree().validate();
}

void SharpParams::validate() const {
  if (n_query < 0) throw ArgumentError("sharp: n_query must be >= 0");
  if (n_sub < 0) throw ArgumentError("sharp: n_sub must be >= 0");
  if (n_gauss < 1) throw ArgumentError("sharp: n_gauss must be >= 1");
  if (!(l_max > 0.0) || !std::isfinite(l_max)) throw ArgumentError("sharp: l_max must be positive");
  test_grid.validate();
}

double BoundedSegment::kept_length() const {
  double s = 0.0;
  for (const auto& [a, b] : intervals) s += b - a;
  return s;
}

double SharpReconstruction::kept_length() const {
  double s = 0.0;
  for (const BoundedSegment& b : segments) s += b.kept_length();
  return s;
}

namespace {

// Accumulates w N N^T and w N u_hat^T with batched rank updates.
class MassAccumulator {
 public:
  MassAccumulator(int p, int components)
      : basis_(p), nm_(basis_.size()), nc_(components), N_(nm_), R_(nm_, kBatch) {
    out_.K = Eigen::MatrixXd::Zero(nm_, nm_);
    out_.f = Eigen::MatrixXd::Zero(nm_, nc_);
  }

  void add(const Box& cell, const Vec2& x, double w, const FieldFn& u_hat) {
    const Vec2 loc = cell.local(x);
    basis_.eval_values(std::clamp(loc.x(), -1.0, 1.0), std::clamp(loc.y(), -1.0, 1.0), N_);
    R_.col(col_++) = std::sqrt(w) * N_;
    if (col_ == kBatch) flush();
    if (u_hat) {
      const Vec2 u = u_hat(x);
      for (int c = 0; c < nc_; ++c) out_.f.col(c) += (w * u[c]) * N_;
    }
  }

  void count(std::size_t n = 1) { out_.quadrature_points += n; }

  CellPenalty finish(double beta) {
    flush();
    out_.K = out_.K.selfadjointView<Eigen::Lower>();
    out_.K *= beta;
    out_.f *= beta;
    return std::move(out_);
  }

 private:
  static constexpr int kBatch = 128;

  void flush() {
    if (col_ == 0) return;
    out_.K.selfadjointView<Eigen::Lower>().rankUpdate(R_.leftCols(col_));
    col_ = 0;
  }

  TensorBasis basis_;
  int nm_, nc_;
  Eigen::VectorXd N_;
  Eigen::MatrixXd R_;
  int col_ = 0;
  CellPenalty out_;
};

void check_components(int components) {
  if (components != 1 && components != 2) throw ArgumentError("penalty: components must be 1 or 2");
}

void query_recurse(const Box& b, int depth, const PointCloud& cloud, const DistanceParams& dp,
                   const SharpParams& sp, std::set<RegionKey>& keys) {
  if (std::isfinite(dp.r) && d_pca(cloud, b.center(), dp) > b.half_diagonal() + dp.r) return;
  if (depth < sp.n_query) {
    for (int q = 0; q < 4; ++q) query_recurse(b.quadrant(q), depth + 1, cloud, dp, sp, keys);
    return;
  }
  const int mx = sp.test_grid.nx;
  const int my = sp.test_grid.ny;
  const Vec2 step(b.size().x() / mx, b.size().y() / my);
  for (int j = 0; j < my; ++j) {
    for (int i = 0; i < mx; ++i) {
      const Vec2 x(b.lo.x() + (i + 0.5) * step.x(), b.lo.y() + (j + 0.5) * step.y());
      if (std::isfinite(dp.r) && cloud.nearest(x).distance > dp.r) continue;
      keys.insert(region_key(cloud, x, dp.k));
    }
  }
}

void bisect_recurse(const BoundedSegment& seg, const PointCloud& cloud, double t0, double t1,
                    int depth, int n_sub, std::vector<std::pair<double, double>>& out) {
  const double tm = 0.5 * (t0 + t1);
  const int hits = int(region_contains(cloud, seg.point(t0), seg.key)) +
                   int(region_contains(cloud, seg.point(tm), seg.key)) +
                   int(region_contains(cloud, seg.point(t1), seg.key));
  if (hits == 0) return;  // the region is convex and holds the support point
  if (hits == 3 || depth >= n_sub) {
    out.emplace_back(t0, t1);
    return;
  }
  bisect_recurse(seg, cloud, t0, tm, depth + 1, n_sub, out);
  bisect_recurse(seg, cloud, tm, t1, depth + 1, n_sub, out);
}

void integrate_segments(MassAccumulator& acc, const StructuredMesh& mesh, int cell,
                        const PointCloud& cloud, const std::vector<const BoundedSegment*>& segs,
                        const GaussRule& rule, const FieldFn& u_hat, std::vector<Vec2>* contributing) {
  const Box box = mesh.cell_box(cell);
  for (const BoundedSegment* s : segs) {
    for (const auto& [t0, t1] : s->intervals) {
      const double mid = 0.5 * (t0 + t1);
      const double half = 0.5 * (t1 - t0);
      for (int g = 0; g < rule.size(); ++g) {
        const Vec2 x = s->point(mid + half * rule.nodes[g]);
        acc.count();
        if (mesh.cell_of(x) != cell) continue;
        if (!region_contains(cloud, x, s->key)) continue;
        acc.add(box, x, half * rule.weights[g], u_hat);
        if (contributing) contributing->push_back(x);
      }
    }
  }
}

void scatter(const StructuredMesh& mesh, int cell, int components, const CellPenalty& cp,
             std::vector<Eigen::Triplet<double>>& trip, Eigen::VectorXd& f) {
  const std::vector<int> dofs = mesh.cell_dofs(cell);
  const int nm = static_cast<int>(dofs.size());
  const int ns = mesh.scalar_dofs();
  for (int c = 0; c < components; ++c) {
    const int off = c * ns;
    for (int j = 0; j < nm; ++j) {
      f[off + dofs[j]] += cp.f(j, c);
      for (int i = 0; i < nm; ++i) {
        if (cp.K(i, j) != 0.0) trip.emplace_back(off + dofs[i], off + dofs[j], cp.K(i, j));
      }
    }
  }
}

PenaltySystem gather(const StructuredMesh& mesh, int components, std::vector<CellPenalty>& cells) {
  PenaltySystem ps;
  const int n = components * mesh.scalar_dofs();
  ps.f = Eigen::VectorXd::Zero(n);
  std::vector<Eigen::Triplet<double>> trip;
  for (int c = 0; c < mesh.cell_count(); ++c) {
    const CellPenalty& cp = cells[static_cast<std::size_t>(c)];
    ps.quadrature_points += cp.quadrature_points;
    if (cp.K.isZero(0.0) && cp.f.isZero(0.0)) continue;
    scatter(mesh, c, components, cp, trip, ps.f);
  }
  ps.K.resize(n, n);
  ps.K.setFromTriplets(trip.begin(), trip.end());
  ps.K.makeCompressed();
  return ps;
}

}  // namespace

CellPenalty diffuse_penalty_cell(const StructuredMesh& mesh, int cell, int components,
                                 const PointCloud& cloud, const DistanceParams& dparams,
                                 const DiffuseParams& params, const PenaltyParams& penalty) {
  check_components(components);
  dparams.validate(cloud.size());
  params.validate();
  penalty.validate();
  const Box box = mesh.cell_box(cell);
  auto dist = [&](const Vec2& x) { return d_pca(cloud, x, dparams); };
  const SpaceTree tree = build_diffuse_tree(box, dist, params.tree());
  const GaussRule rule = gauss_legendre(params.n_gauss);
  MassAccumulator acc(mesh.degree(), components);
  for_each_tree_point(tree, rule, [&](const Vec2& x, double w, std::size_t) {
    acc.count();
    const double delta = regularized_delta(dist(x), params.epsilon);
    if (delta > 0.0) acc.add(box, x, w * delta, penalty.u_hat);
  });
  return acc.finish(penalty.beta);
}

std::set<RegionKey> identify_contributing_regions(const Box& cell, const PointCloud& cloud,
                                                  const DistanceParams& dparams,
                                                  const SharpParams& params) {
  dparams.validate(cloud.size());
  params.validate();
  std::set<RegionKey> keys;
  query_recurse(cell, 0, cloud, dparams, params, keys);
  return keys;
}

LocalPlane region_plane(const PointCloud& cloud, const RegionKey& key) {
  if (!key.valid_for(cloud)) throw ArgumentError("region_plane: key not valid for this cloud");
  std::vector<Vec2> pts;
  pts.reserve(key.indices().size());
  for (int i : key.indices()) pts.push_back(cloud[static_cast<std::size_t>(i)]);
  return fit_local_plane(pts);
}

BoundedSegment bisect_plane_segments(const LocalPlane& plane, const RegionKey& key,
                                     const PointCloud& cloud, const SharpParams& params) {
  params.validate();
  BoundedSegment seg;
  seg.plane = plane;
  seg.key = key;
  if (!region_contains(cloud, plane.support, key)) {
    seg.support_outside = true;
    return seg;
  }
  const double h = 0.5 * params.l_max;
  bisect_recurse(seg, cloud, -h, h, 0, params.n_sub, seg.intervals);
  return seg;
}

CellPenalty sharp_penalty_cell(const StructuredMesh& mesh, int cell, int components,
                               const PointCloud& cloud, const DistanceParams& dparams,
                               const SharpParams& params, const PenaltyParams& penalty,
                               std::vector<Vec2>* contributing) {
  check_components(components);
  penalty.validate();
  const std::set<RegionKey> keys =
      identify_contributing_regions(mesh.cell_box(cell), cloud, dparams, params);
  std::vector<BoundedSegment> segs;
  segs.reserve(keys.size());
  for (const RegionKey& k : keys) {
    if (k.order() < 2) continue;  // no line through a single point
    segs.push_back(bisect_plane_segments(region_plane(cloud, k), k, cloud, params));
  }
  std::vector<const BoundedSegment*> ptrs;
  for (const BoundedSegment& s : segs) ptrs.push_back(&s);
  MassAccumulator acc(mesh.degree(), components);
  integrate_segments(acc, mesh, cell, cloud, ptrs, gauss_legendre(params.n_gauss), penalty.u_hat,
                     contributing);
  return acc.finish(penalty.beta);
}

CellPenalty reference_segment_penalty(const StructuredMesh& mesh, int cell, int components,
                                      const std::vector<Segment>& segments, int n_gauss,
                                      const PenaltyParams& penalty) {
  check_components(components);
  penalty.validate();
  const GaussRule rule = gauss_legendre(n_gauss);
  const Box box = mesh.cell_box(cell);
  MassAccumulator acc(mesh.degree(), components);
  Segment piece;
  for (const Segment& s : segments) {
    if (!clip_segment(s, box, piece)) continue;
    const Vec2 mid = 0.5 * (piece.a + piece.b);
    const Vec2 half = 0.5 * (piece.b - piece.a);
    const double jac = half.norm();
    for (int g = 0; g < rule.size(); ++g) {
      const Vec2 x = mid + rule.nodes[g] * half;
      acc.count();
      if (mesh.cell_of(x) != cell) continue;
      acc.add(box, x, jac * rule.weights[g], penalty.u_hat);
    }
  }
  return acc.finish(penalty.beta);
}

SharpReconstruction reconstruct_sharp(const StructuredMesh& mesh, const PointCloud& cloud,
                                      const DistanceParams& dparams, const SharpParams& params) {
  dparams.validate(cloud.size());
  params.validate();
  if (dparams.k < 2) throw ArgumentError("sharp interface needs k >= 2");
  const int ncell = mesh.cell_count();
  std::vector<std::set<RegionKey>> per_cell(static_cast<std::size_t>(ncell));
  parallel_for(ncell, [&](int c) {
    per_cell[static_cast<std::size_t>(c)] =
        identify_contributing_regions(mesh.cell_box(c), cloud, dparams, params);
  });
  std::set<RegionKey> all;
  for (const auto& s : per_cell) all.insert(s.begin(), s.end());
  const std::vector<RegionKey> keys(all.begin(), all.end());

  SharpReconstruction rec;
  rec.segments.resize(keys.size());
  parallel_for(static_cast<int>(keys.size()), [&](int i) {
    const RegionKey& k = keys[static_cast<std::size_t>(i)];
    rec.segments[static_cast<std::size_t>(i)] =
        bisect_plane_segments(region_plane(cloud, k), k, cloud, params);
  });
  for (const BoundedSegment& s : rec.segments) rec.warnings += s.support_outside ? 1 : 0;

  // a cell integrates every region it found plus every kept piece reaching into it
  rec.cell_regions.resize(static_cast<std::size_t>(ncell));
  for (int c = 0; c < ncell; ++c) {
    for (const RegionKey& k : per_cell[static_cast<std::size_t>(c)]) {
      const auto it = std::lower_bound(keys.begin(), keys.end(), k);
      rec.cell_regions[static_cast<std::size_t>(c)].push_back(static_cast<int>(it - keys.begin()));
    }
  }
  const Box& dom = mesh.domain();
  auto clamp_in = [&](const Vec2& x) {
    return Vec2(std::clamp(x.x(), dom.lo.x(), dom.hi.x()), std::clamp(x.y(), dom.lo.y(), dom.hi.y()));
  };
  for (std::size_t i = 0; i < rec.segments.size(); ++i) {
    const BoundedSegment& s = rec.segments[i];
    for (std::size_t j = 0; j < s.intervals.size(); ++j) {
      const Segment piece = s.piece(j);
      const Vec2 lo = clamp_in(piece.a.cwiseMin(piece.b));
      const Vec2 hi = clamp_in(piece.a.cwiseMax(piece.b));
      const int c0 = mesh.cell_of(lo);
      const int c1 = mesh.cell_of(hi);
      for (int iy = c0 / mesh.nx(); iy <= c1 / mesh.nx(); ++iy) {
        for (int ix = c0 % mesh.nx(); ix <= c1 % mesh.nx(); ++ix) {
          rec.cell_regions[static_cast<std::size_t>(mesh.cell_index(ix, iy))].push_back(
              static_cast<int>(i));
        }
      }
    }
  }
  for (auto& list : rec.cell_regions) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  return rec;
}

PenaltySystem assemble_diffuse_penalty(const StructuredMesh& mesh, int components,
                                       const PointCloud& cloud, const DistanceParams& dparams,
                                       const DiffuseParams& params, const PenaltyParams& penalty) {
  std::vector<CellPenalty> cells(static_cast<std::size_t>(mesh.cell_count()));
  parallel_for(mesh.cell_count(), [&](int c) {
    cells[static_cast<std::size_t>(c)] =
        diffuse_penalty_cell(mesh, c, components, cloud, dparams, params, penalty);
  });
  return gather(mesh, components, cells);
}

PenaltySystem assemble_sharp_penalty(const StructuredMesh& mesh, int components,
                                     const PointCloud& cloud, const SharpReconstruction& recon,
                                     const SharpParams& params, const PenaltyParams& penalty,
                                     bool collect_points) {
  check_components(components);
  params.validate();
  penalty.validate();
  if (recon.cell_regions.size() != static_cast<std::size_t>(mesh.cell_count())) {
    throw ArgumentError("sharp reconstruction belongs to a different mesh");
  }
  const GaussRule rule = gauss_legendre(params.n_gauss);
  const int ncell = mesh.cell_count();
  std::vector<CellPenalty> cells(static_cast<std::size_t>(ncell));
  std::vector<std::vector<Vec2>> pts(static_cast<std::size_t>(ncell));
  parallel_for(ncell, [&](int c) {
    std::vector<const BoundedSegment*> segs;
    for (int i : recon.cell_regions[static_cast<std::size_t>(c)]) {
      segs.push_back(&recon.segments[static_cast<std::size_t>(i)]);
    }
    MassAccumulator acc(mesh.degree(), components);
    integrate_segments(acc, mesh, c, cloud, segs, rule, penalty.u_hat,
                       collect_points ? &pts[static_cast<std::size_t>(c)] : nullptr);
    cells[static_cast<std::size_t>(c)] = acc.finish(penalty.beta);
  });
  PenaltySystem ps = gather(mesh, components, cells);
  for (auto& v : pts) ps.contributing.insert(ps.contributing.end(), v.begin(), v.end());
  return ps;
}

PenaltySystem assemble_reference_penalty(const StructuredMesh& mesh, int components,
                                         const std::vector<Segment>& segments, int n_gauss,
                                         const PenaltyParams& penalty) {
  std::vector<CellPenalty> cells(static_cast<std::size_t>(mesh.cell_count()));
  parallel_for(mesh.cell_count(), [&](int c) {
    cells[static_cast<std::size_t>(c)] =
        reference_segment_penalty(mesh, c, components, segments, n_gauss, penalty);
  });
  return gather(mesh, components, cells);
}

std::size_t count_diffuse_points(const StructuredMesh& mesh, const PointCloud& cloud,
                                 const DistanceParams& dparams, const DiffuseParams& params) {
  dparams.validate(cloud.size());
  params.validate();
  std::vector<std::size_t> leaves(static_cast<std::size_t>(mesh.cell_count()));
  auto dist = [&](const Vec2& x) { return d_pca(cloud, x, dparams); };
  parallel_for(mesh.cell_count(), [&](int c) {
    leaves[static_cast<std::size_t>(c)] =
        build_diffuse_tree(mesh.cell_box(c), dist, params.tree()).leaves.size();
  });
  std::size_t total = 0;
  for (std::size_t n : leaves) total += n;
  return total * static_cast<std::size_t>(params.n_gauss) * static_cast<std::size_t>(params.n_gauss);
}

GlobalSystem add_penalty(const GlobalSystem& volume, const PenaltySystem& penalty, double scale) {
  if (penalty.f.size() != volume.f.size()) throw ArgumentError("penalty/volume size mismatch");
  GlobalSystem s = volume;
  s.K = volume.K + scale * penalty.K;
  s.K.makeCompressed();
  s.f = volume.f + scale * penalty.f;
  return s;
}

}  // namespace pcfcm
