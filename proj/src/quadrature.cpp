#include "pcfcm/quadrature.hpp"

#include <string>

namespace pcfcm {

double SpaceTree::leaf_area() const {
  double a = 0.0;
  for (const TreeLeaf& l : leaves) a += l.box.area();
  return a;
}

namespace {

bool is_cut(const Box& b, const std::function<bool(const Vec2&)>& inside) {
  bool first = false;
  for (int j = 0; j < 3; ++j) {
    for (int i = 0; i < 3; ++i) {
      const bool v = inside(b.map(i - 1.0, j - 1.0));
      if (i == 0 && j == 0) {
        first = v;
      } else if (v != first) {
        return true;
      }
    }
  }
  return false;
}

void alpha_recurse(const Box& b, int depth, int max_depth,
                   const std::function<bool(const Vec2&)>& inside, std::vector<TreeLeaf>& out) {
  if (depth < max_depth && is_cut(b, inside)) {
    for (int q = 0; q < 4; ++q) alpha_recurse(b.quadrant(q), depth + 1, max_depth, inside, out);
    return;
  }
  out.push_back({b, depth});
}

void diffuse_recurse(const Box& b, int depth, const std::function<double(const Vec2&)>& dist,
                     const DiffuseTreeParams& p, std::vector<TreeLeaf>& out) {
  bool refine = false;
  if (depth < p.n_sub) {
    const int m = p.test_points;
    const double reach =
        p.guard ? p.epsilon + 0.5 * b.size().norm() / (m - 1) : -std::numeric_limits<double>::infinity();
    for (int j = 0; j < m && !refine; ++j) {
      for (int i = 0; i < m && !refine; ++i) {
        const double xi = -1.0 + 2.0 * i / (m - 1);
        const double eta = -1.0 + 2.0 * j / (m - 1);
        const double d = dist(b.map(xi, eta));
        refine = d <= reach || regularized_delta(d, p.epsilon) > p.eps_d;
      }
    }
  }
  if (refine) {
    for (int q = 0; q < 4; ++q) diffuse_recurse(b.quadrant(q), depth + 1, dist, p, out);
    return;
  }
  out.push_back({b, depth});
}

}  // namespace

SpaceTree build_alpha_tree(const Box& cell, const std::function<bool(const Vec2&)>& inside,
                           int depth) {
  if (depth < 0) throw ArgumentError("build_alpha_tree: depth must be >= 0");
  SpaceTree t;
  t.root = cell;
  t.max_depth = depth;
  alpha_recurse(cell, 0, depth, inside, t.leaves);
  return t;
}

void DiffuseTreeParams::validate() const {
  if (!(epsilon > 0.0)) throw ArgumentError("diffuse tree: epsilon must be positive");
  if (n_sub < 0) throw ArgumentError("diffuse tree: n_sub must be >= 0");
  if (test_points < 2) throw ArgumentError("diffuse tree: need >= 2 test points per direction");
  if (!(eps_d >= 0.0)) throw ArgumentError("diffuse tree: eps_d must be >= 0");
}

SpaceTree build_diffuse_tree(const Box& cell, const std::function<double(const Vec2&)>& dist,
                             const DiffuseTreeParams& params) {
  params.validate();
  SpaceTree t;
  t.root = cell;
  t.max_depth = params.n_sub;
  diffuse_recurse(cell, 0, dist, params, t.leaves);
  return t;
}

double integrate_over_tree(const SpaceTree& tree, const std::function<double(const Vec2&)>& f,
                           const GaussRule& rule) {
  double sum = 0.0;
  for_each_tree_point(tree, rule, [&](const Vec2& x, double w, std::size_t leaf) {
    const double v = f(x);
    if (!std::isfinite(v)) {
      throw IntegrationError("non-finite integrand in leaf " + std::to_string(leaf) + " at (" +
                             std::to_string(x.x()) + ", " + std::to_string(x.y()) + ")");
    }
    sum += v * w;
  });
  return sum;
}

}  // namespace pcfcm
