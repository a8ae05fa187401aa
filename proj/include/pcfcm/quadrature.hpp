#pragma once

#include "pcfcm/geometry.hpp"

#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

namespace pcfcm {

/// One-dimensional quadrature rule on [-1, 1].
template <typename Scalar>
struct QuadratureRule1D {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> nodes;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> weights;

  [[nodiscard]] int size() const { return static_cast<int>(nodes.size()); }
};

using GaussRule = QuadratureRule1D<double>;

/// Legendre polynomial P_n and its derivative at x by the three-term recurrence.
template <typename Scalar>
void legendre_with_derivative(int n, Scalar x, Scalar& p, Scalar& dp) {
  Scalar p0 = 1;
  Scalar p1 = x;
  if (n == 0) {
    p = p0;
    dp = 0;
    return;
  }
  for (int k = 2; k <= n; ++k) {
    const Scalar pk = (Scalar(2 * k - 1) * x * p1 - Scalar(k - 1) * p0) / Scalar(k);
    p0 = p1;
    p1 = pk;
  }
  p = p1;
  // P'_n = n (x P_n - P_{n-1}) / (x^2 - 1); nodes never sit at +-1
  dp = Scalar(n) * (x * p1 - p0) / (x * x - Scalar(1));
}

/// n-point Gauss-Legendre rule by Newton iteration from Chebyshev-type
/// starting values. Nodes are mirrored so the rule is exactly symmetric.
template <typename Scalar = double>
QuadratureRule1D<Scalar> gauss_legendre(int n) {
  if (n < 1) throw ArgumentError("gauss_legendre: n must be >= 1");
  QuadratureRule1D<Scalar> rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int half = n / 2;
  for (int i = 0; i < half; ++i) {
    using std::abs;
    using std::cos;
    Scalar x = cos(std::numbers::pi_v<Scalar> * (Scalar(i) + Scalar(0.75)) / (Scalar(n) + Scalar(0.5)));
    Scalar p, dp;
    for (int it = 0; it < 100; ++it) {
      legendre_with_derivative(n, x, p, dp);
      const Scalar dx = p / dp;
      x -= dx;
      if (abs(dx) <= Scalar(4) * std::numeric_limits<Scalar>::epsilon() * abs(x)) break;
    }
    legendre_with_derivative(n, x, p, dp);
    const Scalar w = Scalar(2) / ((Scalar(1) - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) {
    Scalar p, dp;
    legendre_with_derivative(n, Scalar(0), p, dp);
    rule.nodes[half] = 0;
    rule.weights[half] = Scalar(2) / (dp * dp);
  }
  return rule;
}

/// Smoothed Dirac density of half-width eps (raised cosine).
template <typename Scalar>
Scalar regularized_delta(Scalar t, Scalar eps) {
  using std::abs;
  using std::cos;
  if (!(eps > Scalar(0))) throw ArgumentError("regularized_delta: eps must be positive");
  if (abs(t) > eps) return Scalar(0);
  return (Scalar(1) + cos(std::numbers::pi_v<Scalar> * t / eps)) / (Scalar(2) * eps);
}

struct TreeLeaf {
  Box box;
  int depth = 0;
};

/// Quadtree partition of one root rectangle; only the leaves are stored.
struct SpaceTree {
  Box root;
  std::vector<TreeLeaf> leaves;
  int max_depth = 0;

  [[nodiscard]] double leaf_area() const;
};

/// Subdivides wherever the 3x3 corner/mid-edge/center samples of
/// `inside` disagree, down to `depth`.
SpaceTree build_alpha_tree(const Box& cell, const std::function<bool(const Vec2&)>& inside,
                           int depth);

struct DiffuseTreeParams {
  double epsilon = 5e-3;
  int n_sub = 7;
  int test_points = 5;   // per direction, corners included
  double eps_d = 1e-5;
  // also subdivide when a test point is within epsilon plus the test-grid
  // covering radius, so a band thinner than the grid spacing is not missed
  bool guard = true;

  void validate() const;
};

/// Subdivides a subcell while regularized_delta(dist(x_i)) > eps_d for any
/// test point x_i (or the guard fires), down to n_sub.
SpaceTree build_diffuse_tree(const Box& cell, const std::function<double(const Vec2&)>& dist,
                             const DiffuseTreeParams& params);

/// Calls visit(x, weight, leaf_index) for every tensor-product Gauss point of every
/// leaf; weights include the leaf area factor.
template <typename Visitor>
void for_each_tree_point(const SpaceTree& tree, const GaussRule& rule, Visitor&& visit) {
  const int n = rule.size();
  for (std::size_t l = 0; l < tree.leaves.size(); ++l) {
    const Box& b = tree.leaves[l].box;
    const double jac = b.jacobian();
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        visit(b.map(rule.nodes[i], rule.nodes[j]), rule.weights[i] * rule.weights[j] * jac, l);
      }
    }
  }
}

/// Sum over leaves of the tensor-product rule. Throws IntegrationError
/// naming the leaf if f returns a non-finite value.
double integrate_over_tree(const SpaceTree& tree, const std::function<double(const Vec2&)>& f,
                           const GaussRule& rule);

}  // namespace pcfcm
