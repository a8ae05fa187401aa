#pragma once

#include "pcfcm/geometry.hpp"

#include <vector>

namespace pcfcm {

/// Uniform nx x ny grid of rectangular cells with one polynomial degree.
///
/// Global numbering follows the 1D structure of the hierarchic basis: along x
/// the scalar dofs are ordered node, edge modes, node, ... giving nx*p+1 1D
/// indices, and a 2D dof is (gy * (nx*p+1) + gx). Vector fields stack whole
/// scalar blocks per component.
class StructuredMesh {
 public:
  StructuredMesh(const Box& domain, int nx, int ny, int p);

  [[nodiscard]] const Box& domain() const { return domain_; }
  [[nodiscard]] int nx() const { return nx_; }
  [[nodiscard]] int ny() const { return ny_; }
  [[nodiscard]] int degree() const { return p_; }
  [[nodiscard]] int cell_count() const { return nx_ * ny_; }
  [[nodiscard]] int dofs_1d_x() const { return nx_ * p_ + 1; }
  [[nodiscard]] int dofs_1d_y() const { return ny_ * p_ + 1; }
  [[nodiscard]] int scalar_dofs() const { return dofs_1d_x() * dofs_1d_y(); }

  [[nodiscard]] Box cell_box(int cell) const;
  [[nodiscard]] int cell_index(int ix, int iy) const { return iy * nx_ + ix; }

  /// Owning cell of x; cells are half-open except along the upper domain
  /// edges. Returns -1 outside the domain.
  [[nodiscard]] int cell_of(const Vec2& x) const;

  /// Scalar global dof of every local mode of a cell, in local-mode order.
  [[nodiscard]] std::vector<int> cell_dofs(int cell) const;

  /// Scalar dofs whose trace on the domain boundary is nonzero.
  [[nodiscard]] std::vector<int> boundary_dofs() const;

 private:
  [[nodiscard]] int global_1d(int cell_1d, int mode) const {
    if (mode == 0) return cell_1d * p_;
    if (mode == 1) return (cell_1d + 1) * p_;
    return cell_1d * p_ + mode - 1;
  }

  Box domain_;
  int nx_, ny_, p_;
  Vec2 h_;
};

}  // namespace pcfcm
