#include "pcfcm/mesh.hpp"

#include <algorithm>
#include <cmath>

namespace pcfcm {

StructuredMesh::StructuredMesh(const Box& domain, int nx, int ny, int p)
    : domain_(domain), nx_(nx), ny_(ny), p_(p) {
  if (nx < 1 || ny < 1) throw ArgumentError("mesh needs at least one cell per direction");
  if (p < 1) throw ArgumentError("polynomial degree must be >= 1");
  if (!(domain.hi.x() > domain.lo.x() && domain.hi.y() > domain.lo.y())) {
    throw ArgumentError("mesh domain has zero area");
  }
  h_ = Vec2(domain.size().x() / nx, domain.size().y() / ny);
}

Box StructuredMesh::cell_box(int cell) const {
  const int ix = cell % nx_;
  const int iy = cell / nx_;
  const Vec2 lo(domain_.lo.x() + ix * h_.x(), domain_.lo.y() + iy * h_.y());
  // upper corners from the next index so neighbours share bitwise-equal edges
  const Vec2 hi(ix + 1 == nx_ ? domain_.hi.x() : domain_.lo.x() + (ix + 1) * h_.x(),
                iy + 1 == ny_ ? domain_.hi.y() : domain_.lo.y() + (iy + 1) * h_.y());
  return {lo, hi};
}

int StructuredMesh::cell_of(const Vec2& x) const {
  if (!domain_.contains(x)) return -1;
  auto index = [](double v, double lo, double h, int n) {
    int i = static_cast<int>(std::floor((v - lo) / h));
    i = std::clamp(i, 0, n - 1);
    return i;
  };
  int ix = index(x.x(), domain_.lo.x(), h_.x(), nx_);
  int iy = index(x.y(), domain_.lo.y(), h_.y(), ny_);
  // floor may land one cell off near an edge; settle against the actual boxes
  while (ix > 0 && x.x() < cell_box(cell_index(ix, 0)).lo.x()) --ix;
  while (ix + 1 < nx_ && x.x() >= cell_box(cell_index(ix, 0)).hi.x()) ++ix;
  while (iy > 0 && x.y() < cell_box(cell_index(0, iy)).lo.y()) --iy;
  while (iy + 1 < ny_ && x.y() >= cell_box(cell_index(0, iy)).hi.y()) ++iy;
  return cell_index(ix, iy);
}

std::vector<int> StructuredMesh::cell_dofs(int cell) const {
  const int ix = cell % nx_;
  const int iy = cell / nx_;
  const int m = p_ + 1;
  const int stride = dofs_1d_x();
  std::vector<int> dofs(static_cast<std::size_t>(m * m));
  for (int j = 0; j < m; ++j) {
    const int gy = global_1d(iy, j);
    for (int i = 0; i < m; ++i) dofs[j * m + i] = gy * stride + global_1d(ix, i);
  }
  return dofs;
}

std::vector<int> StructuredMesh::boundary_dofs() const {
  std::vector<int> out;
  const int sx = dofs_1d_x();
  const int sy = dofs_1d_y();
  for (int gy = 0; gy < sy; ++gy) {
    for (int gx = 0; gx < sx; ++gx) {
      if (gx == 0 || gx == sx - 1 || gy == 0 || gy == sy - 1) out.push_back(gy * sx + gx);
    }
  }
  return out;
}

}  // namespace pcfcm
