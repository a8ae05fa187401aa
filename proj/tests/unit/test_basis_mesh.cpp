#include "pcfcm/basis.hpp"
#include "pcfcm/mesh.hpp"

#include <doctest.h>

#include <set>

using namespace pcfcm;

TEST_CASE("integrated Legendre modes vanish at the ends and match their derivative") {
  const int p = 8;
  Eigen::VectorXd v(p + 1), d(p + 1), vp(p + 1), vm(p + 1), tmp(p + 1);
  for (double end : {-1.0, 1.0}) {
    integrated_legendre<double>(p, end, v, d);
    for (int j = 2; j <= p; ++j) CHECK(std::abs(v[j]) < 1e-14);
  }
  const double h = 1e-6;
  for (double xi : {-0.7, 0.1, 0.93}) {
    integrated_legendre<double>(p, xi, v, d);
    integrated_legendre<double>(p, xi + h, vp, tmp);
    integrated_legendre<double>(p, xi - h, vm, tmp);
    for (int j = 0; j <= p; ++j) CHECK(d[j] == doctest::Approx((vp[j] - vm[j]) / (2 * h)).epsilon(1e-7));
  }
}

TEST_CASE("tensor basis: hats are bilinear, bubbles vanish on the boundary") {
  const TensorBasis b(3);
  CHECK(b.size() == 16);
  const BasisValues c = b.eval(-1, -1);
  CHECK(c.value[0] == doctest::Approx(1.0));
  CHECK(c.value.sum() == doctest::Approx(1.0));
  const BasisValues m = b.eval(0.3, 1.0);
  for (int j = 2; j <= 3; ++j) {
    for (int i = 0; i <= 3; ++i) CHECK(std::abs(m.value[j * 4 + i]) < 1e-14);
  }
  Eigen::VectorXd only(16);
  b.eval_values(0.2, -0.4, only);
  CHECK((only - b.eval(0.2, -0.4).value).norm() == 0.0);
  CHECK_THROWS_AS((void)b.eval(1.5, 0.0), ArgumentError);
}

TEST_CASE("structured mesh: dof counts and shared edges") {
  const StructuredMesh m(Box(0, 0, 2, 1), 2, 1, 3);
  CHECK(m.dofs_1d_x() == 7);
  CHECK(m.dofs_1d_y() == 4);
  CHECK(m.scalar_dofs() == 28);
  const auto a = m.cell_dofs(0);
  const auto b = m.cell_dofs(1);
  CHECK(a.size() == 16);
  // the shared edge x = 1 carries the right-side modes of cell 0 and the left-side modes of cell 1
  std::set<int> sa(a.begin(), a.end()), sb(b.begin(), b.end()), common;
  for (int d : sa) {
    if (sb.count(d)) common.insert(d);
  }
  CHECK(common.size() == 4);
  CHECK(m.cell_of({1.0, 0.5}) == 1);
  CHECK(m.cell_of({2.0, 1.0}) == 1);
  CHECK(m.cell_of({2.1, 0.5}) == -1);
  // boundary trace: every 1D dof on the left/right edges plus the bottom/top rows
  CHECK(m.boundary_dofs().size() == static_cast<std::size_t>(2 * 7 + 2 * 4 - 4));
}
