#include "pcfcm/basis.hpp"

#include <cmath>
#include <string>

namespace pcfcm {

namespace {

constexpr int kMaxModes1d = 32;
using Buf = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxModes1d, 1>;

void check_coords(double xi, double eta) {
  constexpr double slack = 1e-12;
  if (!(std::abs(xi) <= 1.0 + slack && std::abs(eta) <= 1.0 + slack)) {
    throw ArgumentError("basis: local coordinates (" + std::to_string(xi) + ", " +
                        std::to_string(eta) + ") outside the reference square");
  }
}

}  // namespace

TensorBasis::TensorBasis(int p) : p_(p) {
  if (p < 1 || p + 1 > kMaxModes1d) {
    throw ArgumentError("basis degree must be in [1, " + std::to_string(kMaxModes1d - 1) + "]");
  }
}

BasisValues TensorBasis::eval(double xi, double eta) const {
  BasisValues out;
  eval(xi, eta, out);
  return out;
}

void TensorBasis::eval(double xi, double eta, BasisValues& out) const {
  check_coords(xi, eta);
  const int m = p_ + 1;
  Buf vx(m), dx(m), vy(m), dy(m);
  integrated_legendre<double>(p_, xi, vx, dx);
  integrated_legendre<double>(p_, eta, vy, dy);
  out.value.resize(m * m);
  out.grad.resize(2, m * m);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      const int a = j * m + i;
      out.value[a] = vx[i] * vy[j];
      out.grad(0, a) = dx[i] * vy[j];
      out.grad(1, a) = vx[i] * dy[j];
    }
  }
}

void TensorBasis::eval_values(double xi, double eta, Eigen::Ref<Eigen::VectorXd> out) const {
  check_coords(xi, eta);
  const int m = p_ + 1;
  Buf vx(m), dx(m), vy(m), dy(m);
  integrated_legendre<double>(p_, xi, vx, dx);
  integrated_legendre<double>(p_, eta, vy, dy);
  for (int j = 0; j < m; ++j) {
    out.segment(j * m, m) = vx * vy[j];
  }
}

}  // namespace pcfcm
