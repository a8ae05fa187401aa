#pragma once

#include "pcfcm/geometry.hpp"

#include <Eigen/Core>

namespace pcfcm {

/// 1D hierarchic basis on [-1,1]: the two linear hats followed by integrated
/// Legendre polynomials of degree 2..p, which vanish at both ends.
template <typename Scalar>
void integrated_legendre(int p, Scalar xi, Eigen::Ref<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>> value,
                         Eigen::Ref<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>> deriv) {
  value[0] = (Scalar(1) - xi) / Scalar(2);
  value[1] = (Scalar(1) + xi) / Scalar(2);
  deriv[0] = Scalar(-0.5);
  deriv[1] = Scalar(0.5);
  if (p < 2) return;
  // Legendre recurrence; l_prev2 = L_{j-2}, l_prev = L_{j-1}
  Scalar l_prev2 = 1;
  Scalar l_prev = xi;
  for (int j = 2; j <= p; ++j) {
    const Scalar lj = (Scalar(2 * j - 1) * xi * l_prev - Scalar(j - 1) * l_prev2) / Scalar(j);
    using std::sqrt;
    value[j] = (lj - l_prev2) / sqrt(Scalar(2 * (2 * j - 1)));
    deriv[j] = sqrt(Scalar(2 * j - 1) / Scalar(2)) * l_prev;
    l_prev2 = l_prev;
    l_prev = lj;
  }
}

/// Values and reference-coordinate gradients of the (p+1)^2 tensor-product
/// modes. Mode (i, j) has local index j * (p + 1) + i, i along xi.
struct BasisValues {
  Eigen::VectorXd value;
  Eigen::Matrix<double, 2, Eigen::Dynamic> grad;
};

class TensorBasis {
 public:
  explicit TensorBasis(int p);

  [[nodiscard]] int degree() const { return p_; }
  [[nodiscard]] int modes_1d() const { return p_ + 1; }
  [[nodiscard]] int size() const { return (p_ + 1) * (p_ + 1); }

  /// Throws ArgumentError outside the reference square (1e-12 slack).
  [[nodiscard]] BasisValues eval(double xi, double eta) const;
  void eval(double xi, double eta, BasisValues& out) const;
  /// Values only, no gradients.
  void eval_values(double xi, double eta, Eigen::Ref<Eigen::VectorXd> out) const;

 private:
  int p_;
};

inline BasisValues eval_basis(int p, double xi, double eta) { return TensorBasis(p).eval(xi, eta); }

}  // namespace pcfcm
