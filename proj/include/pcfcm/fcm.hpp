#pragma once

#include "pcfcm/basis.hpp"
#include "pcfcm/geometry.hpp"
#include "pcfcm/mesh.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <functional>
#include <memory>
#include <variant>
#include <vector>

namespace pcfcm {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Point-wise field with one or two components; scalar problems read x().
using FieldFn = std::function<Vec2(const Vec2&)>;

struct PoissonCoefficient {
  double c = 1.0;
};

struct PlaneStress {
  double E = 1.0;
  double nu = 0.3;

  /// Voigt constitutive matrix for (xx, yy, 2xy) strains.
  [[nodiscard]] Eigen::Matrix3d elasticity() const;
};

using MaterialModel = std::variant<PoissonCoefficient, PlaneStress>;

int components(const MaterialModel& m);
void validate(const MaterialModel& m);

/// alpha = 1 inside the physical domain, alpha_fic elsewhere.
struct IndicatorField {
  std::function<bool(const Vec2&)> inside = [](const Vec2&) { return true; };
  double alpha_fic = 1e-8;

  [[nodiscard]] double operator()(const Vec2& x) const { return inside(x) ? 1.0 : alpha_fic; }
};

struct VolumeQuadrature {
  int tree_depth = 0;
  int n_gauss = 0;  // 0: p + 1
};

/// K u = f over all component blocks. `fixed` marks dofs eliminated with a
/// homogeneous value.
struct GlobalSystem {
  SparseMatrix K;
  SparseMatrix K_physical;  // stiffness from points with alpha == 1 only
  Eigen::VectorXd f;
  int components = 1;
  int scalar_dofs = 0;
  std::vector<char> fixed;

  [[nodiscard]] int size() const { return static_cast<int>(f.size()); }
};

/// Alpha-weighted stiffness and body load over every cell of the mesh.
GlobalSystem assemble_volume(const StructuredMesh& mesh, const MaterialModel& material,
                             const IndicatorField& indicator, const FieldFn& body,
                             const VolumeQuadrature& quad);

/// Dense element stiffness of one cell (alpha-weighted), mostly for tests.
Eigen::MatrixXd element_stiffness(const StructuredMesh& mesh, int cell, const MaterialModel& material,
                                  const IndicatorField& indicator, const VolumeQuadrature& quad);

/// Marks every dof with nonzero trace on the mesh boundary as fixed to zero.
void fix_mesh_boundary(const StructuredMesh& mesh, GlobalSystem& system);

struct SolveResult {
  Eigen::VectorXd u;
  double residual = 0.0;  // ||K u - f|| / ||f|| on the free dofs
};

/// Sparse Cholesky with fill-reducing ordering. The symbolic analysis is
/// reused as long as the sparsity pattern does not change, which the
/// penalty-parameter sweeps rely on.
class SymmetricSolver {
 public:
  SymmetricSolver();
  ~SymmetricSolver();
  SymmetricSolver(SymmetricSolver&&) noexcept;
  SymmetricSolver& operator=(SymmetricSolver&&) noexcept;

  SolveResult solve(const GlobalSystem& system);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

SolveResult solve(const GlobalSystem& system);

struct FieldSample {
  Eigen::VectorXd value;  // one entry per component
  Eigen::MatrixXd grad;   // components x 2
};

/// Field value and gradient at x. Throws QueryError outside the mesh.
FieldSample evaluate(const StructuredMesh& mesh, int components, const Eigen::VectorXd& coeffs,
                     const Vec2& x);

/// 1/2 u^T K u for a stiffness-only matrix.
double strain_energy(const SparseMatrix& K, const Eigen::VectorXd& u);

}  // namespace pcfcm
