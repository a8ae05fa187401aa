#include "pcfcm/fcm.hpp"

#include "pcfcm/parallel.hpp"
#include "pcfcm/quadrature.hpp"

#include <Eigen/Cholesky>
#include <Eigen/OrderingMethods>

#include <cmath>
#include <map>
#include <mutex>
#include <string>

namespace pcfcm {

Eigen::Matrix3d PlaneStress::elasticity() const {
  Eigen::Matrix3d D;
  const double c = E / (1.0 - nu * nu);
  D << c, c * nu, 0.0, c * nu, c, 0.0, 0.0, 0.0, c * 0.5 * (1.0 - nu);
  return D;
}

int components(const MaterialModel& m) { return std::holds_alternative<PlaneStress>(m) ? 2 : 1; }

void validate(const MaterialModel& m) {
  if (const auto* p = std::get_if<PoissonCoefficient>(&m)) {
    if (!(p->c > 0.0)) throw ArgumentError("Poisson coefficient must be positive");
  } else {
    const auto& e = std::get<PlaneStress>(m);
    if (!(e.E > 0.0)) throw ArgumentError("Young's modulus must be positive");
    if (!(e.nu >= 0.0 && e.nu < 0.5)) throw ArgumentError("Poisson ratio must be in [0, 0.5)");
  }
}

namespace {

struct ElementResult {
  Eigen::MatrixXd K;
  Eigen::MatrixXd K_physical;  // part from points with alpha == 1
  Eigen::VectorXd f;
};

struct ElementKernel {
  const StructuredMesh& mesh;
  const MaterialModel& material;
  const IndicatorField& indicator;
  const FieldFn* body;  // may be null
  VolumeQuadrature quad;
  GaussRule rule;
  TensorBasis basis;
  Eigen::Matrix3d chol_d = Eigen::Matrix3d::Zero();
  double poisson_c = 1.0;

  ElementKernel(const StructuredMesh& m, const MaterialModel& mat, const IndicatorField& ind,
                const FieldFn* b, const VolumeQuadrature& q)
      : mesh(m), material(mat), indicator(ind), body(b), quad(q),
        rule(gauss_legendre<double>(q.n_gauss > 0 ? q.n_gauss : m.degree() + 1)),
        basis(m.degree()) {
    if (const auto* ps = std::get_if<PlaneStress>(&material)) {
      chol_d = ps->elasticity().llt().matrixL();
    } else {
      poisson_c = std::get<PoissonCoefficient>(material).c;
    }
  }

  [[nodiscard]] int ncomp() const { return components(material); }

  // Stiffness over a list of points with precomputed alpha; load only if requested.
  ElementResult integrate(const Box& cell, const std::vector<Vec2>& pts, const std::vector<double>& wts,
                          const std::vector<double>& alpha, bool stiffness, bool load) const {
    const int nm = basis.size();
    const int nc = ncomp();
    const int ndof = nm * nc;
    const int rows = nc == 1 ? 2 : 3;
    constexpr int kBatch = 256;
    ElementResult out;
    out.f = Eigen::VectorXd::Zero(ndof);
    // physical (alpha == 1) and fictitious points go to separate matrices
    Eigen::MatrixXd Kg[2] = {Eigen::MatrixXd::Zero(ndof, ndof), Eigen::MatrixXd::Zero(ndof, ndof)};
    Eigen::MatrixXd R[2];
    int col[2] = {0, 0};
    auto flush = [&](int g) {
      if (col[g] == 0) return;
      Kg[g].selfadjointView<Eigen::Lower>().rankUpdate(R[g].leftCols(col[g]));
      col[g] = 0;
    };
    const double sx = 2.0 / cell.size().x();
    const double sy = 2.0 / cell.size().y();
    BasisValues bv;
    Eigen::RowVectorXd gx(nm), gy(nm);
    for (std::size_t q = 0; q < pts.size(); ++q) {
      const Vec2 loc = cell.local(pts[q]);
      basis.eval(loc.x(), loc.y(), bv);
      const double aw = alpha[q] * wts[q];
      if (stiffness) {
        const int g = alpha[q] == 1.0 ? 0 : 1;
        if (R[g].size() == 0) R[g].resize(ndof, kBatch * rows);
        gx = bv.grad.row(0) * sx;
        gy = bv.grad.row(1) * sy;
        if (nc == 1) {
          const double s = std::sqrt(aw * poisson_c);
          R[g].col(col[g]++) = s * gx.transpose();
          R[g].col(col[g]++) = s * gy.transpose();
        } else {
          const double s = std::sqrt(aw);
          for (int c = 0; c < 3; ++c) {
            auto rc = R[g].col(col[g]++);
            rc.head(nm) = s * (chol_d(0, c) * gx + chol_d(2, c) * gy).transpose();
            rc.tail(nm) = s * (chol_d(1, c) * gy + chol_d(2, c) * gx).transpose();
          }
        }
        if (col[g] + rows > R[g].cols()) flush(g);
      }
      if (load && body && *body) {
        const Vec2 b = (*body)(pts[q]);
        for (int c = 0; c < nc; ++c) out.f.segment(c * nm, nm) += (aw * b[c]) * bv.value;
      }
    }
    flush(0);
    flush(1);
    out.K_physical = Kg[0].selfadjointView<Eigen::Lower>();
    out.K = out.K_physical;
    out.K += Kg[1].selfadjointView<Eigen::Lower>().toDenseMatrix();
    return out;
  }
};

struct CellPoints {
  std::vector<Vec2> pts;
  std::vector<double> wts;
  std::vector<double> alpha;
  bool uniform_alpha = true;
  bool single_leaf = true;
};

CellPoints cell_points(const Box& cell, const IndicatorField& indicator, const VolumeQuadrature& quad,
                       const GaussRule& rule) {
  if (!(cell.area() > 0.0)) throw Error("assembly: singular element mapping (zero area)");
  const SpaceTree tree = build_alpha_tree(cell, indicator.inside, quad.tree_depth);
  CellPoints cp;
  cp.single_leaf = tree.leaves.size() == 1;
  const std::size_t n = tree.leaves.size() * static_cast<std::size_t>(rule.size() * rule.size());
  cp.pts.reserve(n);
  cp.wts.reserve(n);
  cp.alpha.reserve(n);
  for_each_tree_point(tree, rule, [&](const Vec2& x, double w, std::size_t) {
    cp.pts.push_back(x);
    cp.wts.push_back(w);
    cp.alpha.push_back(indicator(x));
  });
  for (double a : cp.alpha) {
    if (a != cp.alpha.front()) {
      cp.uniform_alpha = false;
      break;
    }
  }
  return cp;
}

}  // namespace

Eigen::MatrixXd element_stiffness(const StructuredMesh& mesh, int cell, const MaterialModel& material,
                                  const IndicatorField& indicator, const VolumeQuadrature& quad) {
  validate(material);
  ElementKernel kernel(mesh, material, indicator, nullptr, quad);
  const Box box = mesh.cell_box(cell);
  const CellPoints cp = cell_points(box, indicator, quad, kernel.rule);
  return kernel.integrate(box, cp.pts, cp.wts, cp.alpha, true, false).K;
}

GlobalSystem assemble_volume(const StructuredMesh& mesh, const MaterialModel& material,
                             const IndicatorField& indicator, const FieldFn& body,
                             const VolumeQuadrature& quad) {
  validate(material);
  if (quad.tree_depth < 0) throw ArgumentError("tree depth must be >= 0");
  if (!(indicator.alpha_fic > 0.0 && indicator.alpha_fic <= 1.0)) {
    throw ArgumentError("alpha_fic must lie in (0, 1]");
  }
  ElementKernel kernel(mesh, material, indicator, &body, quad);
  const int nc = kernel.ncomp();
  const int nm = kernel.basis.size();
  const int ncell = mesh.cell_count();

  // Uncut cells of equal size with one alpha share their stiffness.
  std::map<double, std::pair<Eigen::MatrixXd, Eigen::MatrixXd>> uncut_cache;
  std::mutex cache_mutex;

  std::vector<ElementResult> elems(static_cast<std::size_t>(ncell));
  parallel_for(ncell, [&](int c) {
    const Box box = mesh.cell_box(c);
    const CellPoints cp = cell_points(box, indicator, quad, kernel.rule);
    const bool cacheable = cp.single_leaf && cp.uniform_alpha;
    const std::pair<Eigen::MatrixXd, Eigen::MatrixXd>* cached = nullptr;
    if (cacheable) {
      std::lock_guard lock(cache_mutex);
      auto it = uncut_cache.find(cp.alpha.front());
      if (it != uncut_cache.end()) cached = &it->second;
    }
    ElementResult r = kernel.integrate(box, cp.pts, cp.wts, cp.alpha, cached == nullptr, true);
    if (cached) {
      r.K = cached->first;
      r.K_physical = cached->second;
    } else if (cacheable) {
      std::lock_guard lock(cache_mutex);
      uncut_cache.emplace(cp.alpha.front(), std::make_pair(r.K, r.K_physical));
    }
    elems[static_cast<std::size_t>(c)] = std::move(r);
  });

  GlobalSystem sys;
  sys.components = nc;
  sys.scalar_dofs = mesh.scalar_dofs();
  const int n = nc * sys.scalar_dofs;
  sys.f = Eigen::VectorXd::Zero(n);
  sys.fixed.assign(static_cast<std::size_t>(n), 0);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(ncell) * nm * nm * nc * nc);
  std::vector<Eigen::Triplet<double>> trip_phys;
  for (int c = 0; c < ncell; ++c) {
    const std::vector<int> sd = mesh.cell_dofs(c);
    std::vector<int> gd(static_cast<std::size_t>(nm * nc));
    for (int comp = 0; comp < nc; ++comp) {
      for (int a = 0; a < nm; ++a) gd[comp * nm + a] = comp * sys.scalar_dofs + sd[a];
    }
    const ElementResult& e = elems[static_cast<std::size_t>(c)];
    for (int j = 0; j < nm * nc; ++j) {
      sys.f[gd[j]] += e.f[j];
      for (int i = 0; i < nm * nc; ++i) {
        if (e.K(i, j) != 0.0) trip.emplace_back(gd[i], gd[j], e.K(i, j));
        if (e.K_physical(i, j) != 0.0) trip_phys.emplace_back(gd[i], gd[j], e.K_physical(i, j));
      }
    }
  }
  sys.K.resize(n, n);
  sys.K.setFromTriplets(trip.begin(), trip.end());
  sys.K.makeCompressed();
  sys.K_physical.resize(n, n);
  sys.K_physical.setFromTriplets(trip_phys.begin(), trip_phys.end());
  sys.K_physical.makeCompressed();
  return sys;
}

void fix_mesh_boundary(const StructuredMesh& mesh, GlobalSystem& system) {
  if (system.fixed.size() != static_cast<std::size_t>(system.size())) {
    system.fixed.assign(static_cast<std::size_t>(system.size()), 0);
  }
  for (int comp = 0; comp < system.components; ++comp) {
    for (int d : mesh.boundary_dofs()) system.fixed[comp * system.scalar_dofs + d] = 1;
  }
}

struct SymmetricSolver::Impl {
  Eigen::SimplicialLLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> llt;
  Eigen::Index rows = -1;
  Eigen::Index nnz = -1;
  std::vector<char> fixed;
};

SymmetricSolver::SymmetricSolver() : impl_(std::make_unique<Impl>()) {}
SymmetricSolver::~SymmetricSolver() = default;
SymmetricSolver::SymmetricSolver(SymmetricSolver&&) noexcept = default;
SymmetricSolver& SymmetricSolver::operator=(SymmetricSolver&&) noexcept = default;

SolveResult SymmetricSolver::solve(const GlobalSystem& system) {
  const int n = system.size();
  if (system.K.rows() != n || system.K.cols() != n) throw SolverError("matrix/vector size mismatch");
  std::vector<char> fixed = system.fixed;
  if (fixed.size() != static_cast<std::size_t>(n)) fixed.assign(static_cast<std::size_t>(n), 0);

  // free-dof numbering
  std::vector<int> map(static_cast<std::size_t>(n), -1);
  int nfree = 0;
  for (int i = 0; i < n; ++i) {
    if (!fixed[i]) map[i] = nfree++;
  }
  const SparseMatrix* A = &system.K;
  SparseMatrix reduced;
  Eigen::VectorXd rhs;
  if (nfree == n) {
    rhs = system.f;
  } else {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(system.K.nonZeros()));
    for (int j = 0; j < system.K.outerSize(); ++j) {
      if (map[j] < 0) continue;
      for (SparseMatrix::InnerIterator it(system.K, j); it; ++it) {
        const int i = static_cast<int>(it.row());
        if (map[i] >= 0) trip.emplace_back(map[i], map[j], it.value());
      }
    }
    reduced.resize(nfree, nfree);
    reduced.setFromTriplets(trip.begin(), trip.end());
    reduced.makeCompressed();
    rhs.resize(nfree);
    for (int i = 0; i < n; ++i) {
      if (map[i] >= 0) rhs[map[i]] = system.f[i];
    }
    A = &reduced;
  }

  if (A->rows() != impl_->rows || A->nonZeros() != impl_->nnz || fixed != impl_->fixed) {
    impl_->llt.analyzePattern(*A);
    impl_->rows = A->rows();
    impl_->nnz = A->nonZeros();
    impl_->fixed = fixed;
  }
  impl_->llt.factorize(*A);
  if (impl_->llt.info() != Eigen::Success) {
    throw SolverError(
        "Cholesky factorization failed: matrix is not positive definite "
        "(missing Dirichlet constraints or penalty terms?)");
  }
  const Eigen::VectorXd x = impl_->llt.solve(rhs);
  if (!x.allFinite()) throw SolverError("solution contains non-finite values");

  SolveResult res;
  const Eigen::VectorXd r = (*A) * x - rhs;
  const double fn = rhs.norm();
  res.residual = fn > 0.0 ? r.norm() / fn : r.norm();
  res.u = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    if (map[i] >= 0) res.u[i] = x[map[i]];
  }
  return res;
}

SolveResult solve(const GlobalSystem& system) {
  SymmetricSolver s;
  return s.solve(system);
}

FieldSample evaluate(const StructuredMesh& mesh, int ncomp, const Eigen::VectorXd& coeffs,
                     const Vec2& x) {
  const int cell = mesh.cell_of(x);
  if (cell < 0) {
    throw QueryError("evaluate: point (" + std::to_string(x.x()) + ", " + std::to_string(x.y()) +
                     ") outside the mesh");
  }
  if (coeffs.size() != ncomp * mesh.scalar_dofs()) throw ArgumentError("evaluate: coefficient size");
  const Box box = mesh.cell_box(cell);
  const Vec2 loc = box.local(x);
  const BasisValues bv = TensorBasis(mesh.degree()).eval(std::clamp(loc.x(), -1.0, 1.0),
                                                         std::clamp(loc.y(), -1.0, 1.0));
  const std::vector<int> dofs = mesh.cell_dofs(cell);
  FieldSample s;
  s.value = Eigen::VectorXd::Zero(ncomp);
  s.grad = Eigen::MatrixXd::Zero(ncomp, 2);
  const double sx = 2.0 / box.size().x();
  const double sy = 2.0 / box.size().y();
  for (int comp = 0; comp < ncomp; ++comp) {
    for (std::size_t a = 0; a < dofs.size(); ++a) {
      const double c = coeffs[comp * mesh.scalar_dofs() + dofs[a]];
      s.value[comp] += c * bv.value[static_cast<Eigen::Index>(a)];
      s.grad(comp, 0) += c * bv.grad(0, static_cast<Eigen::Index>(a)) * sx;
      s.grad(comp, 1) += c * bv.grad(1, static_cast<Eigen::Index>(a)) * sy;
    }
  }
  return s;
}

double strain_energy(const SparseMatrix& K, const Eigen::VectorXd& u) {
  return 0.5 * u.dot(K * u);
}

}  // namespace pcfcm
