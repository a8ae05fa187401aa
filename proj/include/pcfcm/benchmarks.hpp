#pragma once

#include "pcfcm/fcm.hpp"
#include "pcfcm/penalty.hpp"
#include "pcfcm/point_cloud.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pcfcm {

/// e = sqrt(|U_num - U_ref| / U_ref) * 100.
double energy_error(double u_num, double u_ref);

/// Polynomial in s = r^2, coefficient i multiplies s^i.
struct RadialPolynomial {
  std::vector<double> c;

  [[nodiscard]] double operator()(double s) const;
  [[nodiscard]] RadialPolynomial derivative() const;  // d/ds
  [[nodiscard]] RadialPolynomial operator*(const RadialPolynomial& o) const;
};

enum class Physics { poisson, elasticity };

struct AnnularConfig {
  double r_inner = 0.25;
  double r_outer = 1.0;
  int n_points = 2000;  // inner circle; the outer circle gets 4x as many
  Physics physics = Physics::poisson;
  PlaneStress material;
  // P(s) = c1 s + c2 s^2 + c3 s^3. Unless given, c2 makes P'(s) equal on
  // both circles; the reconstructed lines sit inside each circle by an
  // offset proportional to spacing^2 / radius, and with this choice the
  // resulting boundary-data errors of the two circles cancel
  double c1 = 0.0;
  std::optional<double> c2;
  double c3 = 1.0;
  bool zero_solution = false;  // u == 0, for tests

  void validate() const;
};

/// Annulus with a manufactured radial solution; nonzero data on both circles.
/// Poisson: u = P(r^2). Elasticity: u = P(r^2) * (x, y).
struct AnnularProblem {
  AnnularConfig config;
  RadialPolynomial profile;  // P
  PointCloud cloud;          // inner circle points first
  std::vector<Segment> polyline;  // closed polygons through the cloud points
  MaterialModel material;
  IndicatorField indicator;
  FieldFn exact;
  FieldFn body;
  FieldFn boundary_data;  // exact field at the radial projection onto the nearer circle
  double energy = 0.0;  // U_ref = 1/2 a(u, u) over the annulus

  [[nodiscard]] int components() const { return pcfcm::components(material); }
};

AnnularProblem build_annular_problem(const AnnularConfig& config);

/// Points on a circle, phase-shifted by half a step.
std::vector<Vec2> circle_points(const Vec2& center, double radius, int n);

enum class PenaltyMethod { diffuse, sharp, reference };

PenaltyMethod parse_method(const std::string& s);
std::string to_string(PenaltyMethod m);

struct BetaStudyConfig {
  PenaltyMethod method = PenaltyMethod::sharp;
  DistanceParams distance;
  DiffuseParams diffuse;
  SharpParams sharp;
  int n_gauss_reference = 11;
  std::vector<double> betas;
};

struct BetaRow {
  double beta = 0.0;
  double energy = 0.0;
  double e_percent = 0.0;
  double residual = 0.0;
  std::string error;  // nonempty if the solve failed for this row
};

struct BetaStudy {
  std::vector<BetaRow> rows;
  std::size_t quadrature_points = 0;
  std::size_t warnings = 0;
};

/// Penalty terms of the configured method at beta = 1. For the sharp
/// method the reconstruction is handed out through `recon` if given.
PenaltySystem assemble_annular_penalty(const StructuredMesh& mesh, const AnnularProblem& problem,
                                       const BetaStudyConfig& config,
                                       SharpReconstruction* recon = nullptr);

/// Penalty terms are assembled once at beta = 1 and scaled per row.
BetaStudy run_beta_study(const StructuredMesh& mesh, const AnnularProblem& problem,
                         const GlobalSystem& volume, const BetaStudyConfig& config);

/// 50 * 10^(2j/9), j = -3..22.
std::vector<double> fig6_beta_grid();
std::vector<double> logspace(double lo, double hi, int n);
std::vector<double> beta_preset(const std::string& name);

/// Generic planar boundary-value run: volume system plus sharp penalty.
struct MembraneConfig {
  Box domain{-1.1, -1.1, 1.1, 1.1};
  int cells = 16;
  int degree = 10;
  double load = 10.0;  // right-hand side is -load
  double u_hat = 1.0;
  double beta = 1e6;
  int n_gauss = 11;
  DistanceParams distance{4, 0.02};
  SharpParams sharp{5, 4, 11, 8e-2, {}};
};

struct MembraneResult {
  explicit MembraneResult(const StructuredMesh& m) : mesh(m) {}

  StructuredMesh mesh;
  Eigen::VectorXd u;
  SharpReconstruction boundary;
  std::vector<Vec2> constraint_points;  // contributing sharp quadrature points
  double mean_constraint_error = 0.0;   // mean |u - u_hat| over those points
  double residual = 0.0;
  double energy = 0.0;
  std::size_t quadrature_points = 0;
  int dofs = 0;
};

/// Uniform scaling and shift mapping the cloud's bounding box into [-1, 1]^2.
PointCloud scale_to_unit_box(const PointCloud& cloud);

MembraneResult solve_membrane(const PointCloud& cloud, const MembraneConfig& config);

/// Largest spread of u over circles of radius rho_i * R about `center`.
double axisymmetry_deviation(const StructuredMesh& mesh, const Eigen::VectorXd& u, const Vec2& center,
                             double radius, int n_radii = 9, int n_angles = 72);

/// Synthetic benchmark clouds: several closed convex and concave curves,
/// and one open polyline with kinks and varying spacing.
std::vector<Vec2> multi_curve_points(double spacing = 6e-3);
std::vector<Vec2> open_snake_points(double spacing = 6e-3);

}  // namespace pcfcm
