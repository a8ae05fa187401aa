#include "pcfcm/benchmarks.hpp"

#include "pcfcm/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace pcfcm {

double energy_error(double u_num, double u_ref) {
  if (!(u_ref > 0.0)) throw ArgumentError("energy_error: reference energy must be positive");
  return std::sqrt(std::abs(u_num - u_ref) / u_ref) * 100.0;
}

double RadialPolynomial::operator()(double s) const {
  double v = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * s + *it;
  return v;
}

RadialPolynomial RadialPolynomial::derivative() const {
  RadialPolynomial d;
  for (std::size_t i = 1; i < c.size(); ++i) d.c.push_back(static_cast<double>(i) * c[i]);
  return d;
}

RadialPolynomial RadialPolynomial::operator*(const RadialPolynomial& o) const {
  if (c.empty() || o.c.empty()) return {};
  RadialPolynomial r;
  r.c.assign(c.size() + o.c.size() - 1, 0.0);
  for (std::size_t i = 0; i < c.size(); ++i) {
    for (std::size_t j = 0; j < o.c.size(); ++j) r.c[i + j] += c[i] * o.c[j];
  }
  return r;
}

void AnnularConfig::validate() const {
  if (!(r_inner > 0.0 && r_outer > r_inner)) throw ArgumentError("annulus: need 0 < r_inner < r_outer");
  if (n_points < 3) throw ArgumentError("annulus: n_points must be >= 3");
  if (physics == Physics::elasticity) pcfcm::validate(MaterialModel{material});
}

std::vector<Vec2> circle_points(const Vec2& center, double radius, int n) {
  std::vector<Vec2> pts;
  pts.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double t = 2.0 * std::numbers::pi * (i + 0.5) / n;
    pts.emplace_back(center.x() + radius * std::cos(t), center.y() + radius * std::sin(t));
  }
  return pts;
}

namespace {

void append_polygon(const std::vector<Vec2>& pts, std::size_t begin, std::size_t end,
                    std::vector<Segment>& out) {
  for (std::size_t i = begin; i < end; ++i) {
    out.push_back({pts[i], pts[i + 1 < end ? i + 1 : begin]});
  }
}

}  // namespace

AnnularProblem build_annular_problem(const AnnularConfig& cfg) {
  cfg.validate();
  AnnularProblem pb;
  pb.config = cfg;
  const double a = cfg.r_inner;
  const double b = cfg.r_outer;
  if (cfg.zero_solution) {
    pb.profile.c = {0.0};
  } else {
    const double c2 = cfg.c2 ? *cfg.c2 : -1.5 * cfg.c3 * (a * a + b * b);
    pb.profile.c = {0.0, cfg.c1, c2, cfg.c3};
  }
  const RadialPolynomial P = pb.profile;
  const RadialPolynomial dP = P.derivative();
  const RadialPolynomial ddP = dP.derivative();

  std::vector<Vec2> pts = circle_points(Vec2::Zero(), a, cfg.n_points);
  const std::vector<Vec2> outer = circle_points(Vec2::Zero(), b, 4 * cfg.n_points);
  pts.insert(pts.end(), outer.begin(), outer.end());
  append_polygon(pts, 0, static_cast<std::size_t>(cfg.n_points), pb.polyline);
  append_polygon(pts, static_cast<std::size_t>(cfg.n_points), pts.size(), pb.polyline);
  pb.cloud = PointCloud(std::move(pts));

  const double a2 = a * a;
  const double b2 = b * b;
  pb.indicator.inside = [a2, b2](const Vec2& x) {
    const double s = x.squaredNorm();
    return s >= a2 && s <= b2;
  };

  // radial quadrature for the reference energy; the integrands are polynomials
  const GaussRule rule = gauss_legendre(40);
  auto radial_integral = [&](auto&& g) {
    double sum = 0.0;
    for (int i = 0; i < rule.size(); ++i) {
      const double r = 0.5 * (a + b) + 0.5 * (b - a) * rule.nodes[i];
      sum += 0.5 * (b - a) * rule.weights[i] * g(r);
    }
    return sum;
  };

  if (cfg.physics == Physics::poisson) {
    pb.material = PoissonCoefficient{1.0};
    pb.exact = [P](const Vec2& x) { return Vec2(P(x.squaredNorm()), 0.0); };
    // -lap u = -4 (P' + s P'')
    pb.body = [dP, ddP](const Vec2& x) {
      const double s = x.squaredNorm();
      return Vec2(-4.0 * (dP(s) + s * ddP(s)), 0.0);
    };
    // 1/2 int |u'|^2 dA with u' = 2 r P'
    pb.energy = std::numbers::pi * radial_integral([&](double r) {
      const double d = 2.0 * r * dP(r * r);
      return d * d * r;
    });
  } else {
    const PlaneStress mat = cfg.material;
    pb.material = mat;
    const double ce = mat.E / (1.0 - mat.nu * mat.nu);
    pb.exact = [P](const Vec2& x) { return Vec2(P(x.squaredNorm()) * x); };
    // radial Navier operator of u_r = r P(s): 4 (2 P' + s P'') r
    pb.body = [ce, dP, ddP](const Vec2& x) {
      const double s = x.squaredNorm();
      return Vec2(-ce * 4.0 * (2.0 * dP(s) + s * ddP(s)) * x);
    };
    pb.energy = std::numbers::pi * ce * radial_integral([&](double r) {
      const double s = r * r;
      const double er = P(s) + 2.0 * s * dP(s);
      const double et = P(s);
      return (er * er + et * et + 2.0 * mat.nu * er * et) * r;
    });
  }
  const double r_mid = 0.5 * (a + b);
  pb.boundary_data = [exact = pb.exact, a, b, r_mid](const Vec2& x) {
    const double r = x.norm();
    if (r == 0.0) return exact(Vec2(a, 0.0));
    return exact(x * ((r < r_mid ? a : b) / r));
  };
  pb.indicator.alpha_fic = 1e-8;
  return pb;
}

PenaltyMethod parse_method(const std::string& s) {
  if (s == "diffuse") return PenaltyMethod::diffuse;
  if (s == "sharp") return PenaltyMethod::sharp;
  if (s == "reference") return PenaltyMethod::reference;
  throw ArgumentError("unknown method '" + s + "' (diffuse, sharp, reference)");
}

std::string to_string(PenaltyMethod m) {
  switch (m) {
    case PenaltyMethod::diffuse: return "diffuse";
    case PenaltyMethod::sharp: return "sharp";
    case PenaltyMethod::reference: return "reference";
  }
  return "?";
}

PenaltySystem assemble_annular_penalty(const StructuredMesh& mesh, const AnnularProblem& problem,
                                       const BetaStudyConfig& config, SharpReconstruction* recon) {
  const int nc = problem.components();
  const PenaltyParams unit{1.0, problem.boundary_data};
  switch (config.method) {
    case PenaltyMethod::diffuse:
      return assemble_diffuse_penalty(mesh, nc, problem.cloud, config.distance, config.diffuse, unit);
    case PenaltyMethod::sharp: {
      SharpReconstruction rec = reconstruct_sharp(mesh, problem.cloud, config.distance, config.sharp);
      PenaltySystem pen = assemble_sharp_penalty(mesh, nc, problem.cloud, rec, config.sharp, unit);
      if (recon) *recon = std::move(rec);
      return pen;
    }
    case PenaltyMethod::reference:
      break;
  }
  return assemble_reference_penalty(mesh, nc, problem.polyline, config.n_gauss_reference, unit);
}

BetaStudy run_beta_study(const StructuredMesh& mesh, const AnnularProblem& problem,
                         const GlobalSystem& volume, const BetaStudyConfig& config) {
  if (config.betas.empty()) throw ArgumentError("beta study: empty beta list");
  if (!std::is_sorted(config.betas.begin(), config.betas.end())) {
    throw ArgumentError("beta study: beta values must be ascending");
  }
  BetaStudy study;
  SharpReconstruction rec;
  const PenaltySystem pen = assemble_annular_penalty(mesh, problem, config, &rec);
  study.warnings = rec.warnings;
  study.quadrature_points = pen.quadrature_points;

  SymmetricSolver solver;
  for (double beta : config.betas) {
    BetaRow row;
    row.beta = beta;
    try {
      if (!(beta > 0.0)) throw ArgumentError("beta must be positive");
      const GlobalSystem sys = add_penalty(volume, pen, beta);
      const SolveResult res = solver.solve(sys);
      row.residual = res.residual;
      row.energy = strain_energy(volume.K_physical, res.u);
      row.e_percent = energy_error(row.energy, problem.energy);
    } catch (const Error& e) {
      row.error = e.what();
      row.e_percent = std::numeric_limits<double>::quiet_NaN();
    }
    study.rows.push_back(row);
  }
  return study;
}

std::vector<double> fig6_beta_grid() {
  std::vector<double> b;
  for (int j = -3; j <= 22; ++j) b.push_back(50.0 * std::pow(10.0, 2.0 * j / 9.0));
  return b;
}

std::vector<double> logspace(double lo, double hi, int n) {
  if (!(lo > 0.0 && hi > lo) || n < 2) throw ArgumentError("logspace: need 0 < lo < hi and n >= 2");
  std::vector<double> v(static_cast<std::size_t>(n));
  const double l0 = std::log10(lo);
  const double l1 = std::log10(hi);
  for (int i = 0; i < n; ++i) v[i] = std::pow(10.0, l0 + (l1 - l0) * i / (n - 1));
  v.front() = lo;
  v.back() = hi;
  return v;
}

std::vector<double> beta_preset(const std::string& name) {
  if (name == "fig6-grid") return fig6_beta_grid();
  if (name == "logspace") return logspace(10.0, 5e6, 26);
  throw ArgumentError("unknown beta preset '" + name + "' (fig6-grid, logspace)");
}

PointCloud scale_to_unit_box(const PointCloud& cloud) {
  const Box bb = cloud.bounding_box();
  const double extent = std::max(bb.size().x(), bb.size().y());
  if (!(extent > 0.0)) throw DegenerateGeometry("cloud has zero extent");
  const double s = 2.0 / extent;
  const Vec2 c = bb.center();
  std::vector<Vec2> pts;
  pts.reserve(cloud.size());
  for (const Vec2& p : cloud.points()) pts.push_back(s * (p - c));
  return PointCloud(std::move(pts));
}

MembraneResult solve_membrane(const PointCloud& cloud, const MembraneConfig& cfg) {
  if (cfg.cells < 1 || cfg.degree < 1) throw ArgumentError("membrane: bad mesh spec");
  if (!(cfg.load == cfg.load)) throw ArgumentError("membrane: load is NaN");
  MembraneResult res(StructuredMesh(cfg.domain, cfg.cells, cfg.cells, cfg.degree));
  const StructuredMesh& mesh = res.mesh;
  for (const Vec2& p : cloud.points()) {
    if (!cfg.domain.contains(p)) throw ArgumentError("membrane: cloud does not fit inside the mesh");
  }

  IndicatorField full;  // alpha == 1 on the whole square
  const double load = cfg.load;
  GlobalSystem vol = assemble_volume(mesh, PoissonCoefficient{1.0}, full,
                                     [load](const Vec2&) { return Vec2(-load, 0.0); },
                                     VolumeQuadrature{0, cfg.n_gauss});
  fix_mesh_boundary(mesh, vol);

  res.boundary = reconstruct_sharp(mesh, cloud, cfg.distance, cfg.sharp);
  if (res.boundary.segments.empty()) throw Error("membrane: no boundary found near the cloud");

  const double uh = cfg.u_hat;
  const PenaltyParams pp{cfg.beta, [uh](const Vec2&) { return Vec2(uh, 0.0); }};
  PenaltySystem pen = assemble_sharp_penalty(mesh, 1, cloud, res.boundary, cfg.sharp, pp, true);
  res.quadrature_points = pen.quadrature_points;
  res.constraint_points = std::move(pen.contributing);

  const GlobalSystem sys = add_penalty(vol, pen);
  const SolveResult sol = solve(sys);
  res.u = sol.u;
  res.residual = sol.residual;
  res.energy = strain_energy(vol.K_physical, sol.u);
  res.dofs = sys.size();
  double sum = 0.0;
  for (const Vec2& x : res.constraint_points) sum += std::abs(evaluate(mesh, 1, res.u, x).value[0] - uh);
  res.mean_constraint_error =
      res.constraint_points.empty() ? 0.0 : sum / static_cast<double>(res.constraint_points.size());
  return res;
}

double axisymmetry_deviation(const StructuredMesh& mesh, const Eigen::VectorXd& u, const Vec2& center,
                             double radius, int n_radii, int n_angles) {
  double worst = 0.0;
  for (int i = 1; i <= n_radii; ++i) {
    const double rho = radius * i / (n_radii + 1);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int j = 0; j < n_angles; ++j) {
      const double t = 2.0 * std::numbers::pi * j / n_angles;
      const double v = evaluate(mesh, 1, u, center + rho * Vec2(std::cos(t), std::sin(t))).value[0];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    worst = std::max(worst, hi - lo);
  }
  return worst;
}

namespace {

// Resamples a parametric curve at roughly uniform arc length.
template <typename Curve>
void sample_curve(Curve&& curve, double t0, double t1, bool closed, double spacing,
                  std::vector<Vec2>& out) {
  constexpr int kFine = 20000;
  std::vector<Vec2> fine(kFine + 1);
  std::vector<double> arc(kFine + 1, 0.0);
  for (int i = 0; i <= kFine; ++i) {
    fine[i] = curve(t0 + (t1 - t0) * i / kFine);
    if (i) arc[i] = arc[i - 1] + (fine[i] - fine[i - 1]).norm();
  }
  const double len = arc.back();
  const int n = std::max(3, static_cast<int>(std::lround(len / spacing)));
  const int count = closed ? n : n + 1;
  std::size_t seg = 0;
  for (int i = 0; i < count; ++i) {
    const double target = len * i / n;
    while (seg + 1 < arc.size() - 1 && arc[seg + 1] < target) ++seg;
    const double w = (target - arc[seg]) / std::max(arc[seg + 1] - arc[seg], 1e-300);
    out.push_back(fine[seg] + std::clamp(w, 0.0, 1.0) * (fine[seg + 1] - fine[seg]));
  }
}

}  // namespace

std::vector<Vec2> multi_curve_points(double spacing) {
  if (!(spacing > 0.0)) throw ArgumentError("spacing must be positive");
  using std::cos;
  using std::sin;
  const double tau = 2.0 * std::numbers::pi;
  std::vector<Vec2> pts;
  sample_curve([](double t) { return Vec2(-0.5 + 0.32 * cos(t), 0.5 + 0.32 * sin(t)); }, 0, tau, true,
               spacing, pts);
  sample_curve([](double t) { return Vec2(0.5 + 0.4 * cos(t), 0.55 + 0.22 * sin(t)); }, 0, tau, true,
               spacing, pts);
  sample_curve(
      [](double t) {
        const double r = 0.3 * (1.0 + 0.25 * cos(5.0 * t));
        return Vec2(-0.5 + r * cos(t), -0.45 + r * sin(t));
      },
      0, tau, true, spacing, pts);
  sample_curve(
      [](double t) {
        const double r = 0.28 * (1.0 + 0.3 * cos(3.0 * t));
        return Vec2(0.5 + r * cos(t), -0.5 + r * sin(t));
      },
      0, tau, true, spacing, pts);
  return pts;
}

std::vector<Vec2> open_snake_points(double spacing) {
  if (!(spacing > 0.0)) throw ArgumentError("spacing must be positive");
  const std::vector<Vec2> ctrl = {{-0.95, -0.6}, {-0.55, 0.35}, {-0.2, -0.45}, {0.15, 0.5},
                                  {0.45, -0.3}, {0.7, 0.3},    {0.95, -0.1}};
  std::vector<Vec2> pts;
  for (std::size_t i = 0; i + 1 < ctrl.size(); ++i) {
    // spacing drifts by +-25% between pieces
    const double h = spacing * (1.0 + 0.25 * std::sin(1.7 * static_cast<double>(i)));
    const Vec2 a = ctrl[i];
    const Vec2 b = ctrl[i + 1];
    std::vector<Vec2> piece;
    sample_curve([&](double t) -> Vec2 { return a + t * (b - a); }, 0.0, 1.0, false, h, piece);
    if (!pts.empty()) piece.erase(piece.begin());  // shared kink point
    pts.insert(pts.end(), piece.begin(), piece.end());
  }
  return pts;
}

}  // namespace pcfcm
