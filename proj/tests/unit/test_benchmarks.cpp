#include "pcfcm/benchmarks.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace pcfcm;

TEST_CASE("energy error formula") {
  CHECK(energy_error(2.0, 2.0) == 0.0);
  CHECK(energy_error(1.01, 1.0) == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(energy_error(0.0, 3.0) == doctest::Approx(100.0));
  CHECK(energy_error(7.3 * 0.9, 7.3) == doctest::Approx(energy_error(0.9, 1.0)).epsilon(1e-14));
  CHECK_THROWS_AS(energy_error(1.0, 0.0), ArgumentError);
  CHECK_THROWS_AS(energy_error(1.0, -1.0), ArgumentError);
}

TEST_CASE("radial polynomial algebra") {
  const RadialPolynomial p{{1.0, -2.0, 0.5}};
  CHECK(p(2.0) == doctest::Approx(1.0 - 4.0 + 2.0));
  CHECK(p.derivative()(2.0) == doctest::Approx(-2.0 + 2.0));
  const RadialPolynomial q = p * RadialPolynomial{{0.0, 1.0}};
  CHECK(q(3.0) == doctest::Approx(3.0 * p(3.0)));
}

TEST_CASE("annulus: zero solution has no load and no energy") {
  AnnularConfig c;
  c.n_points = 100;
  c.zero_solution = true;
  const AnnularProblem pb = build_annular_problem(c);
  CHECK(pb.energy == 0.0);
  CHECK(pb.body({0.5, 0.1}).norm() == 0.0);
  CHECK(pb.exact({0.3, 0.4}).norm() == 0.0);
}

TEST_CASE("annulus: cloud counts and equal spacing on both circles") {
  AnnularConfig c;
  c.n_points = 500;
  const AnnularProblem pb = build_annular_problem(c);
  CHECK(pb.cloud.size() == 2500);
  const double inner = (pb.cloud[1] - pb.cloud[0]).norm();
  const double outer = (pb.cloud[501] - pb.cloud[500]).norm();
  CHECK(inner == doctest::Approx(2 * std::numbers::pi * 0.25 / 500).epsilon(1e-5));
  CHECK(outer / inner == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(pb.polyline.size() == 2500);
  CHECK(pb.cloud[0].norm() == doctest::Approx(0.25));
  CHECK_THROWS_AS(build_annular_problem(AnnularConfig{0.5, 0.4}), ArgumentError);
}

TEST_CASE("annulus Poisson: body force matches a finite-difference Laplacian") {
  const AnnularProblem pb = build_annular_problem(AnnularConfig{});
  const double h = 2e-4;
  const auto u = [&](double x, double y) { return pb.exact({x, y})[0]; };
  for (const Vec2 x : {Vec2(0.3, 0.1), Vec2(-0.5, 0.6), Vec2(0.1, -0.9), Vec2(0.7, 0.0)}) {
    const double lap = (u(x.x() + h, x.y()) + u(x.x() - h, x.y()) + u(x.x(), x.y() + h) +
                        u(x.x(), x.y() - h) - 4 * u(x.x(), x.y())) / (h * h);
    CHECK(std::abs(pb.body(x)[0] + lap) < 1e-6);
  }
}

TEST_CASE("annulus elasticity: body force balances a finite-difference Navier operator") {
  AnnularConfig c;
  c.physics = Physics::elasticity;
  c.material = {2.0, 0.25};
  const AnnularProblem pb = build_annular_problem(c);
  CHECK(pb.components() == 2);
  const double E = 2.0, nu = 0.25;
  const double k = E / (1 - nu * nu);
  const auto u = [&](double x, double y, int i) { return pb.exact({x, y})[i]; };
  // central differences, Richardson-extrapolated from steps h and h/2
  const auto navier = [&](Vec2 p, double h) {
    const auto d2 = [&](int i, int dx, int dy) {
      const Vec2 e(dx * h, dy * h);
      return (u(p.x() + e.x(), p.y() + e.y(), i) - 2 * u(p.x(), p.y(), i) + u(p.x() - e.x(), p.y() - e.y(), i)) /
             (h * h);
    };
    const auto dxy = [&](int i) {
      return (u(p.x() + h, p.y() + h, i) - u(p.x() + h, p.y() - h, i) - u(p.x() - h, p.y() + h, i) +
              u(p.x() - h, p.y() - h, i)) / (4 * h * h);
    };
    return Vec2(k * (d2(0, 1, 0) + 0.5 * (1 - nu) * d2(0, 0, 1) + 0.5 * (1 + nu) * dxy(1)),
                k * (d2(1, 0, 1) + 0.5 * (1 - nu) * d2(1, 1, 0) + 0.5 * (1 + nu) * dxy(0)));
  };
  for (const Vec2 p : {Vec2(0.3, 0.1), Vec2(-0.5, 0.6), Vec2(0.1, -0.9)}) {
    const Vec2 div = (4.0 * navier(p, 5e-4) - navier(p, 1e-3)) / 3.0;
    CHECK(std::abs(pb.body(p)[0] + div[0]) < 1e-6);
    CHECK(std::abs(pb.body(p)[1] + div[1]) < 1e-6);
  }
}

TEST_CASE("annulus reference energy against polar quadrature of the exact gradient") {
  for (Physics ph : {Physics::poisson, Physics::elasticity}) {
    AnnularConfig c;
    c.physics = ph;
    const AnnularProblem pb = build_annular_problem(c);
    const double h = 1e-5;
    const PlaneStress mat;
    const Eigen::Matrix3d D = mat.elasticity();
    double U = 0.0;
    const int nr = 400, nt = 64;
    for (int i = 0; i < nr; ++i) {
      const double r = 0.25 + 0.75 * (i + 0.5) / nr;
      for (int j = 0; j < nt; ++j) {
        const double t = 2 * std::numbers::pi * (j + 0.3) / nt;
        const Vec2 x(r * std::cos(t), r * std::sin(t));
        const Vec2 gx = (pb.exact(x + Vec2(h, 0)) - pb.exact(x - Vec2(h, 0))) / (2 * h);
        const Vec2 gy = (pb.exact(x + Vec2(0, h)) - pb.exact(x - Vec2(0, h))) / (2 * h);
        double density;
        if (ph == Physics::poisson) {
          density = 0.5 * (gx[0] * gx[0] + gy[0] * gy[0]);
        } else {
          const Eigen::Vector3d eps(gx[0], gy[1], gy[0] + gx[1]);
          density = 0.5 * eps.dot(D * eps);
        }
        U += density * r * (0.75 / nr) * (2 * std::numbers::pi / nt);
      }
    }
    CHECK(pb.energy == doctest::Approx(U).epsilon(1e-5));
  }
}

TEST_CASE("annulus boundary data equals the exact field on both circles") {
  const AnnularProblem pb = build_annular_problem(AnnularConfig{});
  for (double t : {0.1, 1.3, 4.0}) {
    for (double r : {0.25, 1.0}) {
      const Vec2 x(r * std::cos(t), r * std::sin(t));
      CHECK(pb.boundary_data(x)[0] == doctest::Approx(pb.exact(x)[0]).epsilon(1e-14));
    }
  }
  // slightly inside the inner circle: data is projected back onto it
  const Vec2 y(0.24, 0.0);
  CHECK(pb.boundary_data(y)[0] == doctest::Approx(pb.exact({0.25, 0.0})[0]).epsilon(1e-14));
}

TEST_CASE("beta grids") {
  const auto g = fig6_beta_grid();
  CHECK(g.size() == 26);
  CHECK(g.front() == doctest::Approx(10.772).epsilon(1e-4));
  CHECK(g.back() == doctest::Approx(3.871e6).epsilon(1e-3));
  CHECK(std::is_sorted(g.begin(), g.end()));
  const auto l = logspace(10.0, 5e6, 26);
  CHECK(l.front() == 10.0);
  CHECK(l.back() == 5e6);
  CHECK(l[1] / l[0] == doctest::Approx(l[25] / l[24]));
  CHECK(beta_preset("fig6-grid") == g);
  CHECK_THROWS_AS(beta_preset("nope"), ArgumentError);
  CHECK(parse_method("diffuse") == PenaltyMethod::diffuse);
  CHECK(to_string(PenaltyMethod::reference) == "reference");
  CHECK_THROWS_AS(parse_method("exact"), ArgumentError);
}

TEST_CASE("beta study reports bad rows and continues") {
  AnnularConfig c;
  c.n_points = 100;
  const AnnularProblem pb = build_annular_problem(c);
  const StructuredMesh mesh(Box(-1.05, -1.05, 1.05, 1.05), 2, 2, 3);
  const GlobalSystem vol = assemble_volume(mesh, pb.material, pb.indicator, pb.body, {4, 0});
  BetaStudyConfig bc;
  bc.method = PenaltyMethod::reference;
  bc.betas = {-1.0, 10.0, 1e4};
  const BetaStudy st = run_beta_study(mesh, pb, vol, bc);
  REQUIRE(st.rows.size() == 3);
  CHECK_FALSE(st.rows[0].error.empty());
  CHECK(st.rows[1].error.empty());
  CHECK(st.rows[2].e_percent >= 0.0);
  bc.betas = {10.0, 1.0};
  CHECK_THROWS_AS(run_beta_study(mesh, pb, vol, bc), ArgumentError);
}

TEST_CASE("synthetic clouds and unit-box scaling") {
  const PointCloud mc(multi_curve_points());
  const PointCloud s = scale_to_unit_box(mc);
  const Box bb = s.bounding_box();
  CHECK(std::max(bb.size().x(), bb.size().y()) == doctest::Approx(2.0));
  CHECK(bb.lo.x() >= -1.0 - 1e-12);
  CHECK(bb.hi.y() <= 1.0 + 1e-12);
  const auto snake = open_snake_points();
  CHECK(snake.size() > 500);
  CHECK_THROWS_AS(open_snake_points(0.0), ArgumentError);
}
