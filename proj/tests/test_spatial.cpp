#include "sspif/analysis.hpp"
#include "sspif/spatial.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace sspif;

namespace {

constexpr double kPi = std::numbers::pi;

// Cell averages of cos(2 pi x) + x over [x - dx/2, x + dx/2].
double cell_average(double x, double dx) {
  auto prim = [](double y) { return std::sin(2.0 * kPi * y) / (2.0 * kPi) + 0.5 * y * y; };
  return (prim(x + 0.5 * dx) - prim(x - 0.5 * dx)) / dx;
}

double burgers_error(Eigen::Index n, double eps) {
  const Grid1D grid(n);
  Vector u(n), exact(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = grid.x(i);
    u(i) = std::exp(std::sin(2.0 * kPi * x));
    exact(i) = -u(i) * u(i) * 2.0 * kPi * std::cos(2.0 * kPi * x);
  }
  return (weno5_burgers_rhs(grid, u, eps) - exact).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_SUITE("spatial") {
  TEST_CASE("grid") {
    const Grid1D g(400);
    CHECK(g.dx == 1.0 / 400.0);
    CHECK(g.x(200) == 0.5);
    CHECK_THROWS_AS(Grid1D(4), InvalidArgument);
  }

  TEST_CASE("upwind matrix and matrix-free form agree") {
    const Grid1D g(20);
    const Vector u = Vector::LinSpaced(20, -1.0, 3.0).array().sin();
    const Matrix L = upwind_matrix(g, 2.5);
    CHECK((L * u - apply_upwind(g, 2.5, u)).norm() < 1e-12);
    CHECK(L(0, 19) == 50.0);
    CHECK(L(3, 3) == -50.0);
    CHECK(L.rowwise().sum().cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(upwind_matrix(g, -1.0), InvalidArgument);
  }

  TEST_CASE("reconstructions of a constant are exact") {
    const std::array<double, 5> v = {2.0, 2.0, 2.0, 2.0, 2.0};
    CHECK(weno5_reconstruct(v) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(weno5_linear_reconstruct(v) == doctest::Approx(2.0).epsilon(1e-15));
  }

  TEST_CASE("linear reconstruction is fifth order") {
    const double x0 = 0.1;
    auto err = [&](double dx) {
      std::array<double, 5> v{};
      for (int k = 0; k < 5; ++k) v[k] = cell_average(x0 + (k - 2) * dx, dx);
      const double face = x0 + 0.5 * dx;
      return std::abs(weno5_linear_reconstruct(v) - (std::cos(2.0 * kPi * face) + face));
    };
    CHECK(std::log2(err(0.02) / err(0.01)) == doctest::Approx(5.0).epsilon(0.06));
  }

  TEST_CASE("nonlinear reconstruction is non-oscillatory at a jump") {
    const std::array<double, 5> step = {0.0, 0.0, 1.0, 1.0, 1.0};
    const double r = weno5_reconstruct(step, 1e-40);
    CHECK(r >= 1.0 - 1e-12);
    CHECK(r <= 1.0 + 1e-12);
    CHECK(weno5_linear_reconstruct(step) > 1.0 + 1e-3);
  }

  TEST_CASE("Burgers right-hand side converges on smooth data") {
    const double e1 = burgers_error(80, 1e-6);
    const double e2 = burgers_error(160, 1e-6);
    CHECK(e2 < e1);
    CHECK(std::log2(e1 / e2) > 3.5);
  }

  TEST_CASE("Burgers right-hand side of a constant vanishes") {
    const Grid1D g(16);
    CHECK(weno5_burgers_rhs(g, Vector::Constant(16, 0.7)).cwiseAbs().maxCoeff() < 1e-13);
    Vector bad = Vector::Zero(16);
    bad(3) = std::nan("");
    CHECK_THROWS_AS(weno5_burgers_rhs(g, bad), NonFinite);
    CHECK_THROWS_AS(weno5_burgers_rhs(g, Vector::Zero(15)), InvalidArgument);
  }

  TEST_CASE("Burgers semi-discretization conserves mass") {
    const ProblemSetup p = make_problem(ProblemKind::AdvectionBurgersStep, 10.0, 64);
    CHECK(std::abs(p.system.nonlinear(p.initial).sum()) < 1e-10);
  }

  TEST_CASE("problem setups") {
    const ProblemSetup ex3 = make_problem(ProblemKind::LinearAdvectionStep, 10.0, 100);
    CHECK(total_variation(ex3.initial) == 2.0);
    CHECK(ex3.initial.sum() == 51.0);
    CHECK(ex3.system.fe_dt_linear == doctest::Approx(0.001));
    CHECK(ex3.system.fe_dt_nonlinear == 0.01);
    CHECK((ex3.system.linear(ex3.initial) - ex3.system.L * ex3.initial).norm() < 1e-9);

    const ProblemSetup ex4 = make_problem(ProblemKind::AdvectionBurgersStep, 0.0, 40);
    CHECK(total_variation(ex4.initial) == 2.0);
    CHECK(std::isinf(ex4.system.fe_dt_linear));

    const ProblemSetup smooth = make_problem(ProblemKind::AdvectionBurgersSmooth, 1.0, 40);
    CHECK(smooth.initial(0) == 1.0);

    const ProblemSetup vdp = make_problem(ProblemKind::VanDerPol, 1.0, 0);
    CHECK(vdp.initial.size() == 2);
    const Vector full = vdp.system.full(vdp.initial);
    CHECK(full(0) == 0.0);
    CHECK(full(1) == -2.0);
    const ProblemSetup vdp_a = make_van_der_pol('a');
    CHECK((vdp_a.system.full(Vector((Vector(2) << 1.5, 0.3).finished())) -
           vdp.system.full(Vector((Vector(2) << 1.5, 0.3).finished())))
              .norm() < 1e-15);

    CHECK_THROWS_AS(make_problem(ProblemKind::VanDerPol, 2.0, 0), InvalidArgument);
    CHECK_THROWS_AS(make_problem(ProblemKind::LinearAdvectionStep, -1.0, 40), InvalidArgument);
    CHECK_THROWS_AS(make_problem(ProblemKind::AdvectionBurgersStep, 1.0, 40, 0.0), InvalidArgument);
    CHECK_THROWS_AS(make_van_der_pol('c'), InvalidArgument);
  }

  TEST_CASE("problem names") {
    CHECK(parse_problem_kind("ex4") == ProblemKind::AdvectionBurgersStep);
    CHECK(parse_problem_kind("LinearAdvectionStep") == ProblemKind::LinearAdvectionStep);
    CHECK(std::string(to_string(ProblemKind::VanDerPol)) == "VanDerPol");
    CHECK_THROWS_AS(parse_problem_kind("ex9"), InvalidArgument);
  }
}
