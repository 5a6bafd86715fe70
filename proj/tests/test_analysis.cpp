#include "sspif/analysis.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>

using namespace sspif;

TEST_SUITE("analysis") {
  TEST_CASE("periodic total variation") {
    CHECK(total_variation((Vector(3) << 0.0, 1.0, 0.5).finished()) == 2.0);
    CHECK(total_variation(Vector::Constant(5, 3.0)) == 0.0);
    CHECK(total_variation(Vector::Ones(1)) == 0.0);
    CHECK(total_variation((Vector(4) << 1.0, -1.0, 1.0, -1.0).finished()) == 8.0);
  }

  TEST_CASE("TV rise is zero at lambda = 0 and for the SSP regime") {
    const ProblemSetup p = make_problem(ProblemKind::LinearAdvectionStep, 1.0, 100);
    const Scheme s = plain_rk_scheme(get_method("eSSPRK(3,3)"));
    CHECK(max_tv_rise(s, p, 0.0, 10) == 0.0);
    CHECK(max_tv_rise(s, p, 0.4, 10) <= 1e-12);
    CHECK(max_tv_rise(s, p, 0.9, 10) > 1e-6);
    CHECK_THROWS_AS(max_tv_rise(s, p, -1.0, 10), InvalidArgument);
  }

  TEST_CASE("blow-up is reported as an infinite rise") {
    const ProblemSetup p = make_problem(ProblemKind::LinearAdvectionStep, 0.0, 40);
    const Scheme s = plain_rk_scheme(get_method("eSSPRK(2,2)"));
    CHECK(std::isinf(max_tv_rise(s, p, 1e150, 5)));
  }

  TEST_CASE("observed coefficients on linear advection") {
    const ProblemSetup p = make_problem(ProblemKind::LinearAdvectionStep, 0.0, 100);
    const auto plain = observed_tvd_lambda(plain_rk_scheme(get_method("eSSPRK(3,3)")), p, 3.0, 10);
    CHECK(plain.bracketed);
    CHECK(plain.lambda_obs == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(plain.bisection_width <= 0.5e-4);
    CHECK(plain.threshold == kTvThreshold);

    const auto iff = observed_tvd_lambda(ifrk_scheme(get_method("eSSPRK+(4,3)")), p, 3.0, 10);
    CHECK(iff.lambda_obs == doctest::Approx(20.0 / 11.0).epsilon(1e-3));

    const auto none = observed_tvd_lambda(plain_rk_scheme(get_method("eSSPRK(3,3)")), p, 0.5, 10);
    CHECK_FALSE(none.bracketed);
    CHECK(none.lambda_obs == 0.5);
    CHECK_THROWS_AS(observed_tvd_lambda(plain_rk_scheme(get_method("eSSPRK(3,3)")), p, 0.0, 10),
                    InvalidArgument);
  }

  TEST_CASE("sweeps are ordered and independent of the thread count") {
    const ProblemSetup p = make_problem(ProblemKind::LinearAdvectionStep, 2.0, 60);
    const Scheme s = ifrk_scheme(get_method("eSSPRK+(3,3)"));
    std::vector<double> lambdas;
    for (int k = 1; k <= 12; ++k) lambdas.push_back(0.1 * k);
    ::setenv("SSPIF_THREADS", "1", 1);
    const auto serial = lambda_sweep(s, p, lambdas, 5);
    ::setenv("SSPIF_THREADS", "4", 1);
    CHECK(worker_threads() == 4);
    const auto parallel = lambda_sweep(s, p, lambdas, 5);
    ::unsetenv("SSPIF_THREADS");
    REQUIRE(serial.size() == lambdas.size());
    for (std::size_t k = 0; k < lambdas.size(); ++k) {
      CHECK(serial[k].lambda == lambdas[k]);
      CHECK(serial[k].max_rise == parallel[k].max_rise);
      CHECK(serial[k].log10_rise == std::log10(std::max(serial[k].max_rise, 1e-300)));
    }
    CHECK(lambda_sweep(s, p, {}, 5).empty());
  }

  TEST_CASE("worker thread count is clamped") {
    ::setenv("SSPIF_THREADS", "1000", 1);
    CHECK(worker_threads() == 64);
    ::setenv("SSPIF_THREADS", "-3", 1);
    CHECK(worker_threads() == 1);
    ::unsetenv("SSPIF_THREADS");
    CHECK(worker_threads() == 1);
  }

  TEST_CASE("convergence slopes") {
    std::vector<std::pair<double, double>> cubic;
    for (double dt : {0.1, 0.05, 0.025, 0.0125}) cubic.emplace_back(dt, 7.0 * dt * dt * dt);
    CHECK(convergence_slope(cubic) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(convergence_slope({{1.0, 1.0}, {2.0, 0.5}, {4.0, 0.25}}) == doctest::Approx(-1.0));
    CHECK_THROWS_AS(convergence_slope({{0.1, 1.0}, {0.2, 2.0}}), DegenerateInput);
    CHECK_THROWS_AS(convergence_slope({{0.1, 1.0}, {0.1, 2.0}, {0.1, 3.0}}), DegenerateInput);
    CHECK_THROWS_AS(convergence_slope({{0.1, 0.0}, {0.2, 2.0}, {0.4, 3.0}}), DegenerateInput);
    CHECK_THROWS_AS(convergence_slope({{-0.1, 1.0}, {0.2, 2.0}, {0.4, 3.0}}), DegenerateInput);
  }

  TEST_CASE("L2 stability of the integrating-factor step") {
    const ProblemSetup p = make_problem(ProblemKind::LinearAdvectionStep, 10.0, 100);
    const Scheme iff = ifrk_scheme(get_method("eSSPRK+(3,3)"));
    CHECK(l2_stable(iff, p, 1.0, 50));
    const Scheme plain = plain_rk_scheme(get_method("eSSPRK(3,3)"));
    CHECK_FALSE(l2_stable(plain, p, 1.0, 50));
    CHECK(l2_stable(plain, p, 0.1, 50));
  }
}
