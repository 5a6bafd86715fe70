#include "sspif/method_library.hpp"
#include "sspif/tableau.hpp"
#include "sspif/tableau_json.hpp"

#include <doctest.h>

#include <filesystem>
#include <random>

using namespace sspif;

namespace {

std::pair<Matrix, Vector> oracle_butcher(const ShuOsherForm& so);

// Random nonnegative Shu--Osher form, beta scaled so the weights sum to one.
ShuOsherForm random_shu_osher(int s, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Matrix alpha = Matrix::Zero(s + 1, s + 1);
  Matrix beta = Matrix::Zero(s + 1, s + 1);
  for (int i = 1; i <= s; ++i) {
    double total = 0.0;
    for (int j = 0; j < i; ++j) total += (alpha(i, j) = unif(rng));
    for (int j = 0; j < i; ++j) {
      alpha(i, j) /= total;
      beta(i, j) = alpha(i, j) * unif(rng);
    }
  }
  const double total = oracle_butcher(ShuOsherForm(alpha, beta)).second.sum();
  return ShuOsherForm(alpha, beta / total);
}

// Butcher coefficients by expanding u^{(i)} in terms of stage derivatives.
std::pair<Matrix, Vector> oracle_butcher(const ShuOsherForm& so) {
  const int s = so.stages();
  Matrix K = Matrix::Zero(s + 1, s);
  for (int i = 1; i <= s; ++i)
    for (int j = 0; j < i; ++j) {
      K.row(i) += so.alpha()(i, j) * K.row(j);
      if (j < s) K(i, j) += so.beta()(i, j);
    }
  return {K.topRows(s), K.row(s).transpose()};
}

}  // namespace

TEST_SUITE("tableau") {
  TEST_CASE("coefficient parsing") {
    CHECK(parse_coefficient("59/128") == doctest::Approx(59.0 / 128.0).epsilon(1e-16));
    CHECK(parse_coefficient("0.387392167970373") == 0.387392167970373);
    CHECK(parse_coefficient(" -3 ") == -3.0);
    CHECK(parse_coefficient("1/3") == 1.0 / 3.0);
    CHECK_THROWS_AS(parse_coefficient("1/0"), InvalidArgument);
    CHECK_THROWS_AS(parse_coefficient("abc"), InvalidArgument);
  }

  TEST_CASE("butcher invariants are enforced") {
    Matrix A = Matrix::Zero(2, 2);
    A(1, 0) = 1.0;
    CHECK_NOTHROW(ButcherTableau("heun", 2, A, Vector::Constant(2, 0.5)));
    CHECK_THROWS_AS(ButcherTableau("bad-b", 2, A, Vector::Constant(2, 0.6)), InvalidArgument);
    Matrix implicit = A;
    implicit(0, 0) = 0.5;
    CHECK_THROWS_AS(ButcherTableau("implicit", 2, implicit, Vector::Constant(2, 0.5)), InvalidArgument);
    CHECK_THROWS_AS(ButcherTableau("bad-c", 2, A, Vector::Constant(2, 0.5), Vector::Zero(2)), InvalidArgument);
    CHECK_THROWS_AS(ButcherTableau("bad-order", 5, A, Vector::Constant(2, 0.5)), InvalidArgument);
  }

  TEST_CASE("shu-osher rows must sum to one") {
    Matrix alpha = Matrix::Zero(2, 2), beta = Matrix::Zero(2, 2);
    alpha(1, 0) = 0.9;
    CHECK_THROWS_AS(ShuOsherForm(alpha, beta), InvalidArgument);
  }

  TEST_CASE("order residuals of classical tableaus") {
    const auto& ssp33 = get_method("eSSPRK(3,3)");
    const auto report = order_residuals(ssp33.tableau);
    CHECK(report.achieved_order == 3);
    CHECK(std::abs(report.residuals.at("bAAc") + 1.0 / 24.0) < 1e-15);

    Matrix A = Matrix::Zero(4, 4);
    A(1, 0) = 0.5;
    A(2, 1) = 0.5;
    A(3, 2) = 1.0;
    Vector b(4);
    b << 1.0 / 6, 1.0 / 3, 1.0 / 3, 1.0 / 6;
    const auto rk4 = order_residuals(ButcherTableau("rk4", 4, A, b));
    CHECK(rk4.achieved_order == 4);
    for (const auto& [tag, r] : rk4.residuals) CHECK(std::abs(r) < 1e-15);
  }

  TEST_CASE("a corrupted weight breaks the order conditions") {
    const auto& m = get_method("eSSPRK+(3,3)");
    Vector b = m.tableau.b();
    b(0) += 1e-3;
    const auto report = order_residuals(m.tableau.A(), b);
    CHECK(report.achieved_order == 0);
    CHECK(std::abs(report.residuals.at("b.e") - 1e-3) < 1e-12);
  }

  TEST_CASE("shu-osher to butcher matches a direct expansion") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
      const int s = 2 + trial % 6;
      const ShuOsherForm so = random_shu_osher(s, rng);
      const auto [A, b] = oracle_butcher(so);
      const ButcherTableau t = shu_osher_to_butcher(so);
      CHECK((t.A() - A).lpNorm<Eigen::Infinity>() < 1e-14);
      CHECK((t.b() - b).lpNorm<Eigen::Infinity>() < 1e-14);
    }
  }

  TEST_CASE("canonical shu-osher round trip") {
    for (const auto& m : all_methods()) {
      CAPTURE(m->name());
      for (double r : {0.0, 0.3, 0.999 * m->claimed_C}) {
        const ShuOsherForm so = butcher_to_canonical_shu_osher(m->tableau, r);
        const ButcherTableau back = shu_osher_to_butcher(so, m->name(), m->order());
        CHECK((back.A() - m->tableau.A()).lpNorm<Eigen::Infinity>() < 1e-12);
        CHECK((back.b() - m->tableau.b()).lpNorm<Eigen::Infinity>() < 1e-12);
      }
      if (m->shu_osher) {
        const ButcherTableau from_printed = shu_osher_to_butcher(*m->shu_osher, m->name(), m->order());
        CHECK((from_printed.A() - m->tableau.A()).lpNorm<Eigen::Infinity>() < 1e-14);
      }
    }
  }

  TEST_CASE("canonical form at the SSP coefficient is admissible") {
    for (const auto& m : all_methods()) {
      CAPTURE(m->name());
      const double r = 0.999 * m->claimed_C;
      const ShuOsherForm so = butcher_to_canonical_shu_osher(m->tableau, r);
      CHECK(so.is_ssp_admissible(1e-12));
      CHECK(so.ratio_bound() >= r - 1e-9);
    }
  }

  TEST_CASE("abscissa ordering") {
    CHECK_FALSE(abscissas_nondecreasing(get_method("eSSPRK(3,3)").tableau));
    CHECK(abscissas_nondecreasing(get_method("eSSPRK+(3,3)").tableau));
    Vector c(3);
    c << 0.0, 0.5, 1.2;
    CHECK_FALSE(abscissas_nondecreasing(c));
  }

  TEST_CASE("json round trip is exact") {
    const auto dir = std::filesystem::temp_directory_path() / "sspif_tableau_test";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    for (const auto& m : all_methods()) {
      const std::string path = (dir / "t.json").string();
      save_tableau(m->tableau, path);
      const ButcherTableau back = load_tableau(path);
      CHECK(back.name() == m->name());
      CHECK(back.order() == m->order());
      CHECK(back.A() == m->tableau.A());
      CHECK(back.b() == m->tableau.b());
    }
    nlohmann::json j;
    j["name"] = "frac";
    j["order"] = 2;
    j["A"] = nlohmann::json::array({nlohmann::json::array({"0", "0"}), nlohmann::json::array({"1/2", 0})});
    j["b"] = nlohmann::json::array({0, "1"});
    const ButcherTableau t = tableau_from_json(j);
    CHECK(t.c()(1) == 0.5);
    std::filesystem::remove_all(dir);
  }
}
