#include "sspif/ssp_radius.hpp"

#include <cmath>
#include <random>

namespace sspif {

CanonicalShuOsher canonical_form(const ButcherTableau& t, double r) {
  if (!(r >= 0.0)) throw InvalidArgument("canonical form needs r >= 0");
  const int n = t.stages() + 1;
  CanonicalShuOsher form;
  form.r = r;
  form.S = t.stacked();
  const Matrix M = Matrix::Identity(n, n) + r * form.S;
  const Matrix R = M.triangularView<Eigen::UnitLower>().solve(Matrix::Identity(n, n));
  const double cond = M.cwiseAbs().colwise().sum().maxCoeff() * R.cwiseAbs().colwise().sum().maxCoeff();
  if (!std::isfinite(cond) || cond > 1e14) throw SingularTransform("I + rS is numerically singular");
  form.v = R.rowwise().sum();
  form.P = r * R * form.S;
  return form;
}

bool is_absolutely_monotonic(const ButcherTableau& t, double r) {
  const CanonicalShuOsher form = canonical_form(t, r);
  return form.v.minCoeff() >= -kMonotonicityTolerance && form.P.minCoeff() >= -kMonotonicityTolerance;
}

namespace {

bool feasible_or_false(const ButcherTableau& t, double r) {
  try {
    return is_absolutely_monotonic(t, r);
  } catch (const SingularTransform&) {
    return false;
  }
}

}  // namespace

RadiusResult ssp_radius(const ButcherTableau& t) {
  double lo = 0.0;
  double hi = 2.0 * t.stages();
  RadiusResult result;
  if (feasible_or_false(t, hi)) {
    lo = hi;
  } else {
    while (hi - lo > 1e-10) {
      const double mid = 0.5 * (lo + hi);
      (feasible_or_false(t, mid) ? lo : hi) = mid;
    }
  }
  result.radius = lo;
  result.bisection_width = hi - lo;
  result.feasible_form = canonical_form(t, lo);
  return result;
}

std::complex<double> stability_polynomial(const ButcherTableau& t, std::complex<double> z) {
  using cvec = Eigen::VectorXcd;
  const int s = t.stages();
  // (I - zA) y = e by forward substitution.
  cvec y(s);
  for (int i = 0; i < s; ++i) {
    std::complex<double> acc = 1.0;
    for (int j = 0; j < i; ++j) acc += z * t.A()(i, j) * y(j);
    y(i) = acc;
  }
  std::complex<double> by = 0.0;
  for (int i = 0; i < s; ++i) by += t.b()(i) * y(i);
  return 1.0 + z * by;
}

namespace {

bool l2_stable(const ButcherTableau& t, const Matrix& M, double lambda, int n_steps, const Vector& u0) {
  const int s = t.stages();
  const double bound = (1.0 + 1e-10) * u0.norm();
  Vector u = u0;
  std::vector<Vector> k(static_cast<std::size_t>(s));
  for (int step = 0; step < n_steps; ++step) {
    for (int i = 0; i < s; ++i) {
      Vector stage = u;
      for (int j = 0; j < i; ++j)
        if (t.A()(i, j) != 0.0) stage += t.A()(i, j) * k[static_cast<std::size_t>(j)];
      k[static_cast<std::size_t>(i)].noalias() = lambda * (M * stage);
    }
    for (int i = 0; i < s; ++i) u += t.b()(i) * k[static_cast<std::size_t>(i)];
    const double norm = u.norm();
    if (!std::isfinite(norm) || norm > bound) return false;
  }
  return true;
}

}  // namespace

double observed_l2_cfl(const ButcherTableau& t, const Matrix& M, double lambda_max, int n_steps,
                       std::uint64_t seed) {
  if (M.rows() != M.cols()) throw InvalidArgument("observed_l2_cfl needs a square matrix");
  if (!(lambda_max > 0.0)) throw InvalidArgument("lambda_max must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Vector u0(M.rows());
  for (Eigen::Index i = 0; i < u0.size(); ++i) u0(i) = normal(rng);
  u0 /= u0.norm();

  if (l2_stable(t, M, lambda_max, n_steps, u0)) return lambda_max;
  double lo = 0.0;
  double hi = lambda_max;
  while (hi - lo > 1e-3) {
    const double mid = 0.5 * (lo + hi);
    (l2_stable(t, M, mid, n_steps, u0) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace sspif
