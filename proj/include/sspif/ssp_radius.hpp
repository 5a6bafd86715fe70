#pragma once

#include "sspif/tableau.hpp"

#include <complex>
#include <cstdint>

namespace sspif {

/// v = (I + rS)^{-1} e and P = r (I + rS)^{-1} S for the stacked matrix S.
struct CanonicalShuOsher {
  double r = 0.0;
  Vector v;
  Matrix P;
  Matrix S;
};

struct RadiusResult {
  double radius = 0.0;
  CanonicalShuOsher feasible_form;
  double bisection_width = 0.0;
};

inline constexpr double kMonotonicityTolerance = 1e-12;

/// Throws SingularTransform when cond_1(I + rS) exceeds 1e14.
CanonicalShuOsher canonical_form(const ButcherTableau& t, double r);

/// True iff v and P at r are both >= -1e-12 componentwise.
bool is_absolutely_monotonic(const ButcherTableau& t, double r);

/// Radius of absolute monotonicity by bisection over [0, 2s] to width 1e-10.
RadiusResult ssp_radius(const ButcherTableau& t);

/// R(z) = 1 + z b^T (I - zA)^{-1} e.
std::complex<double> stability_polynomial(const ButcherTableau& t, std::complex<double> z);

/// Largest lambda <= lambda_max (bisection width 1e-3) for which stepping
/// u' = lambda M u with unit step keeps ||u^n||_2 <= (1 + 1e-10) ||u^0||_2 for
/// all n <= n_steps, from a fixed-seed random unit u^0.
double observed_l2_cfl(const ButcherTableau& t, const Matrix& M, double lambda_max, int n_steps,
                       std::uint64_t seed = 20180417);

}  // namespace sspif
