#pragma once

#include "sspif/integrators.hpp"

#include <array>
#include <string>

namespace sspif {

/// Periodic grid x_i = i/n on [0, 1).
struct Grid1D {
  explicit Grid1D(Eigen::Index cells);

  Eigen::Index n;
  double dx;
  double x(Eigen::Index i) const { return static_cast<double>(i) * dx; }
};

/// Dense circulant discretization of -a u_x: row i is (a/dx)(u_{i-1} - u_i).
/// Negative a (downwinding) is rejected.
Matrix upwind_matrix(const Grid1D& grid, double a);

/// Matrix-free application of the same operator.
Vector apply_upwind(const Grid1D& grid, double a, const Vector& u);

/// Regularization added to the smoothness indicators.  Small enough that
/// the scheme adds no O(eps) overshoot at a discontinuity.
inline constexpr double kDefaultWenoEps = 1e-40;

/// Classical fifth-order WENO reconstruction at the right face of the
/// central value v[2] from the stencil v[0..4] (left-biased).
double weno5_reconstruct(const std::array<double, 5>& v, double eps = kDefaultWenoEps);

/// Linear-weight (0.1, 0.6, 0.3) fifth-order reconstruction of the same face.
double weno5_linear_reconstruct(const std::array<double, 5>& v);

/// Approximates -(u^2/2)_x with global Lax--Friedrichs splitting and WENO5
/// reconstruction of each split flux.  Throws NonFinite for non-finite u.
Vector weno5_burgers_rhs(const Grid1D& grid, const Vector& u, double eps = kDefaultWenoEps);

enum class ProblemKind { LinearAdvectionStep, AdvectionBurgersStep, AdvectionBurgersSmooth, VanDerPol };

/// A semi-discretization with its initial state.
struct ProblemSetup {
  ProblemKind kind = ProblemKind::LinearAdvectionStep;
  double a = 0.0;
  Grid1D grid{8};
  SemiDiscretization system;
  Vector initial;
};

/// kind: LinearAdvectionStep (L = upwind(a), N = upwind(1), step on
/// [1/4, 3/4]); AdvectionBurgersStep (N = WENO5 Burgers, step on [0, 1/2]);
/// AdvectionBurgersSmooth (u0 = exp(sin 2 pi x)); VanDerPol (2x2 system;
/// `n` ignored, `a` selects splitting: 0 -> (a), 1 -> (b)).
/// `weno_eps` is the WENO regularization of the Burgers problems.
ProblemSetup make_problem(ProblemKind kind, double a, Eigen::Index n, double weno_eps = kDefaultWenoEps);

/// The van der Pol splitting 'a' or 'b' with u0 = (2, 0).
ProblemSetup make_van_der_pol(char splitting);

ProblemKind parse_problem_kind(const std::string& text);
const char* to_string(ProblemKind kind);

}  // namespace sspif
