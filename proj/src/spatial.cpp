#include "sspif/spatial.hpp"

#include <cmath>
#include <numbers>

namespace sspif {

Grid1D::Grid1D(Eigen::Index cells) : n(cells), dx(1.0 / static_cast<double>(cells)) {
  if (cells < 8) throw InvalidArgument("grid needs at least 8 cells");
}

Matrix upwind_matrix(const Grid1D& grid, double a) {
  if (!(a >= 0.0)) throw InvalidArgument("upwind_matrix needs a >= 0 (downwinding is not supported)");
  const Eigen::Index n = grid.n;
  const double k = a / grid.dx;
  Matrix M = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    M(i, i) = -k;
    M(i, (i + n - 1) % n) += k;
  }
  return M;
}

Vector apply_upwind(const Grid1D& grid, double a, const Vector& u) {
  const Eigen::Index n = grid.n;
  const double k = a / grid.dx;
  Vector out(n);
  out(0) = k * (u(n - 1) - u(0));
  for (Eigen::Index i = 1; i < n; ++i) out(i) = k * (u(i - 1) - u(i));
  return out;
}

namespace {

constexpr std::array<double, 3> kLinearWeights = {0.1, 0.6, 0.3};

std::array<double, 3> candidate_fluxes(const std::array<double, 5>& v) {
  return {(2.0 * v[0] - 7.0 * v[1] + 11.0 * v[2]) / 6.0,
          (-v[1] + 5.0 * v[2] + 2.0 * v[3]) / 6.0,
          (2.0 * v[2] + 5.0 * v[3] - v[4]) / 6.0};
}

}  // namespace

double weno5_reconstruct(const std::array<double, 5>& v, double eps) {
  const auto q = candidate_fluxes(v);
  const double b0 = 13.0 / 12.0 * std::pow(v[0] - 2.0 * v[1] + v[2], 2) +
                    0.25 * std::pow(v[0] - 4.0 * v[1] + 3.0 * v[2], 2);
  const double b1 = 13.0 / 12.0 * std::pow(v[1] - 2.0 * v[2] + v[3], 2) + 0.25 * std::pow(v[1] - v[3], 2);
  const double b2 = 13.0 / 12.0 * std::pow(v[2] - 2.0 * v[3] + v[4], 2) +
                    0.25 * std::pow(3.0 * v[2] - 4.0 * v[3] + v[4], 2);
  const double w0 = kLinearWeights[0] / ((eps + b0) * (eps + b0));
  const double w1 = kLinearWeights[1] / ((eps + b1) * (eps + b1));
  const double w2 = kLinearWeights[2] / ((eps + b2) * (eps + b2));
  return (w0 * q[0] + w1 * q[1] + w2 * q[2]) / (w0 + w1 + w2);
}

double weno5_linear_reconstruct(const std::array<double, 5>& v) {
  const auto q = candidate_fluxes(v);
  return kLinearWeights[0] * q[0] + kLinearWeights[1] * q[1] + kLinearWeights[2] * q[2];
}

Vector weno5_burgers_rhs(const Grid1D& grid, const Vector& u, double eps) {
  require_finite(u, "WENO5 input");
  const Eigen::Index n = grid.n;
  if (u.size() != n) throw InvalidArgument("state size does not match grid");
  const double alpha = u.cwiseAbs().maxCoeff();
  Vector fp(n), fm(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double f = 0.5 * u(i) * u(i);
    fp(i) = 0.5 * (f + alpha * u(i));
    fm(i) = 0.5 * (f - alpha * u(i));
  }
  auto at = [n](const Vector& v, Eigen::Index i) { return v(((i % n) + n) % n); };
  // flux(i) approximates f at x_{i+1/2}.
  Vector flux(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double plus = weno5_reconstruct({at(fp, i - 2), at(fp, i - 1), at(fp, i), at(fp, i + 1), at(fp, i + 2)}, eps);
    const double minus = weno5_reconstruct({at(fm, i + 3), at(fm, i + 2), at(fm, i + 1), at(fm, i), at(fm, i - 1)}, eps);
    flux(i) = plus + minus;
  }
  Vector rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) rhs(i) = -(flux(i) - at(flux, i - 1)) / grid.dx;
  return rhs;
}

ProblemSetup make_van_der_pol(char splitting) {
  ProblemSetup p;
  p.kind = ProblemKind::VanDerPol;
  p.a = splitting == 'a' ? 0.0 : 1.0;
  SemiDiscretization& sys = p.system;
  sys.n = 2;
  sys.dx = 1.0;
  if (splitting == 'a') {
    sys.L = (Matrix(2, 2) << 0.0, 1.0, -1.0, 1.0).finished();
    sys.N = [](const Vector& u) { return Vector((Vector(2) << 0.0, -u(0) * u(0) * u(1)).finished()); };
  } else if (splitting == 'b') {
    sys.L = (Matrix(2, 2) << 0.0, 1.0, -1.0, 0.0).finished();
    sys.N = [](const Vector& u) { return Vector((Vector(2) << 0.0, (1.0 - u(0) * u(0)) * u(1)).finished()); };
  } else {
    throw InvalidArgument("van der Pol splitting must be 'a' or 'b'");
  }
  p.initial = (Vector(2) << 2.0, 0.0).finished();
  return p;
}

ProblemSetup make_problem(ProblemKind kind, double a, Eigen::Index n, double weno_eps) {
  if (kind == ProblemKind::VanDerPol) {
    if (a != 0.0 && a != 1.0) throw InvalidArgument("van der Pol: a selects the splitting (0 -> a, 1 -> b)");
    return make_van_der_pol(a == 0.0 ? 'a' : 'b');
  }
  if (!(a >= 0.0)) throw InvalidArgument("wavespeed a must be >= 0");
  if (!(weno_eps > 0.0)) throw InvalidArgument("WENO epsilon must be positive");
  ProblemSetup p;
  p.kind = kind;
  p.a = a;
  p.grid = Grid1D(n);
  const Grid1D grid = p.grid;
  SemiDiscretization& sys = p.system;
  sys.n = n;
  sys.dx = grid.dx;
  sys.L = upwind_matrix(grid, a);
  sys.apply_L = [grid, a](const Vector& u) { return apply_upwind(grid, a, u); };
  sys.fe_dt_linear = a > 0.0 ? grid.dx / a : std::numeric_limits<double>::infinity();
  sys.fe_dt_nonlinear = grid.dx;
  p.initial.resize(n);
  switch (kind) {
    case ProblemKind::LinearAdvectionStep:
      sys.N = [grid](const Vector& u) { return apply_upwind(grid, 1.0, u); };
      for (Eigen::Index i = 0; i < n; ++i) {
        const double x = grid.x(i);
        p.initial(i) = (x >= 0.25 && x <= 0.75) ? 1.0 : 0.0;
      }
      break;
    case ProblemKind::AdvectionBurgersStep:
      sys.N = [grid, weno_eps](const Vector& u) { return weno5_burgers_rhs(grid, u, weno_eps); };
      for (Eigen::Index i = 0; i < n; ++i) p.initial(i) = grid.x(i) <= 0.5 ? 1.0 : 0.0;
      break;
    case ProblemKind::AdvectionBurgersSmooth:
      sys.N = [grid, weno_eps](const Vector& u) { return weno5_burgers_rhs(grid, u, weno_eps); };
      for (Eigen::Index i = 0; i < n; ++i) p.initial(i) = std::exp(std::sin(2.0 * std::numbers::pi * grid.x(i)));
      break;
    case ProblemKind::VanDerPol:
      break;
  }
  return p;
}

ProblemKind parse_problem_kind(const std::string& text) {
  if (text == "ex3" || text == "LinearAdvectionStep") return ProblemKind::LinearAdvectionStep;
  if (text == "ex4" || text == "AdvectionBurgersStep") return ProblemKind::AdvectionBurgersStep;
  if (text == "ex2" || text == "AdvectionBurgersSmooth") return ProblemKind::AdvectionBurgersSmooth;
  if (text == "ex1" || text == "VanDerPol") return ProblemKind::VanDerPol;
  throw InvalidArgument("unknown problem '" + text + "' (expected ex1, ex2, ex3 or ex4)");
}

const char* to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::LinearAdvectionStep: return "LinearAdvectionStep";
    case ProblemKind::AdvectionBurgersStep: return "AdvectionBurgersStep";
    case ProblemKind::AdvectionBurgersSmooth: return "AdvectionBurgersSmooth";
    case ProblemKind::VanDerPol: return "VanDerPol";
  }
  return "?";
}

}  // namespace sspif
