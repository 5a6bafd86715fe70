#pragma once

#include "sspif/types.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace sspif {

/// Parses "p/q", a decimal, or an integer literal into a double.
double parse_coefficient(std::string_view text);

/// Explicit Runge--Kutta method in Butcher form (A strictly lower triangular,
/// c = A e, sum(b) = 1).  Immutable once constructed.
class ButcherTableau {
 public:
  /// Throws InvalidArgument when an invariant fails.  When `c` is omitted it
  /// is computed as A e; when supplied it must agree with A e to 1e-13.
  ButcherTableau(std::string name, int order, Matrix A, Vector b,
                 std::optional<Vector> c = std::nullopt);

  const std::string& name() const { return name_; }
  int order() const { return order_; }
  int stages() const { return static_cast<int>(b_.size()); }
  const Matrix& A() const { return A_; }
  const Vector& b() const { return b_; }
  const Vector& c() const { return c_; }

  /// Stacked (s+1)x(s+1) matrix [[A, 0], [b^T, 0]].
  Matrix stacked() const;

 private:
  std::string name_;
  int order_;
  Matrix A_;
  Vector b_;
  Vector c_;
};

/// Shu--Osher representation.  Row i (1..s) of alpha/beta holds the
/// coefficients of u^{(i)} in terms of u^{(0)} .. u^{(i-1)}; row 0 is empty.
class ShuOsherForm {
 public:
  /// Throws InvalidArgument unless both matrices are (s+1)x(s+1), strictly
  /// lower triangular, and every alpha row 1..s sums to 1 within 1e-13.
  ShuOsherForm(Matrix alpha, Matrix beta);

  int stages() const { return static_cast<int>(alpha_.rows()) - 1; }
  const Matrix& alpha() const { return alpha_; }
  const Matrix& beta() const { return beta_; }

  /// alpha, beta >= -tol componentwise and alpha == 0 implies beta == 0.
  bool is_ssp_admissible(double tol = 1e-12) const;

  /// min over beta_ij > 0 of alpha_ij / beta_ij (+inf when every beta is 0).
  /// Only meaningful for admissible forms.
  double ratio_bound() const;

 private:
  Matrix alpha_;
  Matrix beta_;
};

struct OrderReport {
  /// Keys: "b.e", "b.c", "b.cc", "bAc", "b.ccc", "b.cAc", "bA.cc", "bAAc".
  std::map<std::string, double> residuals;
  int achieved_order = 0;
};

/// The eight order conditions through order four, as (tag, order) pairs in
/// evaluation order.
struct OrderCondition {
  const char* tag;
  int order;
};
inline constexpr OrderCondition kOrderConditions[] = {
    {"b.e", 1},   {"b.c", 2},    {"b.cc", 3},  {"bAc", 3},
    {"b.ccc", 4}, {"b.cAc", 4}, {"bA.cc", 4}, {"bAAc", 4},
};
inline constexpr double kOrderTolerance = 1e-10;

ButcherTableau shu_osher_to_butcher(const ShuOsherForm& so, std::string name = "",
                                    int order = 1);

/// Canonical form at parameter r: v = (I + rS)^{-1} e, P = r (I + rS)^{-1} S,
/// alpha_{i0} = v_i + P_{i0}, alpha_{ij} = P_{ij}, beta = (I + rS)^{-1} S.
ShuOsherForm butcher_to_canonical_shu_osher(const ButcherTableau& t, double r);

OrderReport order_residuals(const ButcherTableau& t);
/// Same as above on raw coefficients (c = A e); used by certificate checks
/// that must not reject inconsistent input up front.
OrderReport order_residuals(const Matrix& A, const Vector& b);

bool abscissas_nondecreasing(const ButcherTableau& t);
bool abscissas_nondecreasing(const Vector& c);

}  // namespace sspif
