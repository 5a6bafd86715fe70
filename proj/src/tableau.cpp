#include "sspif/tableau.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

namespace sspif {

namespace {

double parse_plain(std::string_view text) {
  std::string s(text);
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(s, &used);
  } catch (const std::exception&) {
    throw InvalidArgument("cannot parse coefficient '" + s + "'");
  }
  while (used < s.size() && std::isspace(static_cast<unsigned char>(s[used]))) ++used;
  if (used != s.size()) throw InvalidArgument("trailing characters in coefficient '" + s + "'");
  return value;
}

bool strictly_lower(const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = i; j < m.cols(); ++j)
      if (m(i, j) != 0.0) return false;
  return true;
}

}  // namespace

double parse_coefficient(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return parse_plain(text);
  const double num = parse_plain(text.substr(0, slash));
  const double den = parse_plain(text.substr(slash + 1));
  if (den == 0.0) throw InvalidArgument("zero denominator in '" + std::string(text) + "'");
  return num / den;
}

ButcherTableau::ButcherTableau(std::string name, int order, Matrix A, Vector b,
                               std::optional<Vector> c)
    : name_(std::move(name)), order_(order), A_(std::move(A)), b_(std::move(b)) {
  const auto s = b_.size();
  if (s < 1) throw InvalidArgument(name_ + ": tableau needs at least one stage");
  if (A_.rows() != s || A_.cols() != s) throw InvalidArgument(name_ + ": A must be s x s");
  if (!A_.allFinite() || !b_.allFinite()) throw InvalidArgument(name_ + ": non-finite coefficient");
  if (!strictly_lower(A_)) throw InvalidArgument(name_ + ": A is not strictly lower triangular");
  if (order_ < 1 || order_ > 4) throw InvalidArgument(name_ + ": claimed order must be 1..4");
  if (std::abs(b_.sum() - 1.0) > 1e-13) throw InvalidArgument(name_ + ": weights do not sum to 1");
  const Vector ae = A_.rowwise().sum();
  if (c) {
    if (c->size() != s) throw InvalidArgument(name_ + ": c has wrong length");
    if ((*c - ae).cwiseAbs().maxCoeff() > 1e-13) throw InvalidArgument(name_ + ": c != A e");
    c_ = *c;
  } else {
    c_ = ae;
  }
}

Matrix ButcherTableau::stacked() const {
  const int s = stages();
  Matrix S = Matrix::Zero(s + 1, s + 1);
  S.topLeftCorner(s, s) = A_;
  S.block(s, 0, 1, s) = b_.transpose();
  return S;
}

ShuOsherForm::ShuOsherForm(Matrix alpha, Matrix beta) : alpha_(std::move(alpha)), beta_(std::move(beta)) {
  const auto n = alpha_.rows();
  if (n < 2 || alpha_.cols() != n || beta_.rows() != n || beta_.cols() != n)
    throw InvalidArgument("Shu-Osher matrices must both be (s+1)x(s+1) with s >= 1");
  if (!alpha_.allFinite() || !beta_.allFinite()) throw InvalidArgument("non-finite Shu-Osher coefficient");
  if (!strictly_lower(alpha_) || !strictly_lower(beta_))
    throw InvalidArgument("Shu-Osher matrices must be strictly lower triangular");
  for (Eigen::Index i = 1; i < n; ++i) {
    if (std::abs(alpha_.row(i).sum() - 1.0) > 1e-13) {
      std::ostringstream msg;
      msg << "alpha row " << i << " sums to " << alpha_.row(i).sum() << ", not 1";
      throw InvalidArgument(msg.str());
    }
  }
}

bool ShuOsherForm::is_ssp_admissible(double tol) const {
  for (Eigen::Index i = 0; i < alpha_.rows(); ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      if (alpha_(i, j) < -tol || beta_(i, j) < -tol) return false;
      if (alpha_(i, j) == 0.0 && beta_(i, j) > tol) return false;
    }
  }
  return true;
}

double ShuOsherForm::ratio_bound() const {
  double bound = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < alpha_.rows(); ++i)
    for (Eigen::Index j = 0; j < i; ++j)
      if (beta_(i, j) > 0.0) bound = std::min(bound, alpha_(i, j) / beta_(i, j));
  return bound;
}

ButcherTableau shu_osher_to_butcher(const ShuOsherForm& so, std::string name, int order) {
  const int s = so.stages();
  // K.row(i): u^{(i)} = u^n + dt * sum_k K(i,k) F(u^{(k)}).
  Matrix K = Matrix::Zero(s + 1, s + 1);
  for (int i = 1; i <= s; ++i) {
    for (int j = 0; j < i; ++j) {
      K.row(i) += so.alpha()(i, j) * K.row(j);
      K(i, j) += so.beta()(i, j);
    }
  }
  Matrix A = K.topLeftCorner(s, s);
  // Forward substitution leaves round-off-level values only below the diagonal.
  A.triangularView<Eigen::Upper>().setZero();
  Vector b = K.block(s, 0, 1, s).transpose();
  return ButcherTableau(std::move(name), order, std::move(A), std::move(b));
}

ShuOsherForm butcher_to_canonical_shu_osher(const ButcherTableau& t, double r) {
  if (!(r >= 0.0)) throw InvalidArgument("canonical Shu-Osher form needs r >= 0");
  const int n = t.stages() + 1;
  const Matrix S = t.stacked();
  const Matrix M = Matrix::Identity(n, n) + r * S;
  // M is unit lower triangular; invert by forward substitution.
  const Matrix R = M.triangularView<Eigen::UnitLower>().solve(Matrix::Identity(n, n));
  const double cond = M.cwiseAbs().colwise().sum().maxCoeff() * R.cwiseAbs().colwise().sum().maxCoeff();
  if (!std::isfinite(cond) || cond > 1e14) throw SingularTransform("I + rS is numerically singular");
  const Vector v = R.rowwise().sum();
  Matrix beta = R * S;
  Matrix alpha = r * beta;
  alpha.col(0) += v;
  alpha.row(0).setZero();
  beta.row(0).setZero();
  alpha.triangularView<Eigen::Upper>().setZero();
  beta.triangularView<Eigen::Upper>().setZero();
  return ShuOsherForm(std::move(alpha), std::move(beta));
}

OrderReport order_residuals(const Matrix& A, const Vector& b) {
  const Vector e = Vector::Ones(b.size());
  const Vector c = A * e;
  const Vector cc = c.cwiseProduct(c);
  const Vector Ac = A * c;
  OrderReport report;
  auto& r = report.residuals;
  r["b.e"] = b.dot(e) - 1.0;
  r["b.c"] = b.dot(c) - 1.0 / 2.0;
  r["b.cc"] = b.dot(cc) - 1.0 / 3.0;
  r["bAc"] = b.dot(Ac) - 1.0 / 6.0;
  r["b.ccc"] = b.dot(cc.cwiseProduct(c)) - 1.0 / 4.0;
  r["b.cAc"] = b.dot(c.cwiseProduct(Ac)) - 1.0 / 8.0;
  r["bA.cc"] = b.dot(A * cc) - 1.0 / 12.0;
  r["bAAc"] = b.dot(A * Ac) - 1.0 / 24.0;
  int achieved = 4;
  for (const auto& cond : kOrderConditions) {
    if (!(std::abs(r[cond.tag]) <= kOrderTolerance)) achieved = std::min(achieved, cond.order - 1);
  }
  report.achieved_order = achieved;
  return report;
}

OrderReport order_residuals(const ButcherTableau& t) { return order_residuals(t.A(), t.b()); }

bool abscissas_nondecreasing(const Vector& c) {
  for (Eigen::Index i = 0; i + 1 < c.size(); ++i)
    if (c(i) > c(i + 1) + 1e-13) return false;
  return c.size() == 0 || c(c.size() - 1) <= 1.0 + 1e-13;
}

bool abscissas_nondecreasing(const ButcherTableau& t) { return abscissas_nondecreasing(t.c()); }

}  // namespace sspif
