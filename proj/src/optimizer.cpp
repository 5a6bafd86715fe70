#include "sspif/optimizer.hpp"

#include "sspif/analysis.hpp"
#include "sspif/ssp_radius.hpp"
#include "sspif/tableau_json.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <optional>
#include <random>
#include <sstream>
#include <thread>

namespace sspif {

void validate(const OptimizationSpec& spec) {
  if (spec.p < 1 || spec.p > 4) throw InvalidArgument("order must be between 1 and 4");
  if (spec.s < spec.p) throw InvalidArgument("need at least as many stages as the order");
  if (spec.p == 4 && spec.s < 5) throw InvalidArgument("explicit fourth-order SSP methods need s >= 5");
  if (spec.restarts < 1) throw InvalidArgument("restarts must be positive");
  if (!(spec.r_tolerance > 0.0)) throw InvalidArgument("r_tolerance must be positive");
}

namespace {

constexpr double kStartRadius = 1e-3;
constexpr double kSolveTolerance = 1e-13;
constexpr int kRandomStarts = 3;

// Unknowns are the strictly lower triangular entries of the canonical
// Shu--Osher matrix P at fixed r.  With P >= 0 and v = e - P e >= 0 the
// method is absolutely monotonic at r by construction, and the stacked
// Butcher matrix is S = P (I - P)^{-1} / r.
struct Layout {
  int s = 0;
  int p = 0;
  bool nondecreasing = false;
  std::vector<std::pair<int, int>> entries;

  explicit Layout(const OptimizationSpec& spec) : s(spec.s), p(spec.p), nondecreasing(spec.require_nondecreasing) {
    for (int i = 1; i <= s; ++i)
      for (int j = 0; j < i; ++j) entries.emplace_back(i, j);
  }
  Eigen::Index size() const { return static_cast<Eigen::Index>(entries.size()); }

  Matrix unpack(const Vector& x) const {
    Matrix P = Matrix::Zero(s + 1, s + 1);
    for (Eigen::Index k = 0; k < size(); ++k) P(entries[k].first, entries[k].second) = x(k);
    return P;
  }
  Vector pack(const Matrix& P) const {
    Vector x(size());
    for (Eigen::Index k = 0; k < size(); ++k) x(k) = P(entries[k].first, entries[k].second);
    return x;
  }
};

Matrix stacked_from_P(const Matrix& P, double r) {
  const Eigen::Index m = P.rows();
  const Matrix IP = Matrix::Identity(m, m) - P;
  // S (I - P) = P / r, solved as (I - P)^T S^T = P^T / r.
  const Matrix St = IP.transpose().triangularView<Eigen::Upper>().solve(P.transpose() / r);
  return St.transpose();
}

Matrix P_from_stacked(const Matrix& S, double r) {
  const Eigen::Index m = S.rows();
  const Matrix M = Matrix::Identity(m, m) + r * S;
  return r * M.triangularView<Eigen::Lower>().solve(S);
}

void split(const Matrix& S, int s, Matrix& A, Vector& b) {
  A = S.topLeftCorner(s, s);
  b = S.row(s).head(s).transpose();
}

Vector residuals(const Layout& lay, const Vector& x, double r) {
  Matrix A;
  Vector b;
  split(stacked_from_P(lay.unpack(x), r), lay.s, A, b);
  const auto report = order_residuals(A, b);
  std::vector<double> out;
  for (const auto& cond : kOrderConditions)
    if (cond.order <= lay.p) out.push_back(report.residuals.at(cond.tag));
  if (lay.nondecreasing) {
    const Vector c = A.rowwise().sum();
    for (int i = 0; i + 1 < lay.s; ++i) out.push_back(std::max(0.0, c(i) - c(i + 1)));
    out.push_back(std::max(0.0, c(lay.s - 1) - 1.0));
  }
  return Eigen::Map<Vector>(out.data(), static_cast<Eigen::Index>(out.size()));
}

void project(const Layout& lay, Vector& x) {
  x = x.cwiseMax(0.0).cwiseMin(1.0);
  Eigen::Index k = 0;
  for (int i = 1; i <= lay.s; ++i) {
    double sum = 0.0;
    for (int j = 0; j < i; ++j) sum += x(k + j);
    if (sum > 1.0)
      for (int j = 0; j < i; ++j) x(k + j) /= sum;
    k += i;
  }
}

// Projected Levenberg--Marquardt on the residual vector; variables held at
// a bound by the gradient are frozen for the step.
bool solve_feasibility(const Layout& lay, Vector& x, double r, double& final_norm) {
  constexpr int kMaxIter = 600;
  constexpr double h = 1e-7;
  project(lay, x);
  Vector f = residuals(lay, x, r);
  double norm = f.squaredNorm();
  double mu = 1e-3;
  const Eigen::Index n = lay.size();
  for (int it = 0; it < kMaxIter; ++it) {
    if (f.lpNorm<Eigen::Infinity>() <= kSolveTolerance) {
      final_norm = std::sqrt(norm);
      return true;
    }
    Matrix J(f.size(), n);
    for (Eigen::Index k = 0; k < n; ++k) {
      Vector xp = x, xm = x;
      xp(k) += h;
      xm(k) -= h;
      J.col(k) = (residuals(lay, xp, r) - residuals(lay, xm, r)) / (2.0 * h);
    }
    const Vector g = J.transpose() * f;
    std::vector<Eigen::Index> free;
    for (Eigen::Index k = 0; k < n; ++k) {
      const bool at_low = x(k) <= 0.0 && g(k) > 0.0;
      const bool at_high = x(k) >= 1.0 && g(k) < 0.0;
      if (!at_low && !at_high) free.push_back(k);
    }
    if (free.empty()) break;
    Matrix JF(f.size(), static_cast<Eigen::Index>(free.size()));
    for (std::size_t q = 0; q < free.size(); ++q) JF.col(static_cast<Eigen::Index>(q)) = J.col(free[q]);
    const Matrix H = JF.transpose() * JF;
    const Vector rhs = -(JF.transpose() * f);
    bool improved = false;
    while (mu < 1e12) {
      Matrix Hd = H;
      Hd.diagonal().array() += mu * (1.0 + H.diagonal().array());
      const Vector delta = Hd.ldlt().solve(rhs);
      Vector trial = x;
      for (std::size_t q = 0; q < free.size(); ++q) trial(free[q]) += delta(static_cast<Eigen::Index>(q));
      project(lay, trial);
      const Vector ft = residuals(lay, trial, r);
      const double nt = ft.squaredNorm();
      if (std::isfinite(nt) && nt < norm) {
        x = trial;
        f = ft;
        norm = nt;
        mu = std::max(mu / 5.0, 1e-14);
        improved = true;
        break;
      }
      mu *= 4.0;
    }
    if (!improved) break;
  }
  final_norm = std::sqrt(norm);
  return f.lpNorm<Eigen::Infinity>() <= kSolveTolerance;
}

struct RestartOutcome {
  double r = 0.0;
  std::optional<ButcherTableau> tableau;
  double best_merit = std::numeric_limits<double>::infinity();
};

std::string method_name(const OptimizationSpec& spec) {
  std::ostringstream os;
  os << (spec.require_nondecreasing ? "opt-eSSPRK+(" : "opt-eSSPRK(") << spec.s << "," << spec.p << ")";
  return os.str();
}

std::optional<ButcherTableau> certify(const Layout& lay, const OptimizationSpec& spec, const Vector& x, double r,
                                      double& certified_r) {
  Matrix A;
  Vector b;
  split(stacked_from_P(lay.unpack(x), r), lay.s, A, b);
  const double drift = 1.0 - b.sum();
  if (std::abs(drift) > 1e-11) return std::nullopt;
  b(lay.s - 1) += drift;
  try {
    ButcherTableau t(method_name(spec), spec.p, A, b);
    if (order_residuals(t).achieved_order < spec.p) return std::nullopt;
    if (spec.require_nondecreasing && !abscissas_nondecreasing(t)) return std::nullopt;
    const double radius = ssp_radius(t).radius;
    if (radius < 1e-6 || !is_absolutely_monotonic(t, radius - 1e-6)) return std::nullopt;
    certified_r = radius;
    return t;
  } catch (const Error&) {
    return std::nullopt;
  }
}

RestartOutcome run_restart(const Layout& lay, const OptimizationSpec& spec, int index) {
  std::seed_seq seq{static_cast<std::uint32_t>(spec.seed), static_cast<std::uint32_t>(spec.seed >> 32),
                    static_cast<std::uint32_t>(index)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  auto random_start = [&] {
    Vector x(lay.size());
    Eigen::Index k = 0;
    for (int i = 1; i <= lay.s; ++i) {
      double total = unif(rng);
      for (int j = 0; j < i; ++j) total += (x(k + j) = unif(rng));
      for (int j = 0; j < i; ++j) x(k + j) /= total;
      k += i;
    }
    return x;
  };

  RestartOutcome out;
  auto attempt = [&](double r, const std::optional<Vector>& warm) -> std::optional<Vector> {
    std::vector<Vector> starts;
    if (warm) starts.push_back(*warm);
    for (int k = 0; k < kRandomStarts; ++k) starts.push_back(random_start());
    for (Vector x : starts) {
      double merit = 0.0;
      if (solve_feasibility(lay, x, r, merit)) return x;
      out.best_merit = std::min(out.best_merit, merit);
    }
    return std::nullopt;
  };

  auto first = attempt(kStartRadius, std::nullopt);
  if (!first) first = attempt(kStartRadius, std::nullopt);
  if (!first) return out;
  double lo = kStartRadius;
  double hi = (lay.p == 1 ? lay.s : lay.s - lay.p + 1) + 1e-9;
  Vector best = *first;
  while (hi - lo > spec.r_tolerance) {
    const double mid = 0.5 * (lo + hi);
    Vector warm = lay.pack(P_from_stacked(stacked_from_P(lay.unpack(best), lo), mid));
    if (auto x = attempt(mid, warm)) {
      lo = mid;
      best = *x;
    } else {
      hi = mid;
    }
  }
  double certified = 0.0;
  out.tableau = certify(lay, spec, best, lo, certified);
  if (out.tableau) out.r = certified;
  out.best_merit = 0.0;
  return out;
}

}  // namespace

OptimizationResult optimize_with_report(const OptimizationSpec& spec) {
  validate(spec);
  const Layout lay(spec);
  const auto n = static_cast<std::size_t>(spec.restarts);
  std::vector<RestartOutcome> outcomes(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next++; k < n; k = next++) outcomes[k] = run_restart(lay, spec, static_cast<int>(k));
  };
  const auto threads = std::min<std::size_t>(static_cast<std::size_t>(worker_threads()), n);
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }

  OptimizationResult result{MethodRecord{ButcherTableau("empty", 1, Matrix::Zero(1, 1), Vector::Ones(1)), std::nullopt, {}, 0.0,
                                         Family::eSSPRK, ""},
                            0.0, {}, -1};
  double best_merit = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    result.restart_r.push_back(outcomes[k].r);
    best_merit = std::min(best_merit, outcomes[k].best_merit);
    if (outcomes[k].tableau && outcomes[k].r > result.r) {
      result.r = outcomes[k].r;
      result.best_restart = static_cast<int>(k);
    }
  }
  if (result.best_restart < 0) {
    std::ostringstream msg;
    msg << "no feasible " << method_name(spec) << " found at r = " << kStartRadius << " in " << spec.restarts
        << " restarts (smallest residual norm " << best_merit << ")";
    throw NotFound(msg.str());
  }
  MethodRecord& m = result.method;
  m.tableau = *outcomes[static_cast<std::size_t>(result.best_restart)].tableau;
  m.claimed_C = result.r;
  m.family = spec.require_nondecreasing ? Family::eSSPRKplus : Family::eSSPRK;
  std::ostringstream cite;
  cite << "optimizer seed=" << spec.seed << " restarts=" << spec.restarts << " restart=" << result.best_restart;
  m.citation = cite.str();
  return result;
}

MethodRecord optimize(const OptimizationSpec& spec) { return optimize_with_report(spec).method; }

nlohmann::json certificate_to_json(const OptimizationResult& result, const OptimizationSpec& spec) {
  nlohmann::json j = tableau_to_json(result.method.tableau);
  j["r"] = result.r;
  j["nondecreasing"] = spec.require_nondecreasing;
  j["seed"] = spec.seed;
  j["restarts"] = spec.restarts;
  j["restart_r"] = result.restart_r;
  return j;
}

std::vector<std::string> verify_certificate(const nlohmann::json& j) {
  std::vector<std::string> issues;
  RawTableau raw;
  try {
    raw = raw_tableau_from_json(j);
  } catch (const std::exception& e) {
    return {std::string("malformed tableau: ") + e.what()};
  }
  const Eigen::Index s = raw.b.size();
  if (raw.A.rows() != s || raw.A.cols() != s) return {"A is not s x s"};
  for (Eigen::Index i = 0; i < s; ++i)
    for (Eigen::Index j2 = i; j2 < s; ++j2)
      if (raw.A(i, j2) != 0.0) issues.push_back("A is not strictly lower triangular");
  if (!issues.empty()) return issues;

  const int order = j.value("order", raw.order);
  const auto report = order_residuals(raw.A, raw.b);
  for (const auto& cond : kOrderConditions) {
    const double res = report.residuals.at(cond.tag);
    if (cond.order <= order && !(std::abs(res) <= kOrderTolerance)) {
      std::ostringstream msg;
      msg << "order condition " << cond.tag << " residual " << res;
      issues.push_back(msg.str());
    }
  }

  const Vector c = raw.A.rowwise().sum();
  if (raw.c && ((*raw.c - c).lpNorm<Eigen::Infinity>() > 1e-13)) issues.push_back("stored c differs from A e");
  if (j.value("nondecreasing", false) && !abscissas_nondecreasing(c)) issues.push_back("abscissas decrease");

  if (!j.contains("r")) {
    issues.push_back("missing r");
    return issues;
  }
  const double r = j.at("r").get<double>() - 1e-6;
  if (r > 0.0) {
    Matrix S = Matrix::Zero(s + 1, s + 1);
    S.topLeftCorner(s, s) = raw.A;
    S.row(s).head(s) = raw.b.transpose();
    const Matrix M = Matrix::Identity(s + 1, s + 1) + r * S;
    const Vector v = M.triangularView<Eigen::Lower>().solve(Vector::Ones(s + 1));
    const Matrix P = r * M.triangularView<Eigen::Lower>().solve(S);
    if (std::min(v.minCoeff(), P.minCoeff()) < -kMonotonicityTolerance) {
      std::ostringstream msg;
      msg << "not absolutely monotonic at r - 1e-6 = " << r;
      issues.push_back(msg.str());
    }
  }
  return issues;
}

std::vector<std::string> verify_certificate(const MethodRecord& m, double r, bool require_nondecreasing) {
  nlohmann::json j = tableau_to_json(m.tableau);
  j["r"] = r;
  j["nondecreasing"] = require_nondecreasing;
  return verify_certificate(j);
}

}  // namespace sspif
