#include "sspif/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <random>
#include <thread>

namespace sspif {

double total_variation(const Vector& u) {
  const Eigen::Index n = u.size();
  if (n < 2) return 0.0;
  double tv = std::abs(u(0) - u(n - 1));
  for (Eigen::Index i = 1; i < n; ++i) tv += std::abs(u(i) - u(i - 1));
  return tv;
}

double max_tv_rise(const Scheme& scheme, const ProblemSetup& problem, double lambda, int n_steps) {
  if (!(lambda >= 0.0)) throw InvalidArgument("max_tv_rise needs lambda >= 0");
  if (lambda == 0.0 || n_steps == 0) return 0.0;
  const Stepper stepper = scheme.bind(problem.system, lambda * problem.system.dx);
  double prev = total_variation(problem.initial);
  double rise = 0.0;
  const StageObserver obs = [&](std::size_t, std::size_t stage, const Vector& v) {
    if (stage == 0) return;
    const double tv = total_variation(v);
    rise = std::max(rise, tv - prev);
    prev = tv;
  };
  try {
    const Vector u = integrate(stepper, problem.initial, n_steps, obs);
    if (!u.allFinite()) return std::numeric_limits<double>::infinity();
  } catch (const NonFinite&) {
    return std::numeric_limits<double>::infinity();
  }
  if (!std::isfinite(rise)) return std::numeric_limits<double>::infinity();
  return rise;
}

int worker_threads() {
  const char* env = std::getenv("SSPIF_THREADS");
  if (!env) return 1;
  const int n = std::atoi(env);
  return std::clamp(n, 1, 64);
}

std::vector<SweepRecord> lambda_sweep(const Scheme& scheme, const ProblemSetup& problem,
                                      const std::vector<double>& lambdas, int n_steps) {
  std::vector<SweepRecord> out(lambdas.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto work = [&] {
    for (std::size_t k = next++; k < lambdas.size() && !failed; k = next++) {
      try {
        const double rise = max_tv_rise(scheme, problem, lambdas[k], n_steps);
        out[k] = SweepRecord{lambdas[k], rise, std::log10(std::max(rise, 1e-300))};
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  const auto threads = static_cast<std::size_t>(worker_threads());
  if (threads <= 1 || lambdas.size() <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < std::min(threads, lambdas.size()); ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

ObservedCoefficient observed_tvd_lambda(const Scheme& scheme, const ProblemSetup& problem, double lambda_hi,
                                        int n_steps, double threshold) {
  if (!(lambda_hi > 0.0)) throw InvalidArgument("observed_tvd_lambda needs lambda_hi > 0");
  constexpr int kScan = 50;
  std::vector<double> grid(kScan);
  for (int k = 0; k < kScan; ++k) grid[static_cast<std::size_t>(k)] = lambda_hi * (k + 1) / kScan;
  const auto scan = lambda_sweep(scheme, problem, grid, n_steps);

  ObservedCoefficient result;
  result.threshold = threshold;
  double lo = 0.0, hi = lambda_hi;
  bool found = false;
  for (const auto& rec : scan) {
    if (rec.max_rise > threshold) {
      hi = rec.lambda;
      found = true;
      break;
    }
    lo = rec.lambda;
  }
  if (!found) {
    result.lambda_obs = lambda_hi;
    return result;
  }
  while (hi - lo > 1e-4) {
    const double mid = 0.5 * (lo + hi);
    if (max_tv_rise(scheme, problem, mid, n_steps) > threshold) hi = mid;
    else lo = mid;
  }
  result.lambda_obs = 0.5 * (lo + hi);
  result.bisection_width = 0.5 * (hi - lo);
  result.bracketed = true;
  return result;
}

double convergence_slope(const std::vector<std::pair<double, double>>& errors) {
  if (errors.size() < 3) throw DegenerateInput("convergence_slope needs at least 3 points");
  double sx = 0.0, sy = 0.0;
  for (const auto& [dt, err] : errors) {
    if (!(dt > 0.0) || !(err > 0.0) || !std::isfinite(dt) || !std::isfinite(err))
      throw DegenerateInput("convergence_slope needs finite positive step sizes and errors");
    sx += std::log(dt);
    sy += std::log(err);
  }
  const double n = static_cast<double>(errors.size());
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [dt, err] : errors) {
    const double dx = std::log(dt) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(err) - my);
  }
  if (sxx < 1e-24) throw DegenerateInput("convergence_slope needs distinct step sizes");
  return sxy / sxx;
}

bool l2_stable(const Scheme& scheme, const ProblemSetup& problem, double lambda, int n_steps, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Vector u(problem.system.n);
  for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = normal(rng);
  const double bound = (1.0 + 1e-10) * u.norm();
  const Stepper stepper = scheme.bind(problem.system, lambda * problem.system.dx);
  try {
    for (int k = 0; k < n_steps; ++k) {
      u = stepper(u, static_cast<std::size_t>(k), {});
      if (!(u.norm() <= bound)) return false;
    }
  } catch (const NonFinite&) {
    return false;
  }
  return true;
}

}  // namespace sspif
