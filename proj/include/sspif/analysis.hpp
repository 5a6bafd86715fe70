#pragma once

#include "sspif/spatial.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace sspif {

inline constexpr double kTvThreshold = 1e-10;

/// Periodic total variation sum_i |u_{i+1} - u_i|.
double total_variation(const Vector& u);

/// Largest TV increase between consecutive observed stages over n_steps steps
/// of size dt = lambda * dx, clamped at 0.  Returns +inf if the run produces
/// non-finite values and exactly 0 for lambda = 0.
double max_tv_rise(const Scheme& scheme, const ProblemSetup& problem, double lambda, int n_steps);

struct ObservedCoefficient {
  double lambda_obs = 0.0;
  double threshold = kTvThreshold;
  /// Half-width of the final bracket around lambda_obs.
  double bisection_width = 0.0;
  /// False when no pre-scan point exceeded the threshold (lambda_obs = lambda_hi).
  bool bracketed = false;
};

/// Pre-scans 50 equally spaced points in (0, lambda_hi], brackets the first
/// threshold crossing and bisects it to width <= 1e-4.
ObservedCoefficient observed_tvd_lambda(const Scheme& scheme, const ProblemSetup& problem, double lambda_hi,
                                        int n_steps, double threshold = kTvThreshold);

struct SweepRecord {
  double lambda = 0.0;
  double max_rise = 0.0;
  double log10_rise = -300.0;
};

/// One record per lambda, in input order.  Points are evaluated on
/// worker_threads() threads.
std::vector<SweepRecord> lambda_sweep(const Scheme& scheme, const ProblemSetup& problem,
                                      const std::vector<double>& lambdas, int n_steps);

/// Thread count from SSPIF_THREADS (default 1, clamped to [1, 64]).
int worker_threads();

/// Least-squares slope of log(err) against log(dt).  Throws DegenerateInput
/// for fewer than 3 points, non-positive values or identical step sizes.
double convergence_slope(const std::vector<std::pair<double, double>>& errors);

/// True when n_steps steps of size lambda * dx keep the L2 norm of a random
/// initial state within (1 + 1e-10) of its starting value.  Meaningful for
/// linear problems.
bool l2_stable(const Scheme& scheme, const ProblemSetup& problem, double lambda, int n_steps,
               std::uint64_t seed = 20180417);

}  // namespace sspif
