#pragma once

#include "sspif/method_library.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace sspif {

struct OptimizationSpec {
  int s = 3;
  int p = 2;
  bool require_nondecreasing = true;
  int restarts = 10;
  std::uint64_t seed = 1;
  /// Width at which the bisection on r stops.
  double r_tolerance = 1e-6;
};

/// Throws InvalidArgument unless 1 <= p <= 4, s >= p, and s >= 5 for p = 4.
void validate(const OptimizationSpec& spec);

struct OptimizationResult {
  MethodRecord method;
  /// Certified radius of the returned method.
  double r = 0.0;
  /// Certified radius per restart (0 when a restart found nothing).
  std::vector<double> restart_r;
  int best_restart = -1;
};

/// Maximizes the radius of absolute monotonicity subject to the order
/// conditions of order spec.p and, optionally, non-decreasing abscissas.
/// Restarts run on worker_threads() threads; results are independent of the
/// thread count.  Throws NotFound if no restart is feasible at r = 1e-3.
OptimizationResult optimize_with_report(const OptimizationSpec& spec);
MethodRecord optimize(const OptimizationSpec& spec);

/// {"name", "order", "A", "b", "c", "r", "nondecreasing"}.
nlohmann::json certificate_to_json(const OptimizationResult& result, const OptimizationSpec& spec);

/// Re-checks a stored certificate from raw coefficients: order conditions
/// through "order", absolute monotonicity at r - 1e-6, and abscissa ordering
/// when "nondecreasing" is true.  Returns one message per violation.
std::vector<std::string> verify_certificate(const nlohmann::json& j);
std::vector<std::string> verify_certificate(const MethodRecord& m, double r, bool require_nondecreasing);

}  // namespace sspif
