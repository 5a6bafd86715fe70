#pragma once

#include "sspif/expm.hpp"
#include "sspif/method_library.hpp"

#include <cstddef>
#include <functional>
#include <memory>
#include <string>

namespace sspif {

using RhsFunction = std::function<Vector(const Vector&)>;

/// u_t = L u + N(u).
struct SemiDiscretization {
  Eigen::Index n = 0;
  Matrix L;
  RhsFunction N;
  /// Optional fast evaluation of L u; `L * u` when empty.
  RhsFunction apply_L;
  double dx = 1.0;
  double fe_dt_nonlinear = 0.0;
  double fe_dt_linear = 0.0;

  Vector linear(const Vector& u) const;
  /// N(u), throwing NonFinite if the result is not finite.
  Vector nonlinear(const Vector& u) const;
  Vector full(const Vector& u) const { return linear(u) + nonlinear(u); }
};

/// Called with (step index, stage index, stage vector).  Stage 0 is u^n and
/// stage s is u^{n+1}.
using StageObserver = std::function<void(std::size_t, std::size_t, const Vector&)>;

/// One time step of fixed size: (u^n, step index, observer) -> u^{n+1}.
using Stepper = std::function<Vector(const Vector&, std::size_t, const StageObserver&)>;

/// Plain explicit RK step evaluated in Shu--Osher form.  Throws NonFinite if
/// any stage contains NaN/Inf.
Vector rk_step(const MethodRecord& method, const RhsFunction& F, const Vector& u, double dt,
               const StageObserver& obs = {}, std::size_t step = 0);
Vector rk_step(const ShuOsherForm& so, const RhsFunction& F, const Vector& u, double dt,
               const StageObserver& obs = {}, std::size_t step = 0);

/// An integrating-factor method bound to L and dt, with its exponentials
/// precomputed.
struct StepPlan {
  std::shared_ptr<const MethodRecord> method;
  ShuOsherForm shu_osher;
  /// Abscissa of each Shu--Osher stage 0..s (the last one is 1).
  Vector stage_c;
  std::shared_ptr<const ExpCache> cache;
  double dt = 0.0;
};

/// Rejects methods with decreasing abscissas (NegativeGap).
StepPlan make_step_plan(const MethodRecord& method, const Matrix& L, double dt);

/// One step of u^{(i)} = sum_j e^{L (c_i - c_j) dt} (alpha_ij u^{(j)} + dt beta_ij N(u^{(j)})).
Vector ifrk_step(const StepPlan& plan, const SemiDiscretization& sys, const Vector& u,
                 const StageObserver& obs = {}, std::size_t step = 0);

/// Same recurrence with no ordering requirement on the abscissas; negative
/// gaps use e^{gL} with g < 0 directly.
struct GeneralStepPlan {
  ShuOsherForm shu_osher;
  Vector stage_c;
  std::shared_ptr<const ExpCache> cache;
  double dt = 0.0;
};

/// `c` holds the s Butcher abscissas.
GeneralStepPlan make_general_plan(const ShuOsherForm& so, const Vector& c, const Matrix& L, double dt);

Vector ifrk_step_general(const GeneralStepPlan& plan, const SemiDiscretization& sys, const Vector& u,
                         const StageObserver& obs = {}, std::size_t step = 0);
Vector ifrk_step_general(const ShuOsherForm& so, const Vector& c, const SemiDiscretization& sys,
                         const Vector& u, double dt, const StageObserver& obs = {});

/// Applies `stepper` n_steps times.
Vector integrate(const Stepper& stepper, const Vector& u0, int n_steps, const StageObserver& obs = {});

/// A time-stepping scheme that can be bound to a system and a step size.
struct Scheme {
  std::string name;
  std::function<Stepper(const SemiDiscretization&, double)> bind;
};

/// Plain RK on F(u) = L u + N(u).
Scheme plain_rk_scheme(const MethodRecord& method);
/// Integrating-factor RK; binding throws NegativeGap for decreasing abscissas.
Scheme ifrk_scheme(const MethodRecord& method);
/// Integrating-factor recurrence without the abscissa requirement.
Scheme general_ifrk_scheme(std::string name, const ShuOsherForm& so, const Vector& c);
/// The integrating-factor form of the Shu--Osher eSSPRK(3,3) method, whose
/// decreasing abscissas give e^{-L dt/2} factors.
Scheme shu_osher_if_scheme();

}  // namespace sspif
