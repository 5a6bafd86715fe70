#include "sspif/integrators.hpp"

#include <map>
#include <vector>

namespace sspif {

Vector SemiDiscretization::linear(const Vector& u) const {
  if (apply_L) return apply_L(u);
  return L * u;
}

Vector SemiDiscretization::nonlinear(const Vector& u) const {
  Vector out = N ? N(u) : Vector::Zero(u.size());
  require_finite(out, "N(u)");
  return out;
}

Vector rk_step(const ShuOsherForm& so, const RhsFunction& F, const Vector& u, double dt,
               const StageObserver& obs, std::size_t step) {
  if (!(dt >= 0.0)) throw InvalidArgument("rk_step needs dt >= 0");
  const int s = so.stages();
  const Matrix& alpha = so.alpha();
  const Matrix& beta = so.beta();
  std::vector<Vector> stage(static_cast<std::size_t>(s) + 1);
  std::vector<Vector> rhs(static_cast<std::size_t>(s) + 1);
  stage[0] = u;
  if (obs) obs(step, 0, stage[0]);
  for (int i = 1; i <= s; ++i) {
    Vector acc = Vector::Zero(u.size());
    for (int j = 0; j < i; ++j) {
      const auto sj = static_cast<std::size_t>(j);
      if (alpha(i, j) != 0.0) acc += alpha(i, j) * stage[sj];
      if (beta(i, j) != 0.0) {
        if (rhs[sj].size() == 0) rhs[sj] = F(stage[sj]);
        acc += (dt * beta(i, j)) * rhs[sj];
      }
    }
    require_finite(acc, "Runge-Kutta stage");
    stage[static_cast<std::size_t>(i)] = std::move(acc);
    if (obs) obs(step, static_cast<std::size_t>(i), stage[static_cast<std::size_t>(i)]);
  }
  return stage[static_cast<std::size_t>(s)];
}

Vector rk_step(const MethodRecord& method, const RhsFunction& F, const Vector& u, double dt,
               const StageObserver& obs, std::size_t step) {
  return rk_step(stepping_form(method), F, u, dt, obs, step);
}

namespace {

Vector stage_abscissas(const Vector& c) {
  Vector out(c.size() + 1);
  out.head(c.size()) = c;
  out(c.size()) = 1.0;
  return out;
}

// Shared body of the integrating-factor recurrence.
Vector if_recurrence(const ShuOsherForm& so, const Vector& stage_c, const ExpCache& cache,
                     const SemiDiscretization& sys, const Vector& u, const StageObserver& obs,
                     std::size_t step) {
  const int s = so.stages();
  const double dt = cache.dt();
  const Matrix& alpha = so.alpha();
  const Matrix& beta = so.beta();
  std::vector<Vector> stage(static_cast<std::size_t>(s) + 1);
  std::vector<Vector> nl(static_cast<std::size_t>(s) + 1);
  stage[0] = u;
  if (obs) obs(step, 0, stage[0]);
  for (int i = 1; i <= s; ++i) {
    // Terms sharing an exponential are summed before it is applied.
    std::map<std::int64_t, std::pair<double, Vector>> by_gap;
    for (int j = 0; j < i; ++j) {
      const auto sj = static_cast<std::size_t>(j);
      if (alpha(i, j) == 0.0 && beta(i, j) == 0.0) continue;
      const double gap = stage_c(i) - stage_c(j);
      auto [it, fresh] = by_gap.try_emplace(gap_key(gap), gap, Vector::Zero(u.size()));
      Vector& acc = it->second.second;
      if (alpha(i, j) != 0.0) acc += alpha(i, j) * stage[sj];
      if (beta(i, j) != 0.0) {
        if (nl[sj].size() == 0) nl[sj] = sys.nonlinear(stage[sj]);
        acc += (dt * beta(i, j)) * nl[sj];
      }
    }
    Vector next = Vector::Zero(u.size());
    for (const auto& [key, term] : by_gap) next += cache.entry(term.first).apply(term.second);
    require_finite(next, "integrating-factor stage");
    stage[static_cast<std::size_t>(i)] = std::move(next);
    if (obs) obs(step, static_cast<std::size_t>(i), stage[static_cast<std::size_t>(i)]);
  }
  return stage[static_cast<std::size_t>(s)];
}

}  // namespace

StepPlan make_step_plan(const MethodRecord& method, const Matrix& L, double dt) {
  if (!(dt >= 0.0)) throw InvalidArgument("step plan needs dt >= 0");
  if (!abscissas_nondecreasing(method.tableau))
    throw NegativeGap(method.name() + " has decreasing abscissas; its integrating-factor form is not SSP");
  StepPlan plan{std::make_shared<const MethodRecord>(method), stepping_form(method),
                stage_abscissas(method.tableau.c()), nullptr, dt};
  plan.cache = std::make_shared<const ExpCache>(build_cache(L, dt, method.tableau.c()));
  return plan;
}

Vector ifrk_step(const StepPlan& plan, const SemiDiscretization& sys, const Vector& u, const StageObserver& obs,
                 std::size_t step) {
  return if_recurrence(plan.shu_osher, plan.stage_c, *plan.cache, sys, u, obs, step);
}

GeneralStepPlan make_general_plan(const ShuOsherForm& so, const Vector& c, const Matrix& L, double dt) {
  if (c.size() != so.stages()) throw InvalidArgument("abscissa count does not match stage count");
  const Vector stage_c = stage_abscissas(c);
  std::vector<double> gaps;
  for (int i = 1; i <= so.stages(); ++i)
    for (int j = 0; j < i; ++j)
      if (so.alpha()(i, j) != 0.0 || so.beta()(i, j) != 0.0) gaps.push_back(stage_c(i) - stage_c(j));
  return GeneralStepPlan{so, stage_c, std::make_shared<const ExpCache>(L, dt, gaps, true), dt};
}

Vector ifrk_step_general(const GeneralStepPlan& plan, const SemiDiscretization& sys, const Vector& u,
                         const StageObserver& obs, std::size_t step) {
  return if_recurrence(plan.shu_osher, plan.stage_c, *plan.cache, sys, u, obs, step);
}

Vector ifrk_step_general(const ShuOsherForm& so, const Vector& c, const SemiDiscretization& sys,
                         const Vector& u, double dt, const StageObserver& obs) {
  return ifrk_step_general(make_general_plan(so, c, sys.L, dt), sys, u, obs, 0);
}

Vector integrate(const Stepper& stepper, const Vector& u0, int n_steps, const StageObserver& obs) {
  if (n_steps < 0) throw InvalidArgument("integrate needs n_steps >= 0");
  Vector u = u0;
  for (int k = 0; k < n_steps; ++k) u = stepper(u, static_cast<std::size_t>(k), obs);
  return u;
}

Scheme plain_rk_scheme(const MethodRecord& method) {
  auto m = std::make_shared<const MethodRecord>(method);
  return Scheme{method.name(), [m](const SemiDiscretization& sys, double dt) -> Stepper {
                  auto F = [&sys](const Vector& v) { return sys.full(v); };
                  const ShuOsherForm& so = stepping_form(*m);
                  return [m, so, F, dt](const Vector& u, std::size_t step, const StageObserver& obs) {
                    return rk_step(so, F, u, dt, obs, step);
                  };
                }};
}

Scheme ifrk_scheme(const MethodRecord& method) {
  auto m = std::make_shared<const MethodRecord>(method);
  std::string name = method.name();
  if (name.rfind("eSSPRK+", 0) == 0) name = "eSSPIFRK" + name.substr(7);
  return Scheme{name, [m](const SemiDiscretization& sys, double dt) -> Stepper {
                  auto plan = std::make_shared<const StepPlan>(make_step_plan(*m, sys.L, dt));
                  return [plan, &sys](const Vector& u, std::size_t step, const StageObserver& obs) {
                    return ifrk_step(*plan, sys, u, obs, step);
                  };
                }};
}

Scheme general_ifrk_scheme(std::string name, const ShuOsherForm& so, const Vector& c) {
  return Scheme{std::move(name), [so, c](const SemiDiscretization& sys, double dt) -> Stepper {
                  auto plan = std::make_shared<const GeneralStepPlan>(make_general_plan(so, c, sys.L, dt));
                  return [plan, &sys](const Vector& u, std::size_t step, const StageObserver& obs) {
                    return ifrk_step_general(*plan, sys, u, obs, step);
                  };
                }};
}

Scheme shu_osher_if_scheme() {
  const MethodRecord& m = get_method("eSSPRK(3,3)");
  return general_ifrk_scheme("IF-eSSPRK(3,3)", *m.shu_osher, m.tableau.c());
}

}  // namespace sspif
