#pragma once

#include <cmath>
#include <cstddef>
#include <utility>

#include "scramble/errors.hpp"

namespace scramble::ode {

/// One classical fourth-order Runge-Kutta step. `State` is any vector type
/// with value semantics and the usual linear operations (Eigen vectors).
template <class State, class Rhs>
State rk4_step(const State& y, double t, double h, const Rhs& rhs) {
  const State k1 = rhs(t, y);
  const State k2 = rhs(t + 0.5 * h, State(y + (0.5 * h) * k1));
  const State k3 = rhs(t + 0.5 * h, State(y + (0.5 * h) * k2));
  const State k4 = rhs(t + h, State(y + h * k3));
  return State(y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

/// Number of equal sub-steps of size <= dt covering [t0, t1].
inline std::size_t substeps(double t0, double t1, double dt) {
  if (!(dt > 0.0)) throw DomainError("integration step dt must be positive");
  const double span = t1 - t0;
  if (span <= 0.0) return 0;
  return static_cast<std::size_t>(std::ceil(span / dt - 1e-9));
}

/// Advances y from t0 to t1 with equal RK4 steps no longer than dt.
/// `after_step(y)` runs after every step (renormalisation hooks).
template <class State, class Rhs, class AfterStep>
State rk4_advance(State y, double t0, double t1, double dt, const Rhs& rhs,
                  AfterStep&& after_step) {
  const std::size_t n = substeps(t0, t1, dt);
  if (n == 0) return y;
  const double h = (t1 - t0) / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    y = rk4_step(y, t0 + static_cast<double>(i) * h, h, rhs);
    after_step(y);
  }
  return y;
}

template <class State, class Rhs>
State rk4_advance(State y, double t0, double t1, double dt, const Rhs& rhs) {
  return rk4_advance(std::move(y), t0, t1, dt, rhs, [](State&) {});
}

}  // namespace scramble::ode
