/**
 * @file ode.hpp
 * @brief Fixed-step RK4 and adaptive Dormand-Prince 5(4) integrators.
 */
#pragma once

#include <functional>

#include "ddl/types.hpp"

namespace ddl {

using OdeRhs = std::function<Vector(double t, const Vector& x)>;

/// Samples t(j) and states x.col(j).
struct Trajectory {
  Vector t;
  Matrix x;
};

[[nodiscard]] Vector rk4_step(const OdeRhs& f, double t, const Vector& x, double h);

/// RK4 with `substeps` steps between consecutive outputs spaced dt_out.
[[nodiscard]] Trajectory integrate_rk4(const OdeRhs& f, const Vector& x0, double t0, double t1, double dt_out,
                                       int substeps = 1);

struct Rk45Options {
  double rtol = 1e-10;
  double atol = 1e-10;
  double h_initial = 0.0;  ///< 0 picks a step automatically
  double h_min = 1e-14;
  long max_steps = 50'000'000;
};

/// Adaptive integration from t0 to t1; returns the state at t1.
[[nodiscard]] Vector rk45_advance(const OdeRhs& f, const Vector& x0, double t0, double t1, const Rk45Options& opts = {});

/// Adaptive integration sampled at t0, t0 + dt_out, ... up to t1.
[[nodiscard]] Trajectory integrate_rk45(const OdeRhs& f, const Vector& x0, double t0, double t1, double dt_out,
                                        const Rk45Options& opts = {});

}  // namespace ddl
