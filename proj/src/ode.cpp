#include "ddl/ode.hpp"

#include <algorithm>
#include <cmath>

namespace ddl {

namespace {

long sample_count(double t0, double t1, double dt_out) {
  if (!(dt_out > 0.0)) throw ParameterError("integrate: dt_out must be positive");
  if (t1 < t0) throw ParameterError("integrate: t1 < t0");
  return static_cast<long>(std::floor((t1 - t0) / dt_out + 1e-9)) + 1;
}

void require_finite(const Vector& x, double t) {
  if (!x.allFinite()) throw NumericalError("integration produced a non-finite state at t = " + std::to_string(t));
}

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace

Vector rk4_step(const OdeRhs& f, double t, const Vector& x, double h) {
  const Vector k1 = f(t, x);
  const Vector k2 = f(t + 0.5 * h, x + 0.5 * h * k1);
  const Vector k3 = f(t + 0.5 * h, x + 0.5 * h * k2);
  const Vector k4 = f(t + h, x + h * k3);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Trajectory integrate_rk4(const OdeRhs& f, const Vector& x0, double t0, double t1, double dt_out, int substeps) {
  if (substeps < 1) throw ParameterError("integrate_rk4: substeps must be >= 1");
  const long n = sample_count(t0, t1, dt_out);
  Trajectory out{Vector(n), Matrix(x0.size(), n)};
  Vector x = x0;
  const double h = dt_out / substeps;
  for (long j = 0; j < n; ++j) {
    const double t = t0 + static_cast<double>(j) * dt_out;
    out.t(j) = t;
    out.x.col(j) = x;
    if (j + 1 == n) break;
    for (int s = 0; s < substeps; ++s) x = rk4_step(f, t + s * h, x, h);
    require_finite(x, t + dt_out);
  }
  return out;
}

namespace {

Vector advance(const OdeRhs& f, const Vector& x0, double t0, double t1, const Rk45Options& opts, double& h) {
  if (t1 == t0) return x0;
  const double dir = t1 > t0 ? 1.0 : -1.0;
  double t = t0;
  Vector x = x0;
  Vector k1 = f(t, x);
  long steps = 0;
  while (dir * (t1 - t) > 0.0) {
    if (++steps > opts.max_steps) throw NumericalError("rk45: maximum step count exceeded");
    h = std::min(h, dir * (t1 - t));
    const double hs = dir * h;
    const Vector k2 = f(t + c2 * hs, x + hs * (a21 * k1));
    const Vector k3 = f(t + c3 * hs, x + hs * (a31 * k1 + a32 * k2));
    const Vector k4 = f(t + c4 * hs, x + hs * (a41 * k1 + a42 * k2 + a43 * k3));
    const Vector k5 = f(t + c5 * hs, x + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Vector k6 = f(t + hs, x + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const Vector xn = x + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Vector k7 = f(t + hs, xn);
    const Vector err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    double en = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double sc = opts.atol + opts.rtol * std::max(std::abs(x(i)), std::abs(xn(i)));
      en = std::max(en, std::abs(err(i)) / sc);
    }
    if (!std::isfinite(en)) {
      h *= 0.25;
      if (h < opts.h_min) throw NumericalError("rk45: non-finite state near t = " + std::to_string(t));
      continue;
    }
    if (en <= 1.0) {
      t += hs;
      if (dir * (t1 - t) < 1e-14 * std::max(1.0, std::abs(t1))) t = t1;
      x = xn;
      k1 = k7;
    }
    const double fac = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
    h *= fac;
    if (h < opts.h_min && dir * (t1 - t) > opts.h_min) throw NumericalError("rk45: step size underflow at t = " + std::to_string(t));
  }
  require_finite(x, t1);
  return x;
}

double initial_step(const Rk45Options& opts, double span) {
  return opts.h_initial > 0.0 ? opts.h_initial : std::min(span, 1e-2);
}

}  // namespace

Vector rk45_advance(const OdeRhs& f, const Vector& x0, double t0, double t1, const Rk45Options& opts) {
  double h = initial_step(opts, std::abs(t1 - t0));
  return advance(f, x0, t0, t1, opts, h);
}

Trajectory integrate_rk45(const OdeRhs& f, const Vector& x0, double t0, double t1, double dt_out,
                          const Rk45Options& opts) {
  const long n = sample_count(t0, t1, dt_out);
  Trajectory out{Vector(n), Matrix(x0.size(), n)};
  Vector x = x0;
  out.t(0) = t0;
  out.x.col(0) = x;
  double h = initial_step(opts, dt_out);
  for (long j = 1; j < n; ++j) {
    const double ta = t0 + static_cast<double>(j - 1) * dt_out;
    const double tb = t0 + static_cast<double>(j) * dt_out;
    double h_carry = h;
    x = advance(f, x, ta, tb, opts, h_carry);
    h = std::max(h_carry, h);
    out.t(j) = tb;
    out.x.col(j) = x;
  }
  return out;
}

}  // namespace ddl
