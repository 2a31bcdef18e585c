#pragma once

#include <cmath>
#include <functional>
#include <string>

#include "ddl/types.hpp"

namespace ddl {

struct LmOptions {
  double initial_damping = 1e-3;
  double damping_up = 10.0;
  double damping_down = 10.0;
  double max_damping = 1e16;
  int max_iter = 500;
  double cost_tol = 0.0;        // stop once cost <= cost_tol
  double rel_decrease_tol = 1e-12;
  double gradient_tol = 0.0;    // stop once |J^T r|_inf <= gradient_tol
  int max_accepted_steps = -1;  // -1: unlimited
  std::function<void(int iteration, double cost, double damping)> on_iteration;
};

struct LmResult {
  Vector x;
  double initial_cost = 0.0;
  double final_cost = 0.0;
  int iterations = 0;
  int accepted_steps = 0;
  bool converged = false;
  bool regularized = false;
  std::string stop_reason;
};

/// Levenberg-Marquardt on cost = |r(x)|^2 with Marquardt diagonal scaling.
/// Trial points with non-finite residuals count as rejected steps; if the
/// damping limit is reached while only non-finite trials were produced, a
/// DivergenceError is thrown carrying `describe(x_trial)`.
template <class ResidualFn, class JacobianFn>
LmResult levenberg_marquardt(const Vector& x0, ResidualFn&& residual, JacobianFn&& jacobian, const LmOptions& opts,
                             const std::function<std::string(const Vector&)>& describe = {}) {
  LmResult res;
  res.x = x0;
  Vector r = residual(res.x);
  if (!r.allFinite()) throw DivergenceError("non-finite residual at the initial point" +
                                            (describe ? ": " + describe(res.x) : std::string()));
  double cost = r.squaredNorm();
  res.initial_cost = cost;
  double mu = opts.initial_damping;

  auto finish = [&](bool conv, const char* why) {
    res.final_cost = cost;
    res.converged = conv;
    res.stop_reason = why;
    return res;
  };

  if (cost <= opts.cost_tol) return finish(true, "cost tolerance");

  for (int it = 0; it < opts.max_iter; ++it) {
    res.iterations = it + 1;
    if (opts.on_iteration) opts.on_iteration(it, cost, mu);
    const Matrix J = jacobian(res.x);
    Matrix A = Matrix::Zero(J.cols(), J.cols());
    A.selfadjointView<Eigen::Lower>().rankUpdate(J.transpose());
    A = A.selfadjointView<Eigen::Lower>();
    const Vector g = J.transpose() * r;
    if (opts.gradient_tol > 0.0 && g.lpNorm<Eigen::Infinity>() <= opts.gradient_tol)
      return finish(true, "gradient tolerance");

    Vector scale = A.diagonal();
    const double floor = std::max(scale.maxCoeff() * 1e-12, 1e-300);
    for (Eigen::Index i = 0; i < scale.size(); ++i) scale(i) = std::max(scale(i), floor);

    bool accepted = false;
    bool last_nonfinite = false;
    Vector last_trial;
    while (mu <= opts.max_damping) {
      Matrix H = A;
      H.diagonal() += mu * scale;
      Eigen::LDLT<Matrix> ldlt(H);
      Vector step = ldlt.solve(-g);
      if (ldlt.info() != Eigen::Success || !step.allFinite()) {
        res.regularized = true;
        mu *= opts.damping_up;
        continue;
      }
      Vector trial = res.x + step;
      Vector r_trial = residual(trial);
      if (!r_trial.allFinite()) {
        last_nonfinite = true;
        last_trial = trial;
        mu *= opts.damping_up;
        continue;
      }
      last_nonfinite = false;
      const double c_trial = r_trial.squaredNorm();
      if (c_trial < cost) {
        const double rel = (cost - c_trial) / cost;
        res.x = std::move(trial);
        r = std::move(r_trial);
        cost = c_trial;
        mu = std::max(mu / opts.damping_down, 1e-20);
        accepted = true;
        ++res.accepted_steps;
        if (cost <= opts.cost_tol) return finish(true, "cost tolerance");
        if (rel < opts.rel_decrease_tol) return finish(true, "relative decrease below tolerance");
        if (opts.max_accepted_steps >= 0 && res.accepted_steps >= opts.max_accepted_steps)
          return finish(true, "step limit");
        break;
      }
      mu *= opts.damping_up;
    }
    if (!accepted) {
      if (last_nonfinite)
        throw DivergenceError("non-finite residuals for every admissible damping" +
                              (describe ? ": " + describe(last_trial) : std::string()));
      return finish(true, "no further decrease (damping limit)");
    }
  }
  return finish(false, "maximum iterations");
}

/// Central-difference Jacobian of a residual function.
template <class ResidualFn>
Matrix finite_difference_jacobian(ResidualFn&& residual, const Vector& x, double rel_step = 1e-6) {
  const Vector r0 = residual(x);
  Matrix J(r0.size(), x.size());
  Vector xp = x;
  for (Eigen::Index p = 0; p < x.size(); ++p) {
    const double h = rel_step * std::max(1.0, std::abs(x(p)));
    xp(p) = x(p) + h;
    const Vector rp = residual(xp);
    xp(p) = x(p) - h;
    const Vector rm = residual(xp);
    xp(p) = x(p);
    J.col(p) = (rp - rm) / (2.0 * h);
  }
  return J;
}

}  // namespace ddl
