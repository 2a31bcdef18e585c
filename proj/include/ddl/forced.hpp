/**
 * @file forced.hpp
 * @brief Periodic response of the forced reduced model
 *   gamma' = B gamma + eps (I + D ell(gamma))^{-1} F cos(Omega t)
 * by shooting and pseudo-arclength continuation, plus linear baselines.
 */
#pragma once

#include <string>
#include <vector>

#include "ddl/basis.hpp"
#include "ddl/model.hpp"
#include "ddl/types.hpp"

namespace ddl {

struct ForcedReducedModel {
  Matrix B;             ///< continuous-time generator, d x d
  MonomialBasis basis;  ///< empty (size 0) for linear models
  Matrix ell;           ///< d x M, kappa(gamma) = gamma + ell K(gamma)
  Vector forcing;       ///< cosine amplitude in phi coordinates
  double epsilon = 0.0;

  [[nodiscard]] int dim() const { return static_cast<int>(B.rows()); }
  [[nodiscard]] bool is_linear() const { return basis.size() == 0 || ell.size() == 0 || ell.isZero(0.0); }
  [[nodiscard]] Vector kappa(const Vector& gamma) const;
  /// I + D ell(gamma).
  [[nodiscard]] Matrix kappa_jacobian(const Vector& gamma) const;
  void validate() const;
};

/// Generator log(B)/dt and ell = Qinv taken from a fitted model.
[[nodiscard]] ForcedReducedModel forced_from_ddl(const DdlModel& model, const Vector& forcing, double epsilon);
[[nodiscard]] ForcedReducedModel forced_linear(const Matrix& b_cont, const Vector& forcing, double epsilon);

/// Right-hand side at time t for forcing frequency omega. Throws
/// NumericalError when I + D ell(gamma) is numerically singular.
[[nodiscard]] Vector forced_field(const ForcedReducedModel& model, const Vector& gamma, double t, double omega);
/// Partial derivative of forced_field with respect to gamma.
[[nodiscard]] Matrix forced_field_jacobian(const ForcedReducedModel& model, const Vector& gamma, double t, double omega);

struct ShootingOptions {
  double tol = 1e-9;
  int max_iter = 25;
  double integration_tol = 1e-11;
  int samples_per_period = 512;
};

struct PeriodicOrbit {
  double omega = 0.0;
  Vector gamma0;
  Matrix monodromy;
  std::vector<Complex> multipliers;
  bool stable = false;
  double residual = 0.0;
  int iterations = 0;
  double amplitude = 0.0;  ///< max over one period of |kappa(gamma(t))|
};

/// Fixed point of the period map by Newton's method with variational equations.
[[nodiscard]] PeriodicOrbit shoot_periodic(const ForcedReducedModel& model, double omega, const Vector& gamma_guess,
                                           const ShootingOptions& opts = {});

/// Max over one period of |kappa(gamma(t))| for the orbit through gamma0.
[[nodiscard]] double orbit_amplitude(const ForcedReducedModel& model, double omega, const Vector& gamma0,
                                     const ShootingOptions& opts = {});

struct FrcPoint {
  double omega = 0.0;
  double amplitude = 0.0;
  Vector gamma0;
  std::vector<Complex> multipliers;
  bool stable = true;
  bool fold = false;
  double residual = 0.0;
};

struct FrcBranch {
  std::string method;
  double epsilon = 0.0;
  std::vector<FrcPoint> points;
  bool truncated = false;

  [[nodiscard]] int fold_count() const;
  /// True when omega is strictly monotone along the branch.
  [[nodiscard]] bool single_valued() const;
  /// Point of largest amplitude.
  [[nodiscard]] const FrcPoint& peak() const;
};

struct ContinuationOptions {
  double initial_step = 0.002;
  double min_step = 1e-6;
  double max_step = 0.02;
  int max_points = 4000;
  ShootingOptions shooting{};
};

/// Pseudo-arclength continuation in (gamma0, Omega) from omega_start toward omega_end.
[[nodiscard]] FrcBranch continue_frc(const ForcedReducedModel& model, double omega_start, double omega_end,
                                     const ContinuationOptions& opts = {});

/// Closed-form response of gamma' = B gamma + eps F cos(Omega t).
[[nodiscard]] FrcBranch dmd_frc(const Matrix& b_cont, const Vector& forcing, double epsilon,
                                const std::vector<double>& omegas);

/// Linear harmonic orbit mapped through kappa.
[[nodiscard]] FrcBranch approx_ddl_frc(const ForcedReducedModel& model, const std::vector<double>& omegas,
                                       int samples_per_period = 512);

/// omega_start, ..., omega_end with `count` equally spaced values.
[[nodiscard]] std::vector<double> linspace(double a, double b, int count);

}  // namespace ddl
