/**
 * @file model.hpp
 * @brief The DDL model: a linear map B in coordinates gamma = kappa^{-1}(phi)
 * where kappa^{-1}(phi) = phi + Q K(phi) and kappa(gamma) = gamma + Qinv K(gamma).
 */
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ddl/basis.hpp"
#include "ddl/linfit.hpp"
#include "ddl/types.hpp"

namespace ddl {

struct FitReport {
  double initial_cost = 0.0;  ///< L_nu at the DMD seed
  double final_cost = 0.0;    ///< L_nu at the returned model
  double l1 = 0.0;
  double l2 = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string stop_reason;
  double inverse_consistency = 0.0;  ///< max round-trip error / (1 + |phi|) on hull samples
  std::vector<std::string> warnings;
};

struct DdlModel {
  int d = 0;
  MonomialBasis basis;
  Matrix B;     ///< d x d discrete-time linear map
  Matrix Q;     ///< d x M, gamma = phi + Q K(phi)
  Matrix Qinv;  ///< d x M, phi = gamma + Qinv K(gamma)
  double dt = 1.0;
  double nu = 1.0;
  Vector hull_lower;
  Vector hull_upper;
  FitReport report;

  [[nodiscard]] int order() const { return basis.max_degree(); }
  [[nodiscard]] Eigen::Index features() const { return static_cast<Eigen::Index>(basis.size()); }
  [[nodiscard]] Eigen::Index parameter_count() const { return 2 * d * features() + d * d; }
  /// Throws ShapeError when the blocks disagree with d and the basis.
  void validate() const;
};

struct DdlCost {
  double l1 = 0.0;
  double l2 = 0.0;
  double total = 0.0;
};

[[nodiscard]] DdlCost cost(const DdlModel& model, const SnapshotPairs& pairs);

/// gamma = phi + Q K(phi), column-wise for matrices.
[[nodiscard]] Vector to_linear_coords(const DdlModel& model, const Vector& phi);
[[nodiscard]] Matrix to_linear_coords(const DdlModel& model, const Matrix& phi);
/// phi = gamma + Qinv K(gamma).
[[nodiscard]] Vector from_linear_coords(const DdlModel& model, const Vector& gamma);
[[nodiscard]] Matrix from_linear_coords(const DdlModel& model, const Matrix& gamma);

/// d x (n+1) trajectory phi_j = kappa(B^j kappa^{-1}(phi0)); column 0 is the round trip of phi0.
[[nodiscard]] Matrix predict(const DdlModel& model, const Vector& phi0, int n);

/// Continuous generator log(B)/dt.
[[nodiscard]] Matrix continuous_generator(const DdlModel& model);
[[nodiscard]] std::vector<Complex> spectrum(const DdlModel& model);

// Parameter vector layout: Q row-major, then Qinv row-major, then B row-major.
[[nodiscard]] Vector pack_parameters(const DdlModel& model);
void unpack_parameters(DdlModel& model, const Vector& params);

/// Stacked residuals: all invariance rows (column c, component i at c*d+i),
/// then all sqrt(nu)-weighted inverse-consistency rows.
[[nodiscard]] Vector residuals(const DdlModel& model, const SnapshotPairs& pairs);
[[nodiscard]] Matrix residual_jacobian(const DdlModel& model, const SnapshotPairs& pairs);
[[nodiscard]] Matrix residual_jacobian_fd(const DdlModel& model, const SnapshotPairs& pairs, double rel_step = 1e-6);

struct FitOptions {
  int k = 3;
  double nu = 1.0;
  double tol = 0.0;
  int max_iter = 500;
  double rel_decrease_tol = 1e-12;
  double initial_damping = 1e-3;
  bool finite_difference_jacobian = false;
  LstsqOptions lstsq{};
  int consistency_samples = 1000;
  std::uint64_t consistency_seed = 0;
  std::function<void(int iteration, double cost, double damping)> progress;
};

/// Q = Qinv = 0 and B from DMD.
[[nodiscard]] DdlModel dmd_seed(const SnapshotPairs& pairs, int k, double nu = 1.0, const LstsqOptions& opts = {});

/// Minimizes L_nu over (Q, Qinv, B) starting from dmd_seed.
[[nodiscard]] DdlModel fit(const SnapshotPairs& pairs, const FitOptions& opts = {});

/// One accepted damped Gauss-Newton step from the DMD seed.
[[nodiscard]] DdlModel first_order_correction(const SnapshotPairs& pairs, const FitOptions& opts = {});

/// Uniform samples of the training hull box (d x count), deterministic in seed.
[[nodiscard]] Matrix hull_samples(const DdlModel& model, int count, std::uint64_t seed = 0);

/// Per-sample round-trip error |kappa(kappa^{-1}(phi)) - phi|.
[[nodiscard]] Vector round_trip_errors(const DdlModel& model, const Matrix& samples);

/// max over samples of round-trip error / (1 + |phi|).
[[nodiscard]] double inverse_consistency(const DdlModel& model, const Matrix& samples);

struct ValidityResult {
  std::vector<bool> mask;
  Vector errors;
  double radius = 0.0;  ///< smallest |phi| among failing samples, or largest sample norm if none fail
};
[[nodiscard]] ValidityResult validity_domain(const DdlModel& model, const Matrix& samples, double tol);

/// `radii` equally spaced shells in (0, r_max] with `directions` points each.
/// In two dimensions the directions are equally spaced angles; otherwise they
/// are seeded random unit vectors.
[[nodiscard]] Matrix radial_samples(int d, double r_max, int radii, int directions, std::uint64_t seed = 0);

}  // namespace ddl
