/**
 * @file linfit.hpp
 * @brief DMD and EDMD fits, polynomial regression of reduced dynamics,
 * and data-quality diagnostics.
 */
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ddl/basis.hpp"
#include "ddl/types.hpp"

namespace ddl {

/// Aligned state / forward-image matrices sampled dt apart.
struct SnapshotPairs {
  Matrix phi;      ///< d x m states
  Matrix phi_hat;  ///< d x m images after dt
  double dt = 1.0;

  SnapshotPairs() = default;
  SnapshotPairs(Matrix states, Matrix images, double step);

  [[nodiscard]] int dim() const { return static_cast<int>(phi.rows()); }
  [[nodiscard]] Eigen::Index count() const { return phi.cols(); }
};

enum class LinearKind { Dmd, Edmd };

/// Discrete-time linear propagator fitted by DMD or EDMD.
struct LinearModel {
  LinearKind kind = LinearKind::Dmd;
  int d = 0;      ///< observable dimension
  Matrix D;       ///< d x d (DMD) or N x N (EDMD, N = d + basis.size())
  double dt = 1.0;
  std::optional<MonomialBasis> basis;  ///< EDMD dictionary beyond the linear terms
  std::vector<std::string> warnings;

  [[nodiscard]] Eigen::Index lifted_dim() const { return D.rows(); }
};

struct LstsqOptions {
  /// Singular values below rel_tol * largest are dropped from the pseudo-inverse.
  double rel_tol = 1e-10;
};

/// Least-squares solution C of Y ~ C X (X: p x m, Y: q x m) via truncated SVD.
struct LstsqResult {
  Matrix coeffs;
  int rank = 0;
  Vector singular_values;
};
[[nodiscard]] LstsqResult lstsq_right(const Matrix& x, const Matrix& y, const LstsqOptions& opts = {});

[[nodiscard]] LinearModel fit_dmd(const SnapshotPairs& pairs, const LstsqOptions& opts = {});
[[nodiscard]] LinearModel fit_edmd(const SnapshotPairs& pairs, int k, const LstsqOptions& opts = {});

/// d x (n+1) trajectory, column 0 is phi0.
[[nodiscard]] Matrix predict(const LinearModel& model, const Vector& phi0, int n);

/// Eigenvalues of D, modulus descending then argument ascending.
[[nodiscard]] std::vector<Complex> spectrum(const LinearModel& model);

/// L = log(D) / dt (principal branch). For EDMD this is the lifted generator.
[[nodiscard]] Matrix continuous_generator(const LinearModel& model);

/// Regression of phi_hat ~ linear * phi + coeffs * K(phi).
struct PolynomialDynamics {
  Matrix linear;  ///< d x d
  MonomialBasis basis;
  Matrix coeffs;  ///< d x basis.size()
  double dt = 1.0;
  std::vector<std::string> warnings;

  [[nodiscard]] Vector apply(const Vector& phi) const;
};
[[nodiscard]] PolynomialDynamics fit_polynomial_dynamics(const SnapshotPairs& pairs, int k,
                                                         const LstsqOptions& opts = {});

struct DiagnosticsOptions {
  double rank_tol = 1e-10;
  double condition_limit = 1e8;
  double peak_fraction = 0.1;
};

/// Row rank, conditioning and dominant-frequency count of the snapshot data.
struct DataReport {
  int rank = 0;
  double condition = 0.0;
  int frequency_count = 0;
  Vector singular_values;
  std::vector<std::string> flags;

  [[nodiscard]] bool has_flag(const std::string& f) const;
};
[[nodiscard]] DataReport data_diagnostics(const SnapshotPairs& pairs, int d, const DiagnosticsOptions& opts = {});

/// Rank of an observable Jacobian restricted to a subspace (columns of
/// `subspace`). ok == (rank == number of observables).
struct ObservableRank {
  int rank = 0;
  Vector singular_values;
  bool ok = false;
};
[[nodiscard]] ObservableRank observable_rank(const Matrix& observable_jacobian, const Matrix& subspace,
                                             double rel_tol = 1e-8);

}  // namespace ddl
