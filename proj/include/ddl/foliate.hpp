/**
 * @file foliate.hpp
 * @brief Slow/fast splitting of a DDL model and projection along stable fibers.
 */
#pragma once

#include <vector>

#include "ddl/model.hpp"
#include "ddl/types.hpp"

namespace ddl {

/// Real block-diagonalizing transform S of B (columns slow-first). The first
/// d1 columns span the slow subspace E1, the rest span E2.
struct SpectralSplit {
  Matrix S;
  Matrix S_inv;
  Matrix blocks;  ///< S^{-1} B S
  int d1 = 0;
  int d2 = 0;
  double gap_ratio = 0.0;  ///< |lambda_{d1}| / |lambda_{d1+1}|, infinite when d2 = 0
  std::vector<Complex> eigenvalues;
};

/// Throws GapError when the modulus ratio at the split does not exceed gap_tol
/// or the split would separate a complex-conjugate pair.
[[nodiscard]] SpectralSplit split_spectrum(const DdlModel& model, int d1, double gap_tol = 1.05);

/// kappa(P_E1 kappa^{-1}(phi)): base point of the fiber through phi.
[[nodiscard]] Vector fiber_project(const DdlModel& model, const SpectralSplit& split, const Vector& phi);
[[nodiscard]] Matrix fiber_project(const DdlModel& model, const SpectralSplit& split, const Matrix& phi);

/// The slow dynamics as a self-contained d1-dimensional model in the
/// observable psi = P phi, where P holds the first d1 rows of S^{-1}.
struct SlowRestriction {
  DdlModel model;
  Matrix projector;   ///< d1 x d
  Matrix slow_basis;  ///< d x d1, first d1 columns of S
  DdlModel parent;

  /// psi -> phi on the slow sub-manifold.
  [[nodiscard]] Matrix lift(const Matrix& psi) const;
  [[nodiscard]] Vector lift(const Vector& psi) const;
  /// phi -> psi of its fiber base point.
  [[nodiscard]] Vector restrict(const Vector& phi, const SpectralSplit& split) const;
};
[[nodiscard]] SlowRestriction slow_restrict(const DdlModel& model, const SpectralSplit& split);

}  // namespace ddl
