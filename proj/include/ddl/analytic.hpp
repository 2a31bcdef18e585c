/**
 * @file analytic.hpp
 * @brief Order-by-order Taylor solution of the linearizing conjugacy for a
 * known polynomial vector field or map.
 *
 * For a flow phi' = B phi + q(phi), the map kappa(gamma) = gamma + ell(gamma)
 * conjugates gamma' = B gamma to the nonlinear system when
 * D ell(gamma) B gamma - B ell(gamma) = q(gamma + ell(gamma)).
 * For a map phi -> B phi + q(phi) the condition reads
 * ell(B gamma) - B ell(gamma) = q(gamma + ell(gamma)).
 */
#pragma once

#include "ddl/basis.hpp"
#include "ddl/model.hpp"
#include "ddl/types.hpp"

namespace ddl {

struct AnalyticOptions {
  /// Resonance threshold relative to |B| (spectral radius scale).
  double resonance_tol = 1e-8;
};

/// Coefficients of ell on enumerate_monomials(d, 2, r), d x M.
[[nodiscard]] Matrix analytic_linearize(const Matrix& b_cont, const MonomialBasis& q_basis, const Matrix& q, int r,
                                        const AnalyticOptions& opts = {});

[[nodiscard]] Matrix analytic_linearize_map(const Matrix& b_disc, const MonomialBasis& q_basis, const Matrix& q, int r,
                                            const AnalyticOptions& opts = {});

/// Packages ell as a DdlModel: Qinv = ell, Q = series inverse of kappa,
/// B = b_disc. The training hull is left empty.
[[nodiscard]] DdlModel linearization_model(const Matrix& b_disc, const Matrix& ell, int r, double dt);

}  // namespace ddl
