/**
 * @file series.hpp
 * @brief Truncated multivariate power series used by the analytic
 * linearization: products, composition and near-identity inversion.
 */
#pragma once

#include <map>
#include <vector>

#include "ddl/basis.hpp"
#include "ddl/types.hpp"

namespace ddl::series {

/// Scalar polynomial in `dim` variables; terms keyed by exponent vector.
struct Polynomial {
  int dim = 0;
  std::map<Exponent, double> terms;

  [[nodiscard]] double coeff(const Exponent& e) const {
    auto it = terms.find(e);
    return it == terms.end() ? 0.0 : it->second;
  }
  void add(const Exponent& e, double c);
};

/// Vector-valued polynomial map R^dim -> R^size().
using PolyMap = std::vector<Polynomial>;

[[nodiscard]] Polynomial constant(int dim, double c);
[[nodiscard]] Polynomial variable(int dim, int l);
[[nodiscard]] Polynomial multiply(const Polynomial& a, const Polynomial& b, int max_degree);
[[nodiscard]] Polynomial add(const Polynomial& a, const Polynomial& b, double scale_b = 1.0);

/// Identity map on R^dim.
[[nodiscard]] PolyMap identity(int dim);

/// Linear map x -> A x.
[[nodiscard]] PolyMap linear(const Matrix& a);

/// Map x -> coeffs * K(x) for a monomial basis (no linear part).
[[nodiscard]] PolyMap from_coefficients(const MonomialBasis& basis, const Matrix& coeffs);

/// Reads the coefficients of `map` on `basis` (terms outside the basis ignored).
[[nodiscard]] Matrix to_coefficients(const PolyMap& map, const MonomialBasis& basis);

/// outer(inner(x)) truncated at total degree `max_degree`.
[[nodiscard]] PolyMap compose(const PolyMap& outer, const PolyMap& inner, int max_degree);

/// Degree-n homogeneous part of each component.
[[nodiscard]] PolyMap homogeneous_part(const PolyMap& map, int n);

/// Given kappa(g) = g + coeffs*K(g), returns p with kappa^{-1}(y) = y + p*K(y)
/// correct through the basis' maximal degree.
[[nodiscard]] Matrix invert_near_identity(const MonomialBasis& basis, const Matrix& coeffs);

}  // namespace ddl::series
