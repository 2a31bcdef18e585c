/**
 * @file basis.hpp
 * @brief Multivariate monomial feature maps K(phi) and their derivatives.
 */
#pragma once

#include <cstddef>
#include <vector>

#include "ddl/types.hpp"

namespace ddl {

using Exponent = std::vector<int>;

/// Ordered set of monomials of a fixed dimension with total degrees in
/// [min_degree, max_degree], min_degree >= 2.
///
/// Ordering is graded lexicographic: increasing total degree, and within a
/// degree the exponent vectors in decreasing lexicographic order, e.g.
/// (2,0), (1,1), (0,2).
class MonomialBasis {
 public:
  MonomialBasis() = default;

  /// Builds a basis from an explicit exponent list; validates the ordering.
  MonomialBasis(int dim, std::vector<Exponent> exponents);

  [[nodiscard]] int dim() const { return dim_; }
  [[nodiscard]] std::size_t size() const { return exponents_.size(); }
  [[nodiscard]] int min_degree() const { return min_degree_; }
  [[nodiscard]] int max_degree() const { return max_degree_; }
  [[nodiscard]] const std::vector<Exponent>& exponents() const { return exponents_; }
  [[nodiscard]] const Exponent& operator[](std::size_t j) const { return exponents_[j]; }

  /// Features of every column: result is size() x states.cols().
  [[nodiscard]] Matrix eval(const Matrix& states) const;
  [[nodiscard]] Vector eval(const Vector& state) const;

  /// size() x dim() matrix of first partial derivatives at `state`.
  [[nodiscard]] Matrix jacobian(const Vector& state) const;

  /// Second derivatives; entry l is the size() x dim() matrix of
  /// d^2 K_j / (d gamma_l d gamma_p).
  [[nodiscard]] std::vector<Matrix> hessian(const Vector& state) const;

  /// Evaluates features and their Jacobian together.
  void eval_with_jacobian(const Vector& state, Vector& features, Matrix& jac) const;

  friend bool operator==(const MonomialBasis& a, const MonomialBasis& b) {
    return a.dim_ == b.dim_ && a.exponents_ == b.exponents_;
  }

 private:
  void fill_powers(const Vector& state, Matrix& powers) const;

  int dim_ = 0;
  int min_degree_ = 0;
  int max_degree_ = 0;
  std::vector<Exponent> exponents_;
};

/// Graded-lex basis of all d-variate monomials of degree k_min..k_max.
[[nodiscard]] MonomialBasis enumerate_monomials(int d, int k_min, int k_max);

/// All exponent vectors of dimension d with total degree exactly n, in
/// decreasing lexicographic order. Degree 0 and 1 are allowed here.
[[nodiscard]] std::vector<Exponent> homogeneous_exponents(int d, int n);

[[nodiscard]] Matrix eval_features(const MonomialBasis& basis, const Matrix& states);
[[nodiscard]] Matrix eval_feature_jacobian(const MonomialBasis& basis, const Vector& state);

/// Binomial coefficient C(n, k) for small arguments.
[[nodiscard]] std::size_t binomial(int n, int k);

}  // namespace ddl
