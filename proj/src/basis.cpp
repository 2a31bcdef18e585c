#include "ddl/basis.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

namespace ddl {

namespace {

int degree_of(const Exponent& e) { return std::accumulate(e.begin(), e.end(), 0); }

// Graded order: lower degree first, then decreasing lexicographic.
bool graded_before(const Exponent& a, const Exponent& b) {
  const int da = degree_of(a);
  const int db = degree_of(b);
  if (da != db) return da < db;
  return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
}

void compositions(int d, int n, int pos, Exponent& current, std::vector<Exponent>& out) {
  if (pos == d - 1) {
    current[pos] = n;
    out.push_back(current);
    return;
  }
  for (int e = n; e >= 0; --e) {
    current[pos] = e;
    compositions(d, n - e, pos + 1, current, out);
  }
}

}  // namespace

std::size_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::size_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::size_t>(n - k + i) / static_cast<std::size_t>(i);
  return r;
}

std::vector<Exponent> homogeneous_exponents(int d, int n) {
  if (d < 1 || n < 0) throw ParameterError("homogeneous_exponents: need d >= 1 and n >= 0");
  std::vector<Exponent> out;
  Exponent current(static_cast<std::size_t>(d), 0);
  compositions(d, n, 0, current, out);
  return out;
}

MonomialBasis::MonomialBasis(int dim, std::vector<Exponent> exponents)
    : dim_(dim), exponents_(std::move(exponents)) {
  if (dim_ < 1) throw ParameterError("MonomialBasis: dimension must be positive");
  if (exponents_.empty()) throw ParameterError("MonomialBasis: empty exponent list");
  min_degree_ = std::numeric_limits<int>::max();
  max_degree_ = 0;
  for (std::size_t j = 0; j < exponents_.size(); ++j) {
    const Exponent& e = exponents_[j];
    if (static_cast<int>(e.size()) != dim_) throw ShapeError("MonomialBasis: exponent length differs from dimension");
    if (std::any_of(e.begin(), e.end(), [](int v) { return v < 0; }))
      throw ParameterError("MonomialBasis: negative exponent");
    const int deg = degree_of(e);
    if (deg < 2) throw ParameterError("MonomialBasis: constant and linear monomials are not allowed");
    min_degree_ = std::min(min_degree_, deg);
    max_degree_ = std::max(max_degree_, deg);
    if (j > 0 && !graded_before(exponents_[j - 1], e))
      throw ParameterError("MonomialBasis: exponents not in strict graded-lex order at index " + std::to_string(j));
  }
}

MonomialBasis enumerate_monomials(int d, int k_min, int k_max) {
  if (d < 1) throw ParameterError("enumerate_monomials: d must be >= 1");
  if (k_min < 2 || k_max < k_min) throw ParameterError("enumerate_monomials: need 2 <= k_min <= k_max");
  std::vector<Exponent> all;
  for (int n = k_min; n <= k_max; ++n) {
    auto block = homogeneous_exponents(d, n);
    all.insert(all.end(), block.begin(), block.end());
  }
  return MonomialBasis(d, std::move(all));
}

void MonomialBasis::fill_powers(const Vector& state, Matrix& powers) const {
  powers.resize(dim_, max_degree_ + 1);
  for (int l = 0; l < dim_; ++l) {
    powers(l, 0) = 1.0;
    for (int p = 1; p <= max_degree_; ++p) powers(l, p) = powers(l, p - 1) * state(l);
  }
}

Vector MonomialBasis::eval(const Vector& state) const {
  if (state.size() != dim_) throw ShapeError("eval_features: state dimension mismatch");
  Matrix powers;
  fill_powers(state, powers);
  Vector out(static_cast<Eigen::Index>(size()));
  for (std::size_t j = 0; j < size(); ++j) {
    double v = 1.0;
    for (int l = 0; l < dim_; ++l) v *= powers(l, exponents_[j][l]);
    out(static_cast<Eigen::Index>(j)) = v;
  }
  return out;
}

Matrix MonomialBasis::eval(const Matrix& states) const {
  if (states.rows() != dim_) throw ShapeError("eval_features: state rows do not match basis dimension");
  Matrix out(static_cast<Eigen::Index>(size()), states.cols());
  for (Eigen::Index i = 0; i < states.cols(); ++i) out.col(i) = eval(Vector(states.col(i)));
  return out;
}

void MonomialBasis::eval_with_jacobian(const Vector& state, Vector& features, Matrix& jac) const {
  if (state.size() != dim_) throw ShapeError("eval_feature_jacobian: state dimension mismatch");
  Matrix powers;
  fill_powers(state, powers);
  const auto m = static_cast<Eigen::Index>(size());
  features.resize(m);
  jac.setZero(m, dim_);
  for (Eigen::Index j = 0; j < m; ++j) {
    const Exponent& e = exponents_[static_cast<std::size_t>(j)];
    double v = 1.0;
    for (int l = 0; l < dim_; ++l) v *= powers(l, e[l]);
    features(j) = v;
    for (int l = 0; l < dim_; ++l) {
      if (e[l] == 0) continue;
      double g = e[l] * powers(l, e[l] - 1);
      for (int p = 0; p < dim_; ++p)
        if (p != l) g *= powers(p, e[p]);
      jac(j, l) = g;
    }
  }
}

Matrix MonomialBasis::jacobian(const Vector& state) const {
  Vector f;
  Matrix jac;
  eval_with_jacobian(state, f, jac);
  return jac;
}

std::vector<Matrix> MonomialBasis::hessian(const Vector& state) const {
  if (state.size() != dim_) throw ShapeError("hessian: state dimension mismatch");
  Matrix powers;
  fill_powers(state, powers);
  const auto m = static_cast<Eigen::Index>(size());
  std::vector<Matrix> out(static_cast<std::size_t>(dim_), Matrix::Zero(m, dim_));
  for (Eigen::Index j = 0; j < m; ++j) {
    const Exponent& e = exponents_[static_cast<std::size_t>(j)];
    for (int l = 0; l < dim_; ++l) {
      for (int p = 0; p < dim_; ++p) {
        Exponent r = e;
        double c = 1.0;
        c *= r[l];
        if (r[l] == 0) continue;
        r[l] -= 1;
        c *= r[p];
        if (r[p] == 0) continue;
        r[p] -= 1;
        double v = c;
        for (int q = 0; q < dim_; ++q) v *= powers(q, r[q]);
        out[static_cast<std::size_t>(l)](j, p) = v;
      }
    }
  }
  return out;
}

Matrix eval_features(const MonomialBasis& basis, const Matrix& states) { return basis.eval(states); }

Matrix eval_feature_jacobian(const MonomialBasis& basis, const Vector& state) { return basis.jacobian(state); }

}  // namespace ddl
