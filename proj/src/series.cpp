#include "ddl/series.hpp"

#include <algorithm>
#include <numeric>

namespace ddl::series {

namespace {

int degree_of(const Exponent& e) { return std::accumulate(e.begin(), e.end(), 0); }

}  // namespace

void Polynomial::add(const Exponent& e, double c) {
  if (c == 0.0) return;
  auto [it, inserted] = terms.emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) terms.erase(it);
  }
}

Polynomial constant(int dim, double c) {
  Polynomial p{dim, {}};
  p.add(Exponent(static_cast<std::size_t>(dim), 0), c);
  return p;
}

Polynomial variable(int dim, int l) {
  Polynomial p{dim, {}};
  Exponent e(static_cast<std::size_t>(dim), 0);
  e[static_cast<std::size_t>(l)] = 1;
  p.add(e, 1.0);
  return p;
}

Polynomial multiply(const Polynomial& a, const Polynomial& b, int max_degree) {
  Polynomial out{a.dim, {}};
  Exponent e(static_cast<std::size_t>(a.dim), 0);
  for (const auto& [ea, ca] : a.terms) {
    const int da = degree_of(ea);
    for (const auto& [eb, cb] : b.terms) {
      if (da + degree_of(eb) > max_degree) continue;
      for (std::size_t l = 0; l < e.size(); ++l) e[l] = ea[l] + eb[l];
      out.add(e, ca * cb);
    }
  }
  return out;
}

Polynomial add(const Polynomial& a, const Polynomial& b, double scale_b) {
  Polynomial out = a;
  for (const auto& [e, c] : b.terms) out.add(e, scale_b * c);
  return out;
}

PolyMap identity(int dim) {
  PolyMap out;
  for (int l = 0; l < dim; ++l) out.push_back(variable(dim, l));
  return out;
}

PolyMap linear(const Matrix& a) {
  const int dim = static_cast<int>(a.cols());
  PolyMap out(static_cast<std::size_t>(a.rows()), Polynomial{dim, {}});
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (int l = 0; l < dim; ++l) {
      Exponent e(static_cast<std::size_t>(dim), 0);
      e[static_cast<std::size_t>(l)] = 1;
      out[static_cast<std::size_t>(i)].add(e, a(i, l));
    }
  }
  return out;
}

PolyMap from_coefficients(const MonomialBasis& basis, const Matrix& coeffs) {
  if (coeffs.cols() != static_cast<Eigen::Index>(basis.size()))
    throw ShapeError("from_coefficients: coefficient columns do not match basis");
  PolyMap out(static_cast<std::size_t>(coeffs.rows()), Polynomial{basis.dim(), {}});
  for (Eigen::Index i = 0; i < coeffs.rows(); ++i)
    for (std::size_t j = 0; j < basis.size(); ++j)
      out[static_cast<std::size_t>(i)].add(basis[j], coeffs(i, static_cast<Eigen::Index>(j)));
  return out;
}

Matrix to_coefficients(const PolyMap& map, const MonomialBasis& basis) {
  Matrix out(static_cast<Eigen::Index>(map.size()), static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < map.size(); ++i)
    for (std::size_t j = 0; j < basis.size(); ++j)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = map[i].coeff(basis[j]);
  return out;
}

PolyMap compose(const PolyMap& outer, const PolyMap& inner, int max_degree) {
  if (outer.empty()) return {};
  const int inner_dim = inner.empty() ? 0 : inner.front().dim;
  if (static_cast<int>(inner.size()) != outer.front().dim)
    throw ShapeError("compose: inner map size differs from outer dimension");

  int needed = 0;
  for (const auto& p : outer)
    for (const auto& [e, c] : p.terms)
      for (int v : e) needed = std::max(needed, v);

  // powers[l][k] = inner_l^k truncated
  std::vector<std::vector<Polynomial>> powers(inner.size());
  for (std::size_t l = 0; l < inner.size(); ++l) {
    powers[l].push_back(constant(inner_dim, 1.0));
    for (int k = 1; k <= needed; ++k) powers[l].push_back(multiply(powers[l].back(), inner[l], max_degree));
  }

  PolyMap out(outer.size(), Polynomial{inner_dim, {}});
  std::map<Exponent, Polynomial> cache;
  for (std::size_t i = 0; i < outer.size(); ++i) {
    for (const auto& [e, c] : outer[i].terms) {
      auto it = cache.find(e);
      if (it == cache.end()) {
        Polynomial prod = constant(inner_dim, 1.0);
        for (std::size_t l = 0; l < e.size(); ++l)
          if (e[l] > 0) prod = multiply(prod, powers[l][static_cast<std::size_t>(e[l])], max_degree);
        it = cache.emplace(e, std::move(prod)).first;
      }
      out[i] = add(out[i], it->second, c);
    }
  }
  return out;
}

PolyMap homogeneous_part(const PolyMap& map, int n) {
  PolyMap out;
  for (const auto& p : map) {
    Polynomial q{p.dim, {}};
    for (const auto& [e, c] : p.terms)
      if (degree_of(e) == n) q.add(e, c);
    out.push_back(std::move(q));
  }
  return out;
}

Matrix invert_near_identity(const MonomialBasis& basis, const Matrix& coeffs) {
  const int d = basis.dim();
  const int r = basis.max_degree();
  if (coeffs.rows() != d) throw ShapeError("invert_near_identity: coefficient rows must equal dimension");
  const PolyMap ell = from_coefficients(basis, coeffs);
  // p = -ell(y + p(y)); each sweep fixes one more order.
  PolyMap p(static_cast<std::size_t>(d), Polynomial{d, {}});
  for (int sweep = 2; sweep <= r; ++sweep) {
    PolyMap inner = identity(d);
    for (int l = 0; l < d; ++l) inner[static_cast<std::size_t>(l)] = add(inner[static_cast<std::size_t>(l)], p[static_cast<std::size_t>(l)]);
    PolyMap composed = compose(ell, inner, r);
    for (auto& poly : composed)
      for (auto& [e, c] : poly.terms) c = -c;
    p = std::move(composed);
  }
  return to_coefficients(p, basis);
}

}  // namespace ddl::series
