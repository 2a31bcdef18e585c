#include "ddl/analytic.hpp"

#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "ddl/series.hpp"

namespace ddl {

namespace {

using series::PolyMap;
using series::Polynomial;

enum class Kind { Flow, Map };

std::string exponent_string(const Exponent& e) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < e.size(); ++i) os << (i ? "," : "") << e[i];
  os << ')';
  return os.str();
}

/// Checks m.lambda - lambda_i (flow) or lambda^m - lambda_i (map) for |m| = n.
void check_resonance(Kind kind, const Eigen::VectorXcd& lambda, const std::vector<Exponent>& exps, double tol) {
  for (const auto& m : exps) {
    Complex combo = kind == Kind::Flow ? Complex(0.0) : Complex(1.0);
    for (std::size_t l = 0; l < m.size(); ++l) {
      if (kind == Kind::Flow) combo += static_cast<double>(m[l]) * lambda(static_cast<Eigen::Index>(l));
      else combo *= std::pow(lambda(static_cast<Eigen::Index>(l)), m[l]);
    }
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
      if (std::abs(combo - lambda(i)) < tol) {
        std::ostringstream os;
        os << "resonance at order " << (std::accumulate(m.begin(), m.end(), 0)) << ": multi-index "
           << exponent_string(m) << " against eigenvalue " << lambda(i).real() << (lambda(i).imag() < 0 ? "" : "+")
           << lambda(i).imag() << "i (distance " << std::abs(combo - lambda(i)) << ")";
        throw ResonanceError(os.str());
      }
    }
  }
}

Matrix solve_homological(Kind kind, const Matrix& b, const MonomialBasis& q_basis, const Matrix& q, int r,
                         const AnalyticOptions& opts) {
  const auto d = static_cast<int>(b.rows());
  if (b.cols() != d) throw ShapeError("analytic linearization: B must be square");
  if (q_basis.dim() != d || q.rows() != d || q.cols() != static_cast<Eigen::Index>(q_basis.size()))
    throw ShapeError("analytic linearization: q shape does not match B and its basis");
  if (r < 2) throw ParameterError("analytic linearization: order must be at least 2");

  const MonomialBasis out_basis = enumerate_monomials(d, 2, r);
  const Eigen::VectorXcd lambda = Eigen::EigenSolver<Matrix>(b, false).eigenvalues();
  const double scale = std::max(b.norm(), 1e-300);

  const PolyMap q_map = series::from_coefficients(q_basis, q);
  PolyMap ell(static_cast<std::size_t>(d), Polynomial{d, {}});
  const PolyMap b_lin = series::linear(b);

  for (int n = 2; n <= r; ++n) {
    const std::vector<Exponent> exps = homogeneous_exponents(d, n);
    check_resonance(kind, lambda, exps, opts.resonance_tol * scale);

    std::map<Exponent, Eigen::Index> index;
    for (std::size_t j = 0; j < exps.size(); ++j) index[exps[j]] = static_cast<Eigen::Index>(j);
    const auto nk = static_cast<Eigen::Index>(exps.size());
    const Eigen::Index size = d * nk;

    // Column (i, e) holds the operator applied to e_i * gamma^e.
    Matrix op = Matrix::Zero(size, size);
    for (int i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < nk; ++j) {
        const Exponent& e = exps[static_cast<std::size_t>(j)];
        const Eigen::Index col = i * nk + j;
        if (kind == Kind::Flow) {
          for (int l = 0; l < d; ++l) {
            if (e[static_cast<std::size_t>(l)] == 0) continue;
            for (int p = 0; p < d; ++p) {
              if (b(l, p) == 0.0) continue;
              Exponent f = e;
              f[static_cast<std::size_t>(l)] -= 1;
              f[static_cast<std::size_t>(p)] += 1;
              op(i * nk + index.at(f), col) += e[static_cast<std::size_t>(l)] * b(l, p);
            }
          }
        } else {
          Polynomial mono{d, {}};
          mono.add(e, 1.0);
          const PolyMap img = series::compose(PolyMap{mono}, b_lin, n);
          for (const auto& [f, c] : img.front().terms) op(i * nk + index.at(f), col) += c;
        }
        for (int s = 0; s < d; ++s) op(s * nk + j, col) -= b(s, i);
      }
    }

    PolyMap inner = series::identity(d);
    for (int l = 0; l < d; ++l)
      inner[static_cast<std::size_t>(l)] = series::add(inner[static_cast<std::size_t>(l)], ell[static_cast<std::size_t>(l)]);
    const PolyMap rhs_map = series::homogeneous_part(series::compose(q_map, inner, n), n);
    Vector rhs = Vector::Zero(size);
    for (int i = 0; i < d; ++i)
      for (const auto& [f, c] : rhs_map[static_cast<std::size_t>(i)].terms) rhs(i * nk + index.at(f)) = c;

    Eigen::PartialPivLU<Matrix> lu(op);
    const Vector sol = lu.solve(rhs);
    if (!sol.allFinite()) throw ResonanceError("analytic linearization: singular homological operator at order " + std::to_string(n));
    for (int i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < nk; ++j) ell[static_cast<std::size_t>(i)].add(exps[static_cast<std::size_t>(j)], sol(i * nk + j));
  }
  return series::to_coefficients(ell, out_basis);
}

}  // namespace

Matrix analytic_linearize(const Matrix& b_cont, const MonomialBasis& q_basis, const Matrix& q, int r,
                          const AnalyticOptions& opts) {
  return solve_homological(Kind::Flow, b_cont, q_basis, q, r, opts);
}

Matrix analytic_linearize_map(const Matrix& b_disc, const MonomialBasis& q_basis, const Matrix& q, int r,
                              const AnalyticOptions& opts) {
  return solve_homological(Kind::Map, b_disc, q_basis, q, r, opts);
}

DdlModel linearization_model(const Matrix& b_disc, const Matrix& ell, int r, double dt) {
  DdlModel model;
  model.d = static_cast<int>(b_disc.rows());
  model.basis = enumerate_monomials(model.d, 2, r);
  model.B = b_disc;
  model.Qinv = ell;
  model.Q = series::invert_near_identity(model.basis, ell);
  model.dt = dt;
  model.validate();
  return model;
}

}  // namespace ddl
