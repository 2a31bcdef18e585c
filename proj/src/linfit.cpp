#include "ddl/linfit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ddl/spectral.hpp"

namespace ddl {

SnapshotPairs::SnapshotPairs(Matrix states, Matrix images, double step)
    : phi(std::move(states)), phi_hat(std::move(images)), dt(step) {
  if (phi.rows() != phi_hat.rows() || phi.cols() != phi_hat.cols())
    throw ShapeError("SnapshotPairs: state and image matrices differ in shape");
  if (!(dt > 0.0)) throw ParameterError("SnapshotPairs: dt must be positive");
}

LstsqResult lstsq_right(const Matrix& x, const Matrix& y, const LstsqOptions& opts) {
  if (x.cols() != y.cols()) throw ShapeError("lstsq: sample counts differ");
  if (x.cols() == 0 || x.rows() == 0) throw ParameterError("lstsq: empty data");
  Eigen::BDCSVD<Matrix> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  LstsqResult out;
  out.singular_values = s;
  const double cut = s.size() > 0 ? opts.rel_tol * s(0) : 0.0;
  Vector inv = Vector::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > cut && s(i) > 0.0) {
      inv(i) = 1.0 / s(i);
      ++out.rank;
    }
  }
  // X^+ = V S^-1 U^T
  out.coeffs = ((y * svd.matrixV()) * inv.asDiagonal()) * svd.matrixU().transpose();
  return out;
}

LinearModel fit_dmd(const SnapshotPairs& pairs, const LstsqOptions& opts) {
  if (pairs.count() == 0 || pairs.dim() == 0) throw ParameterError("fit_dmd: empty data");
  LinearModel model;
  model.kind = LinearKind::Dmd;
  model.d = pairs.dim();
  model.dt = pairs.dt;
  auto ls = lstsq_right(pairs.phi, pairs.phi_hat, opts);
  model.D = std::move(ls.coeffs);
  if (ls.rank < pairs.dim())
    model.warnings.push_back("rank-deficient data: row rank " + std::to_string(ls.rank) + " < d = " +
                             std::to_string(pairs.dim()) + "; truncated pseudo-inverse used");
  return model;
}

LinearModel fit_edmd(const SnapshotPairs& pairs, int k, const LstsqOptions& opts) {
  if (pairs.count() == 0 || pairs.dim() == 0) throw ParameterError("fit_edmd: empty data");
  const int d = pairs.dim();
  MonomialBasis basis = enumerate_monomials(d, 2, k);
  const auto n_lift = static_cast<Eigen::Index>(d + basis.size());
  Matrix psi(n_lift, pairs.count());
  Matrix psi_hat(n_lift, pairs.count());
  psi.topRows(d) = pairs.phi;
  psi.bottomRows(n_lift - d) = basis.eval(pairs.phi);
  psi_hat.topRows(d) = pairs.phi_hat;
  psi_hat.bottomRows(n_lift - d) = basis.eval(pairs.phi_hat);

  LinearModel model;
  model.kind = LinearKind::Edmd;
  model.d = d;
  model.dt = pairs.dt;
  if (pairs.count() < n_lift)
    model.warnings.push_back("overfit regime: " + std::to_string(pairs.count()) + " samples < lifted dimension " +
                             std::to_string(n_lift));
  auto ls = lstsq_right(psi, psi_hat, opts);
  model.D = std::move(ls.coeffs);
  if (ls.rank < n_lift)
    model.warnings.push_back("rank-deficient lifted data: rank " + std::to_string(ls.rank) + " < " +
                             std::to_string(n_lift));
  model.basis = std::move(basis);
  return model;
}

Matrix predict(const LinearModel& model, const Vector& phi0, int n) {
  if (phi0.size() != model.d) throw ShapeError("predict: initial state dimension mismatch");
  if (n < 0) throw ParameterError("predict: negative step count");
  Matrix out(model.d, n + 1);
  out.col(0) = phi0;
  Vector x(model.lifted_dim());
  x.head(model.d) = phi0;
  if (model.kind == LinearKind::Edmd) x.tail(x.size() - model.d) = model.basis->eval(phi0);
  for (int j = 1; j <= n; ++j) {
    x = model.D * x;
    out.col(j) = x.head(model.d);
  }
  return out;
}

std::vector<Complex> spectrum(const LinearModel& model) { return sorted_eigenvalues(model.D); }

Matrix continuous_generator(const LinearModel& model) { return principal_log(model.D) / model.dt; }

Vector PolynomialDynamics::apply(const Vector& phi) const { return linear * phi + coeffs * basis.eval(phi); }

PolynomialDynamics fit_polynomial_dynamics(const SnapshotPairs& pairs, int k, const LstsqOptions& opts) {
  if (pairs.count() == 0 || pairs.dim() == 0) throw ParameterError("fit_polynomial_dynamics: empty data");
  const int d = pairs.dim();
  PolynomialDynamics out;
  out.basis = enumerate_monomials(d, 2, k);
  out.dt = pairs.dt;
  const auto p = static_cast<Eigen::Index>(d + out.basis.size());
  Matrix x(p, pairs.count());
  x.topRows(d) = pairs.phi;
  x.bottomRows(p - d) = out.basis.eval(pairs.phi);
  if (pairs.count() < p)
    out.warnings.push_back("overfit regime: " + std::to_string(pairs.count()) + " samples < " + std::to_string(p) +
                           " regression coefficients per row");
  auto ls = lstsq_right(x, pairs.phi_hat, opts);
  if (ls.rank < p) out.warnings.push_back("rank-deficient regression matrix");
  out.linear = ls.coeffs.leftCols(d);
  out.coeffs = ls.coeffs.rightCols(p - d);
  return out;
}

bool DataReport::has_flag(const std::string& f) const { return std::find(flags.begin(), flags.end(), f) != flags.end(); }

DataReport data_diagnostics(const SnapshotPairs& pairs, int d, const DiagnosticsOptions& opts) {
  DataReport rep;
  if (pairs.count() == 0) {
    rep.flags.push_back("empty");
    return rep;
  }
  Eigen::BDCSVD<Matrix> svd(pairs.phi);
  rep.singular_values = svd.singularValues();
  const Vector& s = rep.singular_values;
  const double top = s.size() > 0 ? s(0) : 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > opts.rank_tol * top && s(i) > 0.0) ++rep.rank;
  const double smallest = s.size() > 0 ? s(s.size() - 1) : 0.0;
  rep.condition = smallest > 0.0 ? top / smallest : std::numeric_limits<double>::infinity();
  if (pairs.count() >= 4) rep.frequency_count = count_dominant_frequencies(pairs.phi, opts.peak_fraction);

  if (rep.rank < d) rep.flags.push_back("rank_deficient");
  if (pairs.count() < pairs.dim()) rep.flags.push_back("too_few_samples");
  if (rep.rank >= d && rep.condition > opts.condition_limit) rep.flags.push_back("ill_conditioned");
  if (rep.frequency_count > (d + 1) / 2) rep.flags.push_back("excess_frequencies");
  return rep;
}

ObservableRank observable_rank(const Matrix& observable_jacobian, const Matrix& subspace, double rel_tol) {
  if (observable_jacobian.cols() != subspace.rows())
    throw ShapeError("observable_rank: Jacobian columns differ from subspace ambient dimension");
  const Matrix restricted = observable_jacobian * subspace;
  Eigen::JacobiSVD<Matrix> svd(restricted);
  ObservableRank out;
  out.singular_values = svd.singularValues();
  const double top = out.singular_values.size() > 0 ? out.singular_values(0) : 0.0;
  for (Eigen::Index i = 0; i < out.singular_values.size(); ++i)
    if (out.singular_values(i) > rel_tol * top && out.singular_values(i) > 0.0) ++out.rank;
  out.ok = out.rank == observable_jacobian.rows();
  return out;
}

}  // namespace ddl
