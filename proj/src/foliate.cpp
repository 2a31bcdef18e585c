#include "ddl/foliate.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "ddl/series.hpp"
#include "ddl/spectral.hpp"

namespace ddl {

SpectralSplit split_spectrum(const DdlModel& model, int d1, double gap_tol) {
  model.validate();
  const int d = model.d;
  if (d1 < 1 || d1 > d) throw ParameterError("split_spectrum: d1 must lie in [1, d]");

  Eigen::EigenSolver<Matrix> es(model.B);
  if (es.info() != Eigen::Success) throw NumericalError("split_spectrum: eigen-decomposition failed");
  std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) order[static_cast<std::size_t>(i)] = i;
  const Eigen::VectorXcd lam = es.eigenvalues();
  std::vector<Complex> vals(lam.data(), lam.data() + d);
  std::vector<Complex> sorted = vals;
  sort_by_modulus(sorted);
  // Recover eigenvector indices in sorted order.
  std::vector<bool> used(static_cast<std::size_t>(d), false);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      if (!used[static_cast<std::size_t>(j)] && vals[static_cast<std::size_t>(j)] == sorted[static_cast<std::size_t>(i)]) {
        order[static_cast<std::size_t>(i)] = j;
        used[static_cast<std::size_t>(j)] = true;
        break;
      }
    }
  }

  SpectralSplit out;
  out.d1 = d1;
  out.d2 = d - d1;
  out.eigenvalues = sorted;
  const double scale = std::abs(sorted.front()) + 1e-300;
  if (d1 < d) {
    const Complex a = sorted[static_cast<std::size_t>(d1 - 1)];
    const Complex b = sorted[static_cast<std::size_t>(d1)];
    out.gap_ratio = std::abs(b) > 0.0 ? std::abs(a) / std::abs(b) : std::numeric_limits<double>::infinity();
    const bool splits_pair = std::abs(a.imag()) > 1e-12 * scale && std::abs(a - std::conj(b)) < 1e-10 * scale;
    if (splits_pair || !(out.gap_ratio > gap_tol)) {
      std::ostringstream os;
      os << "split_spectrum: no spectral gap at position " << d1 << " (moduli";
      for (const auto& v : sorted) os << ' ' << std::abs(v);
      os << "; ratio " << out.gap_ratio << ", required > " << gap_tol << ")";
      if (splits_pair) os << "; the split separates a complex-conjugate pair";
      throw GapError(os.str());
    }
  } else {
    out.gap_ratio = std::numeric_limits<double>::infinity();
  }

  out.S.resize(d, d);
  int col = 0;
  for (int i = 0; i < d; ++i) {
    const Eigen::Index j = order[static_cast<std::size_t>(i)];
    const Complex v = lam(j);
    const Eigen::VectorXcd vec = es.eigenvectors().col(j);
    if (std::abs(v.imag()) <= 1e-12 * scale) {
      out.S.col(col++) = vec.real().normalized();
    } else if (v.imag() > 0.0) {
      out.S.col(col++) = vec.real();
      out.S.col(col++) = vec.imag();
    }
  }
  if (col != d) throw NumericalError("split_spectrum: could not assemble a real eigenbasis");
  Eigen::FullPivLU<Matrix> lu(out.S);
  if (!lu.isInvertible()) throw NumericalError("split_spectrum: B is not diagonalizable");
  out.S_inv = lu.inverse();
  out.blocks = out.S_inv * model.B * out.S;
  return out;
}

Matrix fiber_project(const DdlModel& model, const SpectralSplit& split, const Matrix& phi) {
  Matrix c = split.S_inv * to_linear_coords(model, phi);
  c.bottomRows(split.d2).setZero();
  return from_linear_coords(model, Matrix(split.S * c));
}

Vector fiber_project(const DdlModel& model, const SpectralSplit& split, const Vector& phi) {
  return fiber_project(model, split, Matrix(phi)).col(0);
}

SlowRestriction slow_restrict(const DdlModel& model, const SpectralSplit& split) {
  model.validate();
  SlowRestriction out;
  out.parent = model;
  const int d = model.d;
  const int d1 = split.d1;
  if (d1 == d) {
    out.model = model;
    out.projector = Matrix::Identity(d, d);
    out.slow_basis = Matrix::Identity(d, d);
    return out;
  }
  out.projector = split.S_inv.topRows(d1);
  out.slow_basis = split.S.leftCols(d1);
  const int r = model.order();

  // psi(c) = c + P Qinv K(S1 c) as a series in c.
  const series::PolyMap inner = series::linear(out.slow_basis);
  const series::PolyMap tail = series::compose(series::from_coefficients(model.basis, model.Qinv), inner, r);
  DdlModel& slow = out.model;
  slow.d = d1;
  slow.basis = enumerate_monomials(d1, 2, r);
  const Matrix tail_coeffs = series::to_coefficients(tail, slow.basis);
  slow.Qinv = out.projector * tail_coeffs;
  slow.Q = series::invert_near_identity(slow.basis, slow.Qinv);
  slow.B = split.blocks.topLeftCorner(d1, d1);
  slow.dt = model.dt;
  slow.nu = model.nu;
  if (model.hull_lower.size() == d) {
    Vector corner_lo(d1), corner_hi(d1);
    const Matrix& p = out.projector;
    for (int i = 0; i < d1; ++i) {
      double lo = 0.0, hi = 0.0;
      for (int k = 0; k < d; ++k) {
        const double a = p(i, k) * model.hull_lower(k);
        const double b = p(i, k) * model.hull_upper(k);
        lo += std::min(a, b);
        hi += std::max(a, b);
      }
      corner_lo(i) = lo;
      corner_hi(i) = hi;
    }
    slow.hull_lower = corner_lo;
    slow.hull_upper = corner_hi;
  }
  return out;
}

Matrix SlowRestriction::lift(const Matrix& psi) const {
  const Matrix c = to_linear_coords(model, psi);
  return from_linear_coords(parent, Matrix(slow_basis * c));
}

Vector SlowRestriction::lift(const Vector& psi) const { return lift(Matrix(psi)).col(0); }

Vector SlowRestriction::restrict(const Vector& phi, const SpectralSplit& split) const {
  return projector * fiber_project(parent, split, phi);
}

}  // namespace ddl
