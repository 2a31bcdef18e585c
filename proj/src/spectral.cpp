#include "ddl/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include <unsupported/Eigen/FFT>
#include <unsupported/Eigen/MatrixFunctions>

namespace ddl {

void sort_by_modulus(std::vector<Complex>& values) {
  std::sort(values.begin(), values.end(), [](const Complex& a, const Complex& b) {
    const double ma = std::abs(a);
    const double mb = std::abs(b);
    if (std::abs(ma - mb) > 1e-12 * std::max({1.0, ma, mb})) return ma > mb;
    return std::arg(a) < std::arg(b);
  });
}

std::vector<Complex> sorted_eigenvalues(const Matrix& a) {
  if (a.rows() != a.cols()) throw ShapeError("sorted_eigenvalues: matrix must be square");
  Eigen::EigenSolver<Matrix> es(a, false);
  std::vector<Complex> out(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  sort_by_modulus(out);
  return out;
}

Matrix principal_log(const Matrix& a) {
  if (a.rows() != a.cols()) throw ShapeError("principal_log: matrix must be square");
  Eigen::EigenSolver<Matrix> es(a);
  const ComplexVector lambda = es.eigenvalues();
  const double scale = std::max(1.0, a.norm());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    const Complex l = lambda(i);
    if (std::abs(l) <= 1e-14 * scale)
      throw NumericalError("principal_log: zero eigenvalue, logarithm undefined");
    if (l.real() < 0.0 && std::abs(l.imag()) <= 1e-12 * std::abs(l))
      throw NumericalError("principal_log: eigenvalue on the negative real axis, no real principal logarithm");
  }
  const ComplexMatrix v = es.eigenvectors();
  Eigen::JacobiSVD<ComplexMatrix> svd(v);
  const double cond = svd.singularValues()(0) / svd.singularValues().tail(1)(0);
  if (!std::isfinite(cond) || cond > 1e10) {
    // defective or nearly defective: Schur-Parlett
    return a.log();
  }
  ComplexVector log_lambda = lambda.array().log();
  const ComplexMatrix l = v * log_lambda.asDiagonal() * v.inverse();
  return l.real();
}

Matrix matrix_exp(const Matrix& a) {
  if (a.rows() != a.cols()) throw ShapeError("matrix_exp: matrix must be square");
  return a.exp();
}

int numerical_rank(const Matrix& a, double rel_tol) {
  if (a.size() == 0) return 0;
  Eigen::BDCSVD<Matrix> svd(a);
  const Vector& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > rel_tol * s(0)) ++r;
  return r;
}

Vector power_spectrum(const Matrix& rows) {
  const auto n = static_cast<int>(rows.cols());
  if (n < 4) throw ParameterError("power_spectrum: need at least 4 samples");
  std::vector<double> window(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) window[static_cast<std::size_t>(i)] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / (n - 1));

  Eigen::FFT<double> fft;
  Vector power = Vector::Zero(n / 2 + 1);
  std::vector<double> buf(static_cast<std::size_t>(n));
  std::vector<std::complex<double>> spec;
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    for (int i = 0; i < n; ++i) buf[static_cast<std::size_t>(i)] = rows(r, i) * window[static_cast<std::size_t>(i)];
    fft.fwd(spec, buf);
    for (int k = 0; k <= n / 2; ++k) power(k) += std::norm(spec[static_cast<std::size_t>(k)]);
  }
  return power;
}

std::vector<int> spectral_peaks(const Vector& power, double fraction) {
  const auto n = static_cast<int>(power.size());
  std::vector<int> out;
  if (n == 0) return out;
  const double top = power.maxCoeff();
  if (top <= 0.0) return out;
  for (int i = 0; i < n; ++i) {
    const double h = power(i);
    const bool left_ok = i == 0 || h > power(i - 1);
    const bool right_ok = i == n - 1 || h >= power(i + 1);
    if (!left_ok || !right_ok) continue;
    // prominence: descend on each side until a higher point or the edge
    double left_min = h;
    for (int j = i - 1; j >= 0 && power(j) <= h; --j) left_min = std::min(left_min, power(j));
    double right_min = h;
    for (int j = i + 1; j < n && power(j) <= h; ++j) right_min = std::min(right_min, power(j));
    const bool left_edge = i == 0;
    const bool right_edge = i == n - 1;
    double base;
    if (left_edge && right_edge) base = 0.0;
    else if (left_edge) base = right_min;
    else if (right_edge) base = left_min;
    else base = std::max(left_min, right_min);
    if (h - base >= fraction * top) out.push_back(i);
  }
  return out;
}

int count_dominant_frequencies(const Matrix& rows, double fraction) {
  return static_cast<int>(spectral_peaks(power_spectrum(rows), fraction).size());
}

}  // namespace ddl
