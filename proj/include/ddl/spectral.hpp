/**
 * @file spectral.hpp
 * @brief Eigenvalue ordering, matrix logarithm/exponential, numerical rank
 * and power-spectrum peak counting.
 */
#pragma once

#include <vector>

#include "ddl/types.hpp"

namespace ddl {

/// Eigenvalues sorted by decreasing modulus, ties broken by increasing argument.
[[nodiscard]] std::vector<Complex> sorted_eigenvalues(const Matrix& a);

/// Sorts in place with the same rule as sorted_eigenvalues.
void sort_by_modulus(std::vector<Complex>& values);

/// Principal logarithm of a real matrix with no eigenvalues on the closed
/// negative real axis. Throws NumericalError otherwise.
[[nodiscard]] Matrix principal_log(const Matrix& a);

[[nodiscard]] Matrix matrix_exp(const Matrix& a);

/// Number of singular values above rel_tol * largest.
[[nodiscard]] int numerical_rank(const Matrix& a, double rel_tol = 1e-10);

/// One-sided Hann-windowed power spectrum of each row, summed over rows.
[[nodiscard]] Vector power_spectrum(const Matrix& rows);

/// Peaks whose topographic prominence is at least `fraction` of the largest
/// power value. Returns the bin indices.
[[nodiscard]] std::vector<int> spectral_peaks(const Vector& power, double fraction);

/// Convenience: spectral_peaks(power_spectrum(rows), fraction).size().
[[nodiscard]] int count_dominant_frequencies(const Matrix& rows, double fraction = 0.1);

}  // namespace ddl
