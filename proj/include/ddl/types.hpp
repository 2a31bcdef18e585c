/**
 * @file types.hpp
 * @brief Common linear-algebra aliases and error types.
 */
#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ddl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
using Complex = std::complex<double>;

/// Invalid argument values (degrees, tolerances, counts).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Matrix or vector dimensions that do not agree.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed (non-convergence, singular system, blow-up).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Optimizer produced non-finite residuals.
class DivergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A nonresonance condition of the homological equation is violated.
class ResonanceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// No spectral gap at the requested split position.
class GapError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Malformed files or unreadable paths.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ddl
