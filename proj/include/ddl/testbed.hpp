/**
 * @file testbed.hpp
 * @brief Reference dynamical systems used as data generators and oracles.
 */
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ddl/basis.hpp"
#include "ddl/ode.hpp"
#include "ddl/types.hpp"

namespace ddl::testbed {

enum class SystemKind { Ode, Map };

struct SystemSpec {
  std::string name;
  SystemKind kind = SystemKind::Ode;
  int dim = 0;
  std::map<std::string, double> params;
  OdeRhs rhs;                                      ///< f(t, x) for ODEs
  std::function<Vector(const Vector&)> step;       ///< x -> F(x) for maps
  std::function<Vector(const Vector&)> observable; ///< identity when empty
  std::optional<Vector> fixed_point;
  std::vector<Complex> eigenvalues;                ///< at the fixed point, sorted by sorted_eigenvalues' rule
  std::map<std::string, double> metadata;

  [[nodiscard]] Vector observe(const Vector& x) const { return observable ? observable(x) : x; }
  [[nodiscard]] Matrix observe(const Matrix& xs) const;
};

/// R' = R - R^3.
[[nodiscard]] SystemSpec stuart_landau_radial();

struct NonnormalParams {
  double a = 0.45 * 1.7320508075688772;
  double b = 0.5;
  double c = 0.6;
  double theta1 = 1.5;
  double theta2 = 0.0;
};
[[nodiscard]] Matrix nonnormal_matrix(const NonnormalParams& p = {});
/// x -> R Lambda R^{-1} x observed through y_i = x_i + 0.1 (x_i^2 + x_j x_k).
[[nodiscard]] SystemSpec three_d_nonnormal_map(const NonnormalParams& p = {});
/// Initial conditions uniformly distributed in the shell r_min < |x| < r_max.
[[nodiscard]] Matrix random_initial_conditions(int dim, int count, double r_min, double r_max, std::uint64_t seed);

struct DuffingParams {
  double damping = 0.0141;
  double epsilon = 0.0;
  double omega = 1.0;  ///< forcing frequency
};
/// x' = y, y' = x - x^3 - d y + eps cos(Omega t).
[[nodiscard]] SystemSpec duffing(const DuffingParams& p = {});

/// phi = T^{-1} (x - 1, y) with T = [Im v, Re v] for the eigenvector v of
/// -alpha + i omega; the linear part becomes [[-alpha, -omega], [omega, -alpha]].
struct DuffingCoordinates {
  Matrix T;
  Matrix T_inv;
  Matrix A;
  Vector forcing;  ///< T^{-1} (0, 1)
  MonomialBasis basis;  ///< degrees 2..3 in phi
  Matrix q;             ///< phi' = A phi + q K(phi) exactly

  [[nodiscard]] Vector to_phi(const Vector& xy) const;
  [[nodiscard]] Vector from_phi(const Vector& phi) const;
  [[nodiscard]] Matrix to_phi(const Matrix& xy) const;
};
[[nodiscard]] DuffingCoordinates duffing_coordinates(double damping = 0.0141);
/// The Duffing system written in phi coordinates (forcing enters as eps * forcing * cos).
[[nodiscard]] SystemSpec duffing_phi(const DuffingParams& p = {});

struct ChainParams {
  int masses = 5;
  double stiffness = 1.0;
  double mass_damping = 0.002;
  double stiffness_damping = 0.005;
  double cubic = 0.5;      ///< grounding cubic spring on mass 1
  bool fixed_free = true;  ///< false: fixed-fixed
};
[[nodiscard]] Matrix chain_stiffness(const ChainParams& p = {});
/// State (q, q_dot).
[[nodiscard]] SystemSpec oscillator_chain(const ChainParams& p = {});
/// Linear part of the chain as a first-order system.
[[nodiscard]] Matrix chain_linear_part(const ChainParams& p = {});

/// Real basis (Re e_j, Im e_j) of the j-th slowest complex mode pair of the
/// chain, 0-based, as a (2n) x 2 matrix.
[[nodiscard]] Matrix chain_mode_plane(int j, const ChainParams& p = {});

/// x' = -x + |x|^{1+alpha}.
[[nodiscard]] SystemSpec nonsmooth_1d(double alpha);

/// x -> A x.
[[nodiscard]] SystemSpec linear_map(const Matrix& a);

struct ObservableCheck {
  std::string name;
  Matrix jacobian;  ///< 2 x 10 at the origin
  int rank_on_E = 0;
  bool ok = false;
};
/// The three candidate 2D observables of the chain: projections onto
/// (Re e1, Im e1), (q1, q1_dot) and (q1, q2), each with its rank on the slow plane.
[[nodiscard]] std::vector<ObservableCheck> rank_degeneracy_observables(const ChainParams& p = {});

[[nodiscard]] Trajectory integrate(const SystemSpec& spec, const Vector& x0, double t_end, double dt_out,
                                   const Rk45Options& opts = {});
[[nodiscard]] Trajectory iterate(const SystemSpec& spec, const Vector& x0, int n);

/// Finite-difference Jacobian of the autonomous vector field or map at x.
[[nodiscard]] Matrix numerical_jacobian(const SystemSpec& spec, const Vector& x, double h = 1e-6);

/// Names accepted by make_system: stuart_landau, nonnormal3d, duffing,
/// duffing_phi, chain, nonsmooth.
[[nodiscard]] std::vector<std::string> system_names();
[[nodiscard]] SystemSpec make_system(const std::string& name, const std::map<std::string, double>& params = {});

}  // namespace ddl::testbed
