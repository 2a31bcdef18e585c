#include <cmath>

#include "ddl/linfit.hpp"
#include "ddl/ode.hpp"
#include "ddl/reduce.hpp"
#include "ddl/spectral.hpp"
#include "ddl/testbed.hpp"
#include "doctest.h"

using namespace ddl;
using namespace ddl::testbed;

namespace {

double spectrum_mismatch(const std::vector<Complex>& declared, const Matrix& jac) {
  const auto numeric = sorted_eigenvalues(jac);
  double worst = 0.0;
  for (const auto& z : declared) {
    double best = 1e300;
    for (const auto& w : numeric) best = std::min(best, std::abs(z - w));
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace

TEST_CASE("declared eigenvalues match finite-difference jacobians") {
  for (const auto& name : system_names()) {
    const SystemSpec s = make_system(name);
    if (!s.fixed_point || s.eigenvalues.empty()) continue;
    CAPTURE(name);
    const Matrix j = numerical_jacobian(s, *s.fixed_point);
    CHECK(spectrum_mismatch(s.eigenvalues, j) <= 1e-6);
  }
  CHECK_THROWS_AS((void)make_system("no_such_system"), ParameterError);
}

TEST_CASE("Stuart-Landau radial system") {
  const SystemSpec s = stuart_landau_radial();
  CHECK(s.rhs(0.0, Vector::Zero(1))(0) == 0.0);
  CHECK(s.rhs(0.0, Vector::Ones(1))(0) == 0.0);
  CHECK(s.eigenvalues.front() == Complex(-2.0, 0.0));
  CHECK(s.metadata.at("turning_point") == doctest::Approx(std::sqrt(2.0) / 2.0));
  const Trajectory tr = integrate_rk4(s.rhs, Vector::Constant(1, 0.8), 0.0, 10.0, 0.1);
  for (Eigen::Index j = 1; j < tr.x.cols(); ++j) CHECK(tr.x(0, j) >= tr.x(0, j - 1));
  CHECK(tr.x(0, tr.x.cols() - 1) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("three-dimensional non-normal map") {
  const SystemSpec s = three_d_nonnormal_map();
  CHECK(s.params.at("a") == doctest::Approx(0.45 * std::sqrt(3.0)));
  CHECK(s.params.at("b") == 0.5);
  CHECK(s.params.at("c") == 0.6);
  CHECK(s.params.at("theta1") == 1.5);
  CHECK(s.params.at("theta2") == 0.0);
  CHECK(std::abs(s.eigenvalues.front()) == doctest::Approx(std::sqrt(0.8575)));
  CHECK(s.observe(Vector(Vector::Zero(3))).isZero(0.0));
  const double h = 1e-6;
  Matrix dy(3, 3);
  for (int l = 0; l < 3; ++l) {
    Vector e = Vector::Zero(3);
    e(l) = h;
    dy.col(l) = (s.observe(e) - s.observe(Vector(-e))) / (2 * h);
  }
  CHECK((dy - Matrix::Identity(3, 3)).norm() <= 1e-8);

  const Vector x0 = Eigen::Vector3d(0.3, -0.2, 0.5);
  const Trajectory tr = iterate(s, x0, 5);
  Vector x = x0;
  for (int j = 0; j < 5; ++j) x = s.step(x);
  CHECK((tr.x.col(5) - x).norm() == 0.0);

  const Matrix ics = random_initial_conditions(3, 10, 0.3, 0.9, 4);
  for (Eigen::Index c = 0; c < ics.cols(); ++c) {
    CHECK(ics.col(c).norm() >= 0.3);
    CHECK(ics.col(c).norm() <= 0.9);
  }
  CHECK(random_initial_conditions(3, 10, 0.3, 0.9, 4) == ics);
}

TEST_CASE("Duffing oscillator and its phi coordinates") {
  const SystemSpec s = duffing();
  CHECK(s.eigenvalues[0].real() == doctest::Approx(-0.00705).epsilon(1e-6));
  const double w = std::sqrt(2.0 - 0.0141 * 0.0141 / 4.0);
  CHECK(std::abs(s.eigenvalues[0].imag()) == doctest::Approx(w));
  CHECK(std::abs(std::abs(s.eigenvalues[0].imag()) - 1.4142) <= 1e-3);
  CHECK(std::abs(s.eigenvalues[0].real() + 0.00707) <= 1e-4);

  const DuffingCoordinates co = duffing_coordinates();
  CHECK(co.to_phi(Vector(Eigen::Vector2d(1.0, 0.0))).isZero(0.0));
  CHECK(std::abs(co.forcing(0) - (-0.006)) <= 5e-4);
  CHECK(std::abs(co.forcing(1) - 1.225) <= 5e-4);
  const Vector xy = Eigen::Vector2d(1.1, -0.05);
  CHECK((co.from_phi(co.to_phi(xy)) - xy).norm() <= 1e-15);

  // phi' = A phi + q K(phi) reproduces the physical vector field.
  const Vector phi = co.to_phi(xy);
  const Vector lhs = co.T_inv * s.rhs(0.0, xy);
  const Vector rhs = co.A * phi + co.q * co.basis.eval(phi);
  CHECK((lhs - rhs).norm() <= 1e-14);

  const Trajectory tr = integrate(s, Eigen::Vector2d(1.3, 0.0), 2000.0, 1.0);
  CHECK((tr.x.col(tr.x.cols() - 1) - Eigen::Vector2d(1.0, 0.0)).norm() <= 0.02);
}

TEST_CASE("undamped unforced Duffing conserves energy") {
  DuffingParams p;
  p.damping = 0.0;
  const SystemSpec s = duffing(p);
  auto energy = [](const Vector& x) { return 0.5 * x(1) * x(1) - 0.5 * x(0) * x(0) + 0.25 * std::pow(x(0), 4); };
  const Trajectory tr = integrate(s, Eigen::Vector2d(1.3, 0.0), 100.0, 1.0);
  const double e0 = energy(tr.x.col(0));
  double worst = 0.0;
  for (Eigen::Index j = 0; j < tr.x.cols(); ++j) worst = std::max(worst, std::abs(energy(tr.x.col(j)) - e0));
  CHECK(worst <= 1e-8);
}

TEST_CASE("oscillator chain") {
  const SystemSpec s = oscillator_chain();
  const Matrix k = chain_stiffness();
  CHECK(k.rows() == 5);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      if (std::abs(i - j) > 1) CHECK(k(i, j) == 0.0);
  CHECK(Eigen::SelfAdjointEigenSolver<Matrix>(k).eigenvalues().minCoeff() > 0.0);
  const double re = s.metadata.at("slow_real");
  const double im = s.metadata.at("slow_imag");
  CHECK(std::abs(Complex(re, im) - Complex(-0.0012, 0.2825)) <= 0.05 * std::abs(Complex(-0.0012, 0.2825)));

  const Matrix plane = chain_mode_plane(0);
  const Matrix a = chain_linear_part();
  // The plane is invariant under the linear part.
  const Matrix image = a * plane;
  const Matrix coeffs = plane.colPivHouseholderQr().solve(image);
  CHECK((plane * coeffs - image).norm() <= 1e-12);

  ChainParams lin;
  lin.cubic = 0.0;
  const SystemSpec ls = oscillator_chain(lin);
  const Trajectory tr = integrate(ls, 0.3 * plane.col(0), 50.0, 0.5);
  const SnapshotPairs p = snapshot_pairs(TrajectorySet({tr}, 0.5), 1);
  const PolynomialDynamics pd = fit_polynomial_dynamics(
      SnapshotPairs(Matrix(plane.transpose() * p.phi), Matrix(plane.transpose() * p.phi_hat), 0.5), 3);
  CHECK(pd.coeffs.norm() <= 1e-6);
}

TEST_CASE("non-smooth scalar system") {
  const SystemSpec one = nonsmooth_1d(1.0);
  CHECK(one.rhs(0.0, Vector::Constant(1, 0.3))(0) == doctest::Approx(-0.3 + 0.09));
  CHECK(one.eigenvalues.front() == Complex(-1.0, 0.0));
  CHECK(nonsmooth_1d(0.9).metadata.at("second_derivative_singular") == 1.0);
  CHECK(one.metadata.at("second_derivative_singular") == 0.0);
  // f'' ~ alpha (1 + alpha) x^(alpha - 1) grows without bound as x -> 0.
  const SystemSpec frac = nonsmooth_1d(0.9);
  auto second = [&](double x, double h) {
    return (frac.rhs(0, Vector::Constant(1, x + h))(0) - 2 * frac.rhs(0, Vector::Constant(1, x))(0) +
            frac.rhs(0, Vector::Constant(1, x - h))(0)) / (h * h);
  };
  CHECK(second(1e-6, 1e-7) > second(1e-2, 1e-3));
  CHECK_THROWS_AS((void)nonsmooth_1d(0.0), ParameterError);
}

TEST_CASE("rank degeneracy observables") {
  const auto obs = rank_degeneracy_observables();
  REQUIRE(obs.size() == 3);
  CHECK(obs[0].rank_on_E == 2);
  CHECK(obs[1].rank_on_E == 2);
  CHECK(obs[2].rank_on_E == 1);
  CHECK(obs[0].ok);
  CHECK(obs[1].ok);
  CHECK_FALSE(obs[2].ok);
}

TEST_CASE("integrators") {
  const OdeRhs decay = [](double, const Vector& x) { return Vector(-2.0 * x); };
  const Trajectory rk45 = integrate_rk45(decay, Vector::Ones(1), 0.0, 1.0, 0.5);
  CHECK(rk45.x.cols() == 3);
  CHECK(std::abs(rk45.x(0, 2) - std::exp(-2.0)) <= 1e-9);
  const Trajectory rk4 = integrate_rk4(decay, Vector::Ones(1), 0.0, 1.0, 0.01);
  CHECK(std::abs(rk4.x(0, rk4.x.cols() - 1) - std::exp(-2.0)) <= 1e-9);
  CHECK(std::abs(rk45_advance(decay, Vector::Ones(1), 0.0, 1.0)(0) - std::exp(-2.0)) <= 1e-9);
  CHECK_THROWS_AS((void)integrate(three_d_nonnormal_map(), Vector::Zero(3), 1.0, 0.1), ParameterError);
  CHECK_THROWS_AS((void)iterate(duffing(), Vector::Zero(2), 3), ParameterError);

  const Trajectory a = integrate(duffing(), Eigen::Vector2d(1.2, 0.1), 20.0, 0.5);
  const Trajectory b = integrate(duffing(), Eigen::Vector2d(1.2, 0.1), 20.0, 0.5);
  CHECK(a.x == b.x);
}
