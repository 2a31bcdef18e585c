#include <cmath>
#include <numbers>

#include "ddl/analytic.hpp"
#include "ddl/forced.hpp"
#include "ddl/model.hpp"
#include "ddl/ode.hpp"
#include "ddl/reduce.hpp"
#include "ddl/spectral.hpp"
#include "ddl/testbed.hpp"
#include "doctest.h"

using namespace ddl;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Matrix damped_oscillator(double alpha, double omega) {
  Matrix b(2, 2);
  b << -alpha, omega, -omega, -alpha;
  return b;
}

// Reduced Duffing dynamics linearized analytically to order 5.
const ForcedReducedModel& duffing_reduced() {
  static const ForcedReducedModel model = [] {
    const auto co = testbed::duffing_coordinates();
    ForcedReducedModel m;
    m.B = co.A;
    m.basis = enumerate_monomials(2, 2, 5);
    m.ell = analytic_linearize(co.A, co.basis, co.q, 5);
    m.forcing = co.forcing;
    m.epsilon = 0.0028;
    return m;
  }();
  return model;
}

// Reduced model fitted to unforced Duffing decays, then forced at 0.0028.
const ForcedReducedModel& duffing_fitted() {
  static const ForcedReducedModel model = [] {
    const auto sys = testbed::duffing();
    const auto co = testbed::duffing_coordinates();
    const double dt = 0.2;
    std::vector<Trajectory> trajs;
    int i = 0;
    for (double r : {0.02, 0.05, 0.08}) {
      const double th = 0.7 + 2.1 * i++;
      Trajectory t = testbed::integrate(sys, co.from_phi(Vector(Eigen::Vector2d(r * std::cos(th), r * std::sin(th)))), 300.0, dt);
      t.x = co.to_phi(t.x);
      trajs.push_back(t);
    }
    FitOptions o;
    o.k = 7;
    o.tol = 1e-12;
    return forced_from_ddl(fit(snapshot_pairs(TrajectorySet(trajs, dt), 1), o), co.forcing, 0.0028);
  }();
  return model;
}

const FrcBranch& fitted_branch() {
  static const FrcBranch br = continue_frc(duffing_fitted(), 1.2, 1.6);
  return br;
}

}  // namespace

TEST_CASE("forced vector field: linear and unforced limits") {
  const Matrix b = damped_oscillator(0.1, 1.0);
  const Vector f = Eigen::Vector2d(0.3, -0.7);
  const Vector g = Eigen::Vector2d(0.2, 0.1);
  const ForcedReducedModel lin = forced_linear(b, f, 0.5);
  CHECK((forced_field(lin, g, 0.4, 2.0) - (b * g + 0.5 * std::cos(0.8) * f)).norm() <= 1e-15);

  ForcedReducedModel unforced = duffing_reduced();
  unforced.epsilon = 0.0;
  CHECK((forced_field(unforced, g, 1.0, 1.4) - unforced.B * g).norm() == 0.0);

  CHECK_THROWS_AS((void)forced_linear(b, Vector::Ones(3), 0.1), ShapeError);
  CHECK_THROWS_AS((void)forced_linear(b, f, -1.0), ParameterError);
}

TEST_CASE("kappa jacobian and forced field jacobian match finite differences") {
  const ForcedReducedModel& m = duffing_reduced();
  const Vector g = Eigen::Vector2d(0.05, -0.03);
  const double h = 1e-6;
  const Matrix jk = m.kappa_jacobian(g);
  const Matrix jf = forced_field_jacobian(m, g, 0.7, 1.4);
  for (int l = 0; l < 2; ++l) {
    Vector gp = g, gm = g;
    gp(l) += h;
    gm(l) -= h;
    const Vector dk = (m.kappa(gp) - m.kappa(gm)) / (2 * h);
    CHECK((jk.col(l) - dk).norm() <= 1e-6 * dk.norm());
    const Vector df = (forced_field(m, gp, 0.7, 1.4) - forced_field(m, gm, 0.7, 1.4)) / (2 * h);
    CHECK((jf.col(l) - df).norm() <= 1e-6 * df.norm());
  }
}

TEST_CASE("shooting: scalar resonance formula and the unforced origin") {
  const double alpha = 0.3, eps = 0.2, f = 1.5;
  const ForcedReducedModel m = forced_linear(Matrix::Constant(1, 1, -alpha), Vector::Constant(1, f), eps);
  for (double om : {0.5, 1.0, 2.0}) {
    const PeriodicOrbit o = shoot_periodic(m, om, Vector::Zero(1));
    CHECK(o.residual <= 1e-9);
    CHECK(o.stable);
    CHECK(o.amplitude == doctest::Approx(eps * f / std::sqrt(alpha * alpha + om * om)).epsilon(1e-6));
    const auto b = dmd_frc(m.B, m.forcing, eps, {om});
    CHECK(b.points[0].amplitude == doctest::Approx(o.amplitude).epsilon(1e-6));
  }

  const Matrix b = damped_oscillator(0.05, 1.0);
  const ForcedReducedModel zero = forced_linear(b, Eigen::Vector2d(1.0, 0.0), 0.0);
  const PeriodicOrbit o = shoot_periodic(zero, 1.3, Eigen::Vector2d(0.01, 0.02));
  CHECK(o.gamma0.norm() <= 1e-9);
  CHECK((o.monodromy - matrix_exp(b * (kTwoPi / 1.3))).norm() <= 1e-8);
  CHECK_THROWS_AS((void)shoot_periodic(zero, -1.0, Vector::Zero(2)), ParameterError);
}

TEST_CASE("linear limit: all four response computations agree") {
  const Matrix b = damped_oscillator(0.02, 1.0);
  const Vector f = Eigen::Vector2d(0.4, 1.0);
  const ForcedReducedModel m = forced_linear(b, f, 0.01);
  ContinuationOptions co;
  co.max_step = 0.02;
  const FrcBranch cont = continue_frc(m, 0.8, 1.2, co);
  CHECK(cont.single_valued());
  CHECK(cont.fold_count() == 0);
  CHECK(std::abs(cont.peak().omega - 1.0) <= 0.01);

  std::vector<double> oms;
  for (const auto& p : cont.points) {
    CHECK(p.residual <= 1e-9);
    CHECK(p.stable);
    oms.push_back(p.omega);
  }
  const FrcBranch dmd = dmd_frc(b, f, 0.01, oms);
  const FrcBranch approx = approx_ddl_frc(m, oms);
  CHECK(dmd.single_valued());
  for (std::size_t i = 0; i < oms.size(); ++i) {
    CHECK(std::abs(cont.points[i].amplitude - dmd.points[i].amplitude) <= 1e-6);
    CHECK(std::abs(approx.points[i].amplitude - dmd.points[i].amplitude) <= 1e-6);
  }
  for (std::size_t i = 0; i < oms.size(); i += 10) {
    const PeriodicOrbit o = shoot_periodic(m, oms[i], Vector::Zero(2));
    CHECK(std::abs(o.amplitude - dmd.points[i].amplitude) <= 1e-6);
  }
  CHECK_THROWS_AS((void)dmd_frc(damped_oscillator(0.0, 1.0), f, 0.01, {1.0}), ResonanceError);
}

TEST_CASE("amplitudes scale linearly with small forcing off resonance") {
  ForcedReducedModel m = duffing_reduced();
  for (double om : {1.2, 1.6}) {
    m.epsilon = 0.001;
    const double a1 = shoot_periodic(m, om, Vector::Zero(2)).amplitude;
    m.epsilon = 0.0005;
    const double a2 = shoot_periodic(m, om, Vector::Zero(2)).amplitude;
    CHECK(a1 / a2 >= 1.8);
    CHECK(a1 / a2 <= 2.2);
  }
}

TEST_CASE("Duffing reduced model: softening fold pair with one unstable multiplier") {
  const ForcedReducedModel& m = duffing_fitted();
  const FrcBranch& br = fitted_branch();
  CHECK_FALSE(br.truncated);
  CHECK(br.fold_count() == 2);
  CHECK_FALSE(br.single_valued());
  CHECK(br.peak().omega < std::sqrt(2.0));
  int unstable = 0, stable = 0;
  for (const auto& p : br.points) {
    CHECK(p.residual <= 1e-9);
    if (p.stable) {
      ++stable;
      continue;
    }
    ++unstable;
    int outside = 0;
    for (const auto& mu : p.multipliers) outside += std::abs(mu) > 1.0;
    CHECK(outside == 1);
  }
  CHECK(unstable >= 2);
  CHECK(stable >= 5);

  // Large forcing: the approximate response cannot fold.
  const FrcBranch approx = approx_ddl_frc(m, linspace(1.2, 1.6, 201));
  CHECK(approx.single_valued());
  CHECK(approx.fold_count() == 0);
}

TEST_CASE("Floquet stability agrees with long-time simulation of the reduced model") {
  const ForcedReducedModel& m = duffing_fitted();
  const FrcBranch& br = fitted_branch();
  std::vector<const FrcPoint*> stable, unstable;
  for (const auto& p : br.points) (p.stable ? stable : unstable).push_back(&p);
  REQUIRE(stable.size() >= 5);
  REQUIRE(unstable.size() >= 2);

  const double kick = 1e-4;
  auto drift = [&](const FrcPoint& p) {
    const double period = kTwoPi / p.omega;
    const OdeRhs rhs = [&](double t, const Vector& g) { return forced_field(m, g, t, p.omega); };
    Vector g0 = p.gamma0;
    g0(0) += kick;
    Rk45Options o;
    o.rtol = o.atol = 1e-11;
    const Vector g = rk45_advance(rhs, g0, 0.0, 100.0 * period, o);
    return (g - p.gamma0).norm();
  };
  const std::size_t step_s = stable.size() / 5;
  for (std::size_t i = 0; i < 5; ++i) CHECK(drift(*stable[i * step_s]) < 0.5 * kick);
  CHECK(drift(*unstable[unstable.size() / 2]) > kick);
  CHECK(drift(*unstable[unstable.size() / 2 + (unstable.size() > 2 ? 1 : 0)]) > kick);
}

TEST_CASE("approximate response with zero coefficients equals the linear response") {
  ForcedReducedModel m = duffing_reduced();
  m.ell.setZero();
  m.epsilon = 0.002;
  const auto oms = linspace(1.2, 1.6, 41);
  const FrcBranch a = approx_ddl_frc(m, oms);
  const FrcBranch b = dmd_frc(m.B, m.forcing, m.epsilon, oms);
  for (std::size_t i = 0; i < oms.size(); ++i) CHECK(a.points[i].amplitude == doctest::Approx(b.points[i].amplitude).epsilon(1e-9));
  CHECK(linspace(0.0, 1.0, 3) == std::vector<double>{0.0, 0.5, 1.0});
  CHECK_THROWS_AS((void)linspace(0.0, 1.0, 0), ParameterError);
}
