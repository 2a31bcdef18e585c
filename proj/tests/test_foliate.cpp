#include <cmath>
#include <random>

#include "ddl/foliate.hpp"
#include "ddl/series.hpp"
#include "doctest.h"

using namespace ddl;

namespace {

Matrix rotation_block(double r, double th) {
  Matrix b(2, 2);
  b << r * std::cos(th), -r * std::sin(th), r * std::sin(th), r * std::cos(th);
  return b;
}

Matrix random_matrix(Eigen::Index r, Eigen::Index c, std::uint64_t seed, double scale) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = u(rng);
  return m;
}

DdlModel make_model(const Matrix& b, int k, double coeff_scale, std::uint64_t seed) {
  DdlModel m;
  m.d = static_cast<int>(b.rows());
  m.basis = enumerate_monomials(m.d, 2, k);
  m.B = b;
  m.Qinv = random_matrix(m.d, m.features(), seed, coeff_scale);
  m.Q = series::invert_near_identity(m.basis, m.Qinv);
  m.dt = 0.1;
  return m;
}

// Slow pair at modulus 0.99, fast pair at 0.9, mixed by a fixed similarity.
Matrix four_d_map() {
  Matrix blocks = Matrix::Zero(4, 4);
  blocks.topLeftCorner(2, 2) = rotation_block(0.99, 0.3);
  blocks.bottomRightCorner(2, 2) = rotation_block(0.9, 0.8);
  const Matrix t = Matrix::Identity(4, 4) + random_matrix(4, 4, 1, 0.3);
  return t * blocks * t.inverse();
}

}  // namespace

TEST_CASE("split of a diagonal map") {
  Matrix b = Matrix::Zero(2, 2);
  b.diagonal() << 0.9, 0.99;
  const DdlModel m = make_model(b, 3, 0.0, 0);
  const SpectralSplit s = split_spectrum(m, 1);
  CHECK(s.d1 == 1);
  CHECK(s.d2 == 1);
  CHECK(s.gap_ratio == doctest::Approx(1.1));
  CHECK(s.blocks(0, 0) == doctest::Approx(0.99));
  CHECK((s.S * s.S_inv - Matrix::Identity(2, 2)).norm() <= 1e-12);
}

TEST_CASE("four-dimensional split keeps conjugate pairs together") {
  const DdlModel m = make_model(four_d_map(), 3, 0.0, 0);
  const SpectralSplit s = split_spectrum(m, 2);
  CHECK(s.gap_ratio == doctest::Approx(1.1));
  CHECK(s.blocks.topRightCorner(2, 2).norm() <= 1e-10);
  CHECK(s.blocks.bottomLeftCorner(2, 2).norm() <= 1e-10);
  const auto slow = Eigen::EigenSolver<Matrix>(s.blocks.topLeftCorner(2, 2)).eigenvalues();
  CHECK(std::abs(slow(0)) == doctest::Approx(0.99));
  CHECK(std::abs(slow(1)) == doctest::Approx(0.99));
  CHECK_THROWS_AS((void)split_spectrum(m, 1), GapError);
  CHECK_THROWS_AS((void)split_spectrum(m, 0), ParameterError);
}

TEST_CASE("equal moduli and weak gaps raise a gap error") {
  Matrix b = Matrix::Zero(2, 2);
  b.diagonal() << 0.9, -0.9;
  CHECK_THROWS_AS((void)split_spectrum(make_model(b, 2, 0.0, 0), 1), GapError);
  b.diagonal() << 0.9, 0.89;
  CHECK_THROWS_AS((void)split_spectrum(make_model(b, 2, 0.0, 0), 1), GapError);
  CHECK_NOTHROW((void)split_spectrum(make_model(b, 2, 0.0, 0), 1, 1.001));
}

TEST_CASE("linear models use the classical spectral projector") {
  const Matrix b = four_d_map();
  const DdlModel m = make_model(b, 3, 0.0, 0);
  const SpectralSplit s = split_spectrum(m, 2);
  // Riesz projector onto the eigenvalues of modulus 0.99, built from a complex eigenbasis.
  Eigen::EigenSolver<Matrix> es(b);
  const Eigen::MatrixXcd v = es.eigenvectors();
  const Eigen::MatrixXcd vinv = v.inverse();
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(4, 4);
  for (int i = 0; i < 4; ++i)
    if (std::abs(es.eigenvalues()(i)) > 0.95) p += v.col(i) * vinv.row(i);
  const Matrix x = random_matrix(4, 5, 2, 1.0);
  const Matrix proj = fiber_project(m, s, x);
  CHECK((proj - (p * x.cast<Complex>()).real()).norm() <= 1e-10);
}

TEST_CASE("fiber projection is idempotent and fixes the slow sub-manifold") {
  const DdlModel m = make_model(four_d_map(), 3, 0.2, 3);
  const SpectralSplit s = split_spectrum(m, 2);
  const Matrix x = random_matrix(4, 20, 4, 0.1);
  const Matrix once = fiber_project(m, s, x);
  const Matrix twice = fiber_project(m, s, once);
  const double tol = 2.0 * round_trip_errors(m, x).maxCoeff() + 1e-12;
  CHECK((twice - once).colwise().norm().maxCoeff() <= tol + round_trip_errors(m, once).maxCoeff());
  Vector c = Vector::Zero(4);
  c.head(2) << 0.05, -0.03;
  const Vector on = from_linear_coords(m, Vector(s.S * c));
  CHECK((fiber_project(m, s, on) - on).norm() <= 2.0 * round_trip_errors(m, Matrix(on)).maxCoeff() + 1e-14);
}

TEST_CASE("trajectories synchronize with their base point at the fast rate") {
  const DdlModel m = make_model(four_d_map(), 3, 0.2, 5);
  const SpectralSplit s = split_spectrum(m, 2);
  const Vector phi0 = 0.05 * random_matrix(4, 1, 6, 1.0).col(0);
  const int n = 80;
  const Matrix full = predict(m, phi0, n);
  const Matrix base = predict(m, fiber_project(m, s, phi0), n);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int start = 5;
  for (int j = start; j <= n; ++j) {
    const double y = std::log((full.col(j) - base.col(j)).norm());
    sx += j;
    sy += y;
    sxx += double(j) * j;
    sxy += j * y;
  }
  const double cnt = n - start + 1;
  const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  CHECK(std::abs(slope - std::log(0.9)) <= 0.1 * std::abs(std::log(0.9)));
}

TEST_CASE("slow restriction") {
  Matrix b = Matrix::Zero(2, 2);
  b.diagonal() << 0.9, 0.99;
  const SlowRestriction lin = slow_restrict(make_model(b, 3, 0.0, 0), split_spectrum(make_model(b, 3, 0.0, 0), 1));
  CHECK(lin.model.d == 1);
  CHECK(lin.model.B(0, 0) == doctest::Approx(0.99));
  CHECK(lin.model.Q.isZero(1e-14));

  const DdlModel full = make_model(four_d_map(), 3, 0.2, 7);
  const SpectralSplit all = split_spectrum(full, 4);
  const SlowRestriction same = slow_restrict(full, all);
  CHECK(same.model.B == full.B);
  CHECK(same.model.Q == full.Q);

  const SpectralSplit s = split_spectrum(full, 2);
  const SlowRestriction r = slow_restrict(full, s);
  CHECK(r.model.d == 2);
  const Vector psi0 = Eigen::Vector2d(0.04, -0.02);
  const Vector phi0 = r.lift(psi0);
  const Matrix via_full = predict(full, fiber_project(full, s, phi0), 30);
  const Matrix via_slow = r.lift(predict(r.model, psi0, 30));
  const double tol = 10.0 * (round_trip_errors(full, Matrix(phi0)).maxCoeff() + round_trip_errors(r.model, Matrix(psi0)).maxCoeff()) + 1e-12;
  CHECK((via_full - via_slow).colwise().norm().maxCoeff() <= tol);
  CHECK((r.restrict(phi0, s) - psi0).norm() <= tol);
}
