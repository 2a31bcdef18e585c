#include "ddl/forced.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ddl/ode.hpp"
#include "ddl/spectral.hpp"

namespace ddl {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Largest value of a sampled periodic signal, refined by a parabola through
/// the maximum sample and its neighbours.
double periodic_peak(const std::vector<double>& v) {
  const auto n = v.size();
  std::size_t k = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (v[i] > v[k]) k = i;
  const double y0 = v[(k + n - 1) % n], y1 = v[k], y2 = v[(k + 1) % n];
  const double denom = y0 - 2.0 * y1 + y2;
  if (denom >= 0.0) return y1;
  const double x = 0.5 * (y0 - y2) / denom;
  return y1 - 0.25 * (y0 - y2) * x;
}

struct PeriodMap {
  Vector end;
  Matrix monodromy;
  Vector d_omega;
};

PeriodMap period_map(const ForcedReducedModel& model, double omega, const Vector& gamma0, double tol) {
  const int d = model.dim();
  const Eigen::Index n = d + d * d + d;
  OdeRhs rhs = [&](double tau, const Vector& z) -> Vector {
    const Vector g = z.head(d);
    const double t = tau / omega;
    const Vector f = forced_field(model, g, t, omega);
    const Matrix a = forced_field_jacobian(model, g, t, omega);
    Vector dz(n);
    dz.head(d) = f / omega;
    const Matrix y = z.segment(d, d * d).reshaped(d, d);
    dz.segment(d, d * d) = (a * y / omega).reshaped();
    dz.tail(d) = a * z.tail(d) / omega - f / (omega * omega);
    return dz;
  };
  Vector z0 = Vector::Zero(n);
  z0.head(d) = gamma0;
  z0.segment(d, d * d) = Matrix::Identity(d, d).reshaped();
  Rk45Options o;
  o.rtol = tol;
  o.atol = tol;
  const Vector z1 = rk45_advance(rhs, z0, 0.0, kTwoPi, o);
  return {z1.head(d), z1.segment(d, d * d).reshaped(d, d), z1.tail(d)};
}

std::vector<Complex> multipliers_of(const Matrix& m) { return sorted_eigenvalues(m); }

bool all_inside(const std::vector<Complex>& mult) {
  return std::all_of(mult.begin(), mult.end(), [](const Complex& z) { return std::abs(z) < 1.0; });
}

Vector linear_guess(const ForcedReducedModel& model, double omega) {
  const int d = model.dim();
  const ComplexMatrix m = Complex(0.0, omega) * ComplexMatrix::Identity(d, d) - model.B.cast<Complex>();
  const ComplexVector z = m.fullPivLu().solve(model.epsilon * model.forcing.cast<Complex>());
  return z.real();
}

Vector null_vector(const Matrix& g) {
  Eigen::JacobiSVD<Matrix> svd(g, Eigen::ComputeFullV);
  return svd.matrixV().col(g.cols() - 1);
}

}  // namespace

Vector ForcedReducedModel::kappa(const Vector& gamma) const {
  if (is_linear()) return gamma;
  return gamma + ell * basis.eval(gamma);
}

Matrix ForcedReducedModel::kappa_jacobian(const Vector& gamma) const {
  const int d = dim();
  if (is_linear()) return Matrix::Identity(d, d);
  return Matrix::Identity(d, d) + ell * basis.jacobian(gamma);
}

void ForcedReducedModel::validate() const {
  const int d = dim();
  if (B.cols() != d) throw ShapeError("ForcedReducedModel: B must be square");
  if (forcing.size() != d) throw ShapeError("ForcedReducedModel: forcing dimension differs from B");
  if (epsilon < 0.0) throw ParameterError("ForcedReducedModel: epsilon must be nonnegative");
  if (basis.size() > 0 && (basis.dim() != d || ell.rows() != d || ell.cols() != static_cast<Eigen::Index>(basis.size())))
    throw ShapeError("ForcedReducedModel: ell does not match the basis");
}

ForcedReducedModel forced_from_ddl(const DdlModel& model, const Vector& forcing, double epsilon) {
  ForcedReducedModel out;
  out.B = continuous_generator(model);
  out.basis = model.basis;
  out.ell = model.Qinv;
  out.forcing = forcing;
  out.epsilon = epsilon;
  out.validate();
  return out;
}

ForcedReducedModel forced_linear(const Matrix& b_cont, const Vector& forcing, double epsilon) {
  ForcedReducedModel out;
  out.B = b_cont;
  out.forcing = forcing;
  out.epsilon = epsilon;
  out.validate();
  return out;
}

Vector forced_field(const ForcedReducedModel& model, const Vector& gamma, double t, double omega) {
  Vector out = model.B * gamma;
  if (model.epsilon == 0.0) return out;
  const double c = std::cos(omega * t);
  if (model.is_linear()) return out + model.epsilon * c * model.forcing;
  const Matrix m = model.kappa_jacobian(gamma);
  Eigen::PartialPivLU<Matrix> lu(m);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-13))
    throw NumericalError("forced_field: I + Dl(gamma) is singular (condition number ~" + std::to_string(1.0 / rcond) +
                         "); the state left the validity domain");
  return out + model.epsilon * c * lu.solve(model.forcing);
}

Matrix forced_field_jacobian(const ForcedReducedModel& model, const Vector& gamma, double t, double omega) {
  Matrix a = model.B;
  if (model.epsilon == 0.0 || model.is_linear()) return a;
  const int d = model.dim();
  const double c = std::cos(omega * t);
  Eigen::PartialPivLU<Matrix> lu(model.kappa_jacobian(gamma));
  const Vector w = lu.solve(model.forcing);
  const std::vector<Matrix> h = model.basis.hessian(gamma);
  for (int p = 0; p < d; ++p) {
    Vector acc = Vector::Zero(static_cast<Eigen::Index>(model.basis.size()));
    for (int l = 0; l < d; ++l) acc += h[static_cast<std::size_t>(l)].col(p) * w(l);
    a.col(p) -= model.epsilon * c * lu.solve(model.ell * acc);
  }
  return a;
}

double orbit_amplitude(const ForcedReducedModel& model, double omega, const Vector& gamma0, const ShootingOptions& opts) {
  const int n = std::max(8, opts.samples_per_period);
  OdeRhs rhs = [&](double tau, const Vector& g) -> Vector { return forced_field(model, g, tau / omega, omega) / omega; };
  Rk45Options o;
  o.rtol = opts.integration_tol;
  o.atol = opts.integration_tol;
  const Trajectory tr = integrate_rk45(rhs, gamma0, 0.0, kTwoPi, kTwoPi / n, o);
  std::vector<double> sq;
  for (Eigen::Index j = 0; j < std::min<Eigen::Index>(n, tr.x.cols()); ++j)
    sq.push_back(model.kappa(tr.x.col(j)).squaredNorm());
  return std::sqrt(std::max(periodic_peak(sq), 0.0));
}

PeriodicOrbit shoot_periodic(const ForcedReducedModel& model, double omega, const Vector& gamma_guess,
                             const ShootingOptions& opts) {
  model.validate();
  if (!(omega > 0.0)) throw ParameterError("shoot_periodic: omega must be positive");
  const int d = model.dim();
  if (gamma_guess.size() != d) throw ShapeError("shoot_periodic: guess dimension mismatch");
  PeriodicOrbit orb;
  orb.omega = omega;
  orb.gamma0 = gamma_guess;
  for (int it = 0; it <= opts.max_iter; ++it) {
    const PeriodMap pm = period_map(model, omega, orb.gamma0, opts.integration_tol);
    const Vector res = pm.end - orb.gamma0;
    orb.residual = res.norm();
    orb.monodromy = pm.monodromy;
    orb.iterations = it;
    if (orb.residual <= opts.tol) {
      orb.multipliers = multipliers_of(orb.monodromy);
      orb.stable = all_inside(orb.multipliers);
      orb.amplitude = orbit_amplitude(model, omega, orb.gamma0, opts);
      return orb;
    }
    if (it == opts.max_iter) break;
    const Matrix g = pm.monodromy - Matrix::Identity(d, d);
    Eigen::FullPivLU<Matrix> lu(g);
    if (!lu.isInvertible())
      throw NumericalError("shoot_periodic: singular shooting Jacobian at omega = " + std::to_string(omega) +
                           " (near a fold; use continuation)");
    orb.gamma0 -= lu.solve(res);
    if (!orb.gamma0.allFinite()) throw NumericalError("shoot_periodic: Newton iterate became non-finite");
  }
  throw NumericalError("shoot_periodic: Newton did not converge at omega = " + std::to_string(omega) + " (residual " +
                       std::to_string(orb.residual) + ")");
}

int FrcBranch::fold_count() const {
  return static_cast<int>(std::count_if(points.begin(), points.end(), [](const FrcPoint& p) { return p.fold; }));
}

bool FrcBranch::single_valued() const {
  if (points.size() < 2) return true;
  const double dir = points[1].omega - points[0].omega;
  for (std::size_t i = 1; i < points.size(); ++i) {
    const double step = points[i].omega - points[i - 1].omega;
    if (step * dir <= 0.0) return false;
  }
  return true;
}

const FrcPoint& FrcBranch::peak() const {
  if (points.empty()) throw ParameterError("FrcBranch: empty branch");
  return *std::max_element(points.begin(), points.end(),
                           [](const FrcPoint& a, const FrcPoint& b) { return a.amplitude < b.amplitude; });
}

FrcBranch continue_frc(const ForcedReducedModel& model, double omega_start, double omega_end,
                       const ContinuationOptions& opts) {
  model.validate();
  if (!(omega_start > 0.0) || !(omega_end > 0.0) || omega_start == omega_end)
    throw ParameterError("continue_frc: invalid frequency range");
  const int d = model.dim();
  const double lo = std::min(omega_start, omega_end);
  const double hi = std::max(omega_start, omega_end);
  const ShootingOptions& so = opts.shooting;

  FrcBranch branch;
  branch.method = model.is_linear() ? "linear" : "ddl";
  branch.epsilon = model.epsilon;

  const PeriodicOrbit first = shoot_periodic(model, omega_start, linear_guess(model, omega_start), so);
  auto make_point = [&](const Vector& g0, double om, const Matrix& mono, double residual) {
    FrcPoint p;
    p.omega = om;
    p.gamma0 = g0;
    p.multipliers = multipliers_of(mono);
    p.stable = all_inside(p.multipliers);
    p.residual = residual;
    p.amplitude = orbit_amplitude(model, om, g0, so);
    return p;
  };
  branch.points.push_back(make_point(first.gamma0, omega_start, first.monodromy, first.residual));

  Vector u(d + 1);
  u.head(d) = first.gamma0;
  u(d) = omega_start;
  Matrix jac(d, d + 1);
  {
    const PeriodMap pm = period_map(model, omega_start, first.gamma0, so.integration_tol);
    jac.leftCols(d) = pm.monodromy - Matrix::Identity(d, d);
    jac.col(d) = pm.d_omega;
  }
  Vector tangent = null_vector(jac);
  if (tangent(d) * (omega_end - omega_start) < 0.0) tangent = -tangent;

  double h = opts.initial_step;
  while (static_cast<int>(branch.points.size()) < opts.max_points) {
    const Vector pred = u + h * tangent;
    Vector v = pred;
    bool ok = false;
    int iters = 0;
    double res_norm = 0.0;
    PeriodMap pm;
    try {
      for (; iters < so.max_iter; ++iters) {
        if (!(v(d) > 0.0)) break;
        pm = period_map(model, v(d), v.head(d), so.integration_tol);
        const Vector f = pm.end - v.head(d);
        res_norm = f.norm();
        Matrix big(d + 1, d + 1);
        big.topLeftCorner(d, d) = pm.monodromy - Matrix::Identity(d, d);
        big.topRightCorner(d, 1) = pm.d_omega;
        big.bottomRows(1) = tangent.transpose();
        Vector rhs(d + 1);
        rhs.head(d) = -f;
        rhs(d) = -tangent.dot(v - pred);
        if (res_norm <= so.tol && std::abs(rhs(d)) <= 1e-12) {
          ok = true;
          break;
        }
        const Vector delta = big.fullPivLu().solve(rhs);
        if (!delta.allFinite()) break;
        v += delta;
        if (res_norm <= so.tol && delta.norm() <= 1e-12 * (1.0 + v.norm())) {
          pm = period_map(model, v(d), v.head(d), so.integration_tol);
          res_norm = (pm.end - v.head(d)).norm();
          ok = res_norm <= so.tol;
          break;
        }
      }
    } catch (const NumericalError&) {
      ok = false;
    }
    if (!ok) {
      h *= 0.5;
      if (h < opts.min_step) {
        branch.truncated = true;
        break;
      }
      continue;
    }

    jac.leftCols(d) = pm.monodromy - Matrix::Identity(d, d);
    jac.col(d) = pm.d_omega;
    Vector t_new = null_vector(jac);
    if (t_new.dot(tangent) < 0.0) t_new = -t_new;

    if (v(d) < lo || v(d) > hi) break;
    FrcPoint p = make_point(v.head(d), v(d), pm.monodromy, res_norm);
    p.fold = t_new(d) * tangent(d) < 0.0;
    branch.points.push_back(std::move(p));
    u = v;
    tangent = t_new;
    if (iters <= 3) h = std::min(h * 1.5, opts.max_step);
    else if (iters > 6) h = std::max(h * 0.5, opts.min_step);
  }
  return branch;
}

FrcBranch dmd_frc(const Matrix& b_cont, const Vector& forcing, double epsilon, const std::vector<double>& omegas) {
  const auto d = b_cont.rows();
  if (b_cont.cols() != d || forcing.size() != d) throw ShapeError("dmd_frc: shape mismatch");
  const auto ev = sorted_eigenvalues(b_cont);
  const bool hurwitz = std::all_of(ev.begin(), ev.end(), [](const Complex& z) { return z.real() < 0.0; });
  FrcBranch branch;
  branch.method = "dmd";
  branch.epsilon = epsilon;
  const double scale = std::max(b_cont.norm(), 1e-300);
  for (double om : omegas) {
    const ComplexMatrix m = Complex(0.0, om) * ComplexMatrix::Identity(d, d) - b_cont.cast<Complex>();
    Eigen::JacobiSVD<ComplexMatrix> svd(m);
    if (svd.singularValues()(d - 1) < 1e-12 * scale)
      throw ResonanceError("dmd_frc: i*Omega is an eigenvalue of B at Omega = " + std::to_string(om));
    const ComplexVector z = m.fullPivLu().solve(epsilon * forcing.cast<Complex>());
    Matrix pair(d, 2);
    pair.col(0) = z.real();
    pair.col(1) = -z.imag();
    FrcPoint p;
    p.omega = om;
    p.amplitude = Eigen::JacobiSVD<Matrix>(pair).singularValues()(0);
    p.gamma0 = z.real();
    p.stable = hurwitz;
    const Matrix mono = matrix_exp(b_cont * (kTwoPi / om));
    p.multipliers = sorted_eigenvalues(mono);
    branch.points.push_back(std::move(p));
  }
  return branch;
}

FrcBranch approx_ddl_frc(const ForcedReducedModel& model, const std::vector<double>& omegas, int samples_per_period) {
  model.validate();
  const int d = model.dim();
  FrcBranch lin = dmd_frc(model.B, model.forcing, model.epsilon, omegas);
  lin.method = "approx_ddl";
  const int n = std::max(8, samples_per_period);
  for (auto& p : lin.points) {
    const ComplexMatrix m = Complex(0.0, p.omega) * ComplexMatrix::Identity(d, d) - model.B.cast<Complex>();
    const ComplexVector z = m.fullPivLu().solve(model.epsilon * model.forcing.cast<Complex>());
    std::vector<double> sq;
    for (int j = 0; j < n; ++j) {
      const Complex rot = std::polar(1.0, kTwoPi * j / n);
      const Vector g = (z * rot).real();
      sq.push_back(model.kappa(g).squaredNorm());
    }
    p.amplitude = std::sqrt(std::max(periodic_peak(sq), 0.0));
  }
  return lin;
}

std::vector<double> linspace(double a, double b, int count) {
  if (count < 1) throw ParameterError("linspace: count must be >= 1");
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = count == 1 ? a : a + (b - a) * i / (count - 1);
  return out;
}

}  // namespace ddl
