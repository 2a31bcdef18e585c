#include "ddl/model.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "ddl/spectral.hpp"

namespace ddl {

void DdlModel::validate() const {
  const auto M = features();
  if (d <= 0 || basis.dim() != d) throw ShapeError("DdlModel: basis dimension differs from d");
  if (B.rows() != d || B.cols() != d) throw ShapeError("DdlModel: B must be d x d");
  if (Q.rows() != d || Q.cols() != M) throw ShapeError("DdlModel: Q must be d x M");
  if (Qinv.rows() != d || Qinv.cols() != M) throw ShapeError("DdlModel: Qinv must be d x M");
  if (!(dt > 0.0)) throw ParameterError("DdlModel: dt must be positive");
}

static void check_dim(const DdlModel& model, Eigen::Index rows, const char* what) {
  if (rows != model.d) throw ShapeError(std::string(what) + ": state dimension differs from model d");
}

Vector to_linear_coords(const DdlModel& model, const Vector& phi) {
  check_dim(model, phi.size(), "to_linear_coords");
  return phi + model.Q * model.basis.eval(phi);
}

Matrix to_linear_coords(const DdlModel& model, const Matrix& phi) {
  check_dim(model, phi.rows(), "to_linear_coords");
  return phi + model.Q * model.basis.eval(phi);
}

Vector from_linear_coords(const DdlModel& model, const Vector& gamma) {
  check_dim(model, gamma.size(), "from_linear_coords");
  return gamma + model.Qinv * model.basis.eval(gamma);
}

Matrix from_linear_coords(const DdlModel& model, const Matrix& gamma) {
  check_dim(model, gamma.rows(), "from_linear_coords");
  return gamma + model.Qinv * model.basis.eval(gamma);
}

DdlCost cost(const DdlModel& model, const SnapshotPairs& pairs) {
  check_dim(model, pairs.dim(), "cost");
  const Matrix k_phi = model.basis.eval(pairs.phi);
  const Matrix z = pairs.phi + model.Q * k_phi;
  const Matrix z_hat = to_linear_coords(model, pairs.phi_hat);
  DdlCost c;
  c.l1 = (z_hat - model.B * z).squaredNorm();
  c.l2 = (model.Q * k_phi + model.Qinv * model.basis.eval(z)).squaredNorm();
  c.total = c.l1 + model.nu * c.l2;
  return c;
}

Matrix predict(const DdlModel& model, const Vector& phi0, int n) {
  if (n < 0) throw ParameterError("predict: negative step count");
  Matrix gammas(model.d, n + 1);
  gammas.col(0) = to_linear_coords(model, phi0);
  for (int j = 1; j <= n; ++j) gammas.col(j) = model.B * gammas.col(j - 1);
  return from_linear_coords(model, gammas);
}

Matrix continuous_generator(const DdlModel& model) { return principal_log(model.B) / model.dt; }

std::vector<Complex> spectrum(const DdlModel& model) { return sorted_eigenvalues(model.B); }

Vector pack_parameters(const DdlModel& model) {
  const auto d = model.d;
  const auto M = model.features();
  Vector p(model.parameter_count());
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index j = 0; j < M; ++j) {
      p(a * M + j) = model.Q(a, j);
      p(d * M + a * M + j) = model.Qinv(a, j);
    }
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index b = 0; b < d; ++b) p(2 * d * M + a * d + b) = model.B(a, b);
  return p;
}

void unpack_parameters(DdlModel& model, const Vector& p) {
  const auto d = model.d;
  const auto M = model.features();
  if (p.size() != model.parameter_count()) throw ShapeError("unpack_parameters: wrong parameter count");
  model.Q.resize(d, M);
  model.Qinv.resize(d, M);
  model.B.resize(d, d);
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index j = 0; j < M; ++j) {
      model.Q(a, j) = p(a * M + j);
      model.Qinv(a, j) = p(d * M + a * M + j);
    }
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index b = 0; b < d; ++b) model.B(a, b) = p(2 * d * M + a * d + b);
}

Vector residuals(const DdlModel& model, const SnapshotPairs& pairs) {
  check_dim(model, pairs.dim(), "residuals");
  const auto d = model.d;
  const auto m = pairs.count();
  const Matrix k_phi = model.basis.eval(pairs.phi);
  const Matrix z = pairs.phi + model.Q * k_phi;
  const Matrix z_hat = pairs.phi_hat + model.Q * model.basis.eval(pairs.phi_hat);
  const Matrix r1 = z_hat - model.B * z;
  const Matrix r2 = std::sqrt(model.nu) * (model.Q * k_phi + model.Qinv * model.basis.eval(z));
  Vector r(2 * d * m);
  r.head(d * m) = r1.reshaped();
  r.tail(d * m) = r2.reshaped();
  return r;
}

Matrix residual_jacobian(const DdlModel& model, const SnapshotPairs& pairs) {
  check_dim(model, pairs.dim(), "residual_jacobian");
  const auto d = model.d;
  const auto M = model.features();
  const auto m = pairs.count();
  const double s = std::sqrt(model.nu);
  const Eigen::Index off_qinv = d * M;
  const Eigen::Index off_b = 2 * d * M;
  const Eigen::Index half = d * m;
  Matrix J = Matrix::Zero(2 * d * m, model.parameter_count());

  Vector k(M), k_hat(M), k_w(M);
  Matrix jw(M, d);
  for (Eigen::Index c = 0; c < m; ++c) {
    k = model.basis.eval(Vector(pairs.phi.col(c)));
    k_hat = model.basis.eval(Vector(pairs.phi_hat.col(c)));
    const Vector z = pairs.phi.col(c) + model.Q * k;
    model.basis.eval_with_jacobian(z, k_w, jw);
    const Matrix qj = model.Qinv * jw;  // d x d
    for (Eigen::Index i = 0; i < d; ++i) {
      const Eigen::Index row1 = c * d + i;
      const Eigen::Index row2 = half + c * d + i;
      for (Eigen::Index a = 0; a < d; ++a) {
        auto q1 = J.row(row1).segment(a * M, M);
        if (a == i) q1 = (k_hat - model.B(i, a) * k).transpose();
        else q1 = (-model.B(i, a) * k).transpose();
        J(row1, off_b + i * d + a) = -z(a);
        const double coef = s * ((a == i ? 1.0 : 0.0) + qj(i, a));
        J.row(row2).segment(a * M, M) = coef * k.transpose();
      }
      J.row(row2).segment(off_qinv + i * M, M) = s * k_w.transpose();
    }
  }
  return J;
}

Matrix residual_jacobian_fd(const DdlModel& model, const SnapshotPairs& pairs, double rel_step) {
  DdlModel work = model;
  auto fn = [&](const Vector& p) {
    unpack_parameters(work, p);
    return residuals(work, pairs);
  };
  const Vector p0 = pack_parameters(model);
  const Vector r0 = fn(p0);
  Matrix J(r0.size(), p0.size());
  Vector p = p0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double h = rel_step * std::max(1.0, std::abs(p0(i)));
    p(i) = p0(i) + h;
    const Vector rp = fn(p);
    p(i) = p0(i) - h;
    const Vector rm = fn(p);
    p(i) = p0(i);
    J.col(i) = (rp - rm) / (2.0 * h);
  }
  return J;
}

Matrix hull_samples(const DdlModel& model, int count, std::uint64_t seed) {
  if (model.hull_lower.size() != model.d || model.hull_upper.size() != model.d)
    throw ShapeError("hull_samples: model has no training hull");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Matrix out(model.d, count);
  for (int c = 0; c < count; ++c)
    for (int i = 0; i < model.d; ++i)
      out(i, c) = model.hull_lower(i) + unit(rng) * (model.hull_upper(i) - model.hull_lower(i));
  return out;
}

Vector round_trip_errors(const DdlModel& model, const Matrix& samples) {
  const Matrix back = from_linear_coords(model, to_linear_coords(model, samples));
  return (back - samples).colwise().norm().transpose();
}

double inverse_consistency(const DdlModel& model, const Matrix& samples) {
  const Vector err = round_trip_errors(model, samples);
  double worst = 0.0;
  for (Eigen::Index c = 0; c < samples.cols(); ++c)
    worst = std::max(worst, err(c) / (1.0 + samples.col(c).norm()));
  return worst;
}

ValidityResult validity_domain(const DdlModel& model, const Matrix& samples, double tol) {
  if (!(tol > 0.0)) throw ParameterError("validity_domain: tol must be positive");
  ValidityResult out;
  out.errors = round_trip_errors(model, samples);
  out.mask.resize(static_cast<std::size_t>(samples.cols()));
  double fail_min = std::numeric_limits<double>::infinity();
  double norm_max = 0.0;
  for (Eigen::Index c = 0; c < samples.cols(); ++c) {
    const double nrm = samples.col(c).norm();
    const bool ok = std::isfinite(out.errors(c)) && out.errors(c) <= tol * (1.0 + nrm);
    out.mask[static_cast<std::size_t>(c)] = ok;
    norm_max = std::max(norm_max, nrm);
    if (!ok) fail_min = std::min(fail_min, nrm);
  }
  out.radius = std::isfinite(fail_min) ? fail_min : norm_max;
  return out;
}

Matrix radial_samples(int d, double r_max, int radii, int directions, std::uint64_t seed) {
  if (d < 1 || radii < 1 || directions < 1 || !(r_max > 0.0)) throw ParameterError("radial_samples: bad arguments");
  Matrix dirs(d, directions);
  if (d == 1) {
    for (int j = 0; j < directions; ++j) dirs(0, j) = (j % 2 == 0) ? 1.0 : -1.0;
  } else if (d == 2) {
    for (int j = 0; j < directions; ++j) {
      const double th = 2.0 * std::numbers::pi * j / directions;
      dirs(0, j) = std::cos(th);
      dirs(1, j) = std::sin(th);
    }
  } else {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int j = 0; j < directions; ++j) {
      for (int i = 0; i < d; ++i) dirs(i, j) = normal(rng);
      dirs.col(j).normalize();
    }
  }
  Matrix out(d, radii * directions);
  for (int r = 0; r < radii; ++r) {
    const double rad = r_max * (r + 1) / radii;
    out.middleCols(r * directions, directions) = rad * dirs;
  }
  return out;
}

}  // namespace ddl
