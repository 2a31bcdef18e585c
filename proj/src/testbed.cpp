#include "ddl/testbed.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "ddl/spectral.hpp"

namespace ddl::testbed {

namespace {

double param_or(const std::map<std::string, double>& m, const std::string& key, double fallback) {
  auto it = m.find(key);
  return it == m.end() ? fallback : it->second;
}

}  // namespace

Matrix SystemSpec::observe(const Matrix& xs) const {
  if (!observable) return xs;
  Matrix out(observable(Vector(xs.col(0))).size(), xs.cols());
  for (Eigen::Index c = 0; c < xs.cols(); ++c) out.col(c) = observable(Vector(xs.col(c)));
  return out;
}

SystemSpec stuart_landau_radial() {
  SystemSpec s;
  s.name = "stuart_landau";
  s.kind = SystemKind::Ode;
  s.dim = 1;
  s.rhs = [](double, const Vector& x) {
    Vector dx(1);
    dx(0) = x(0) - x(0) * x(0) * x(0);
    return dx;
  };
  s.fixed_point = Vector::Constant(1, 1.0);
  s.eigenvalues = {Complex(-2.0, 0.0)};
  s.metadata["fixed_point_0"] = 0.0;
  s.metadata["fixed_point_1"] = 1.0;
  s.metadata["turning_point"] = std::numbers::sqrt2 / 2.0;
  return s;
}

Matrix nonnormal_matrix(const NonnormalParams& p) {
  Matrix lam(3, 3);
  lam << p.a, -p.b, 0.0, p.b, p.a, 0.0, 0.0, 0.0, p.c;
  Matrix r(3, 3);
  r << 1.0, 0.0, std::sin(p.theta1) * std::cos(p.theta2), 0.0, 1.0, std::sin(p.theta1) * std::sin(p.theta2), 0.0,
      0.0, std::cos(p.theta2);
  return r * lam * r.inverse();
}

SystemSpec three_d_nonnormal_map(const NonnormalParams& p) {
  SystemSpec s;
  s.name = "nonnormal3d";
  s.kind = SystemKind::Map;
  s.dim = 3;
  s.params = {{"a", p.a}, {"b", p.b}, {"c", p.c}, {"theta1", p.theta1}, {"theta2", p.theta2}};
  const Matrix m = nonnormal_matrix(p);
  s.step = [m](const Vector& x) -> Vector { return m * x; };
  s.observable = [](const Vector& x) {
    Vector y(3);
    y(0) = x(0) + 0.1 * (x(0) * x(0) + x(1) * x(2));
    y(1) = x(1) + 0.1 * (x(1) * x(1) + x(0) * x(2));
    y(2) = x(2) + 0.1 * (x(2) * x(2) + x(0) * x(1));
    return y;
  };
  s.fixed_point = Vector::Zero(3);
  s.eigenvalues = {Complex(p.a, -p.b), Complex(p.a, p.b), Complex(p.c, 0.0)};
  sort_by_modulus(s.eigenvalues);
  return s;
}

Matrix random_initial_conditions(int dim, int count, double r_min, double r_max, std::uint64_t seed) {
  if (dim < 1 || count < 0 || r_min < 0.0 || !(r_max > r_min)) throw ParameterError("random_initial_conditions: bad arguments");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Matrix out(dim, count);
  for (int c = 0; c < count; ++c) {
    Vector v(dim);
    do {
      for (int i = 0; i < dim; ++i) v(i) = normal(rng);
    } while (v.norm() == 0.0);
    out.col(c) = (r_min + (r_max - r_min) * unit(rng)) * v.normalized();
  }
  return out;
}

SystemSpec duffing(const DuffingParams& p) {
  SystemSpec s;
  s.name = "duffing";
  s.kind = SystemKind::Ode;
  s.dim = 2;
  s.params = {{"damping", p.damping}, {"epsilon", p.epsilon}, {"omega", p.omega}};
  s.rhs = [p](double t, const Vector& x) {
    Vector dx(2);
    dx(0) = x(1);
    dx(1) = x(0) - x(0) * x(0) * x(0) - p.damping * x(1) + p.epsilon * std::cos(p.omega * t);
    return dx;
  };
  s.fixed_point = Vector(2);
  (*s.fixed_point) << 1.0, 0.0;
  const double alpha = p.damping / 2.0;
  const double w = std::sqrt(2.0 - p.damping * p.damping / 4.0);
  s.eigenvalues = {Complex(-alpha, -w), Complex(-alpha, w)};
  sort_by_modulus(s.eigenvalues);
  return s;
}

DuffingCoordinates duffing_coordinates(double damping) {
  Matrix jac(2, 2);
  jac << 0.0, 1.0, -2.0, -damping;
  Eigen::EigenSolver<Matrix> es(jac);
  Eigen::Index idx = es.eigenvalues()(0).imag() > 0.0 ? 0 : 1;
  Eigen::VectorXcd v = es.eigenvectors().col(idx);
  v.normalize();
  Eigen::Index big = 0;
  v.cwiseAbs().maxCoeff(&big);
  v *= std::conj(v(big)) / std::abs(v(big));

  DuffingCoordinates c;
  c.T.resize(2, 2);
  c.T.col(0) = v.imag();
  c.T.col(1) = v.real();
  c.T_inv = c.T.inverse();
  c.A = c.T_inv * jac * c.T;
  c.forcing = c.T_inv.col(1);

  // y' gains -3u^2 - u^3 with u = x - 1 = T(0,0) phi1 + T(0,1) phi2.
  const double a = c.T(0, 0);
  const double b = c.T(0, 1);
  c.basis = enumerate_monomials(2, 2, 3);
  Vector row(7);
  row << -3.0 * a * a, -6.0 * a * b, -3.0 * b * b, -a * a * a, -3.0 * a * a * b, -3.0 * a * b * b, -b * b * b;
  c.q = c.T_inv.col(1) * row.transpose();
  return c;
}

Vector DuffingCoordinates::to_phi(const Vector& xy) const {
  Vector shifted = xy;
  shifted(0) -= 1.0;
  return T_inv * shifted;
}

Matrix DuffingCoordinates::to_phi(const Matrix& xy) const {
  Matrix shifted = xy;
  shifted.row(0).array() -= 1.0;
  return T_inv * shifted;
}

Vector DuffingCoordinates::from_phi(const Vector& phi) const {
  Vector xy = T * phi;
  xy(0) += 1.0;
  return xy;
}

SystemSpec duffing_phi(const DuffingParams& p) {
  const DuffingCoordinates c = duffing_coordinates(p.damping);
  SystemSpec s;
  s.name = "duffing_phi";
  s.kind = SystemKind::Ode;
  s.dim = 2;
  s.params = {{"damping", p.damping}, {"epsilon", p.epsilon}, {"omega", p.omega}};
  s.rhs = [c, p](double t, const Vector& phi) -> Vector {
    return c.A * phi + c.q * c.basis.eval(phi) + p.epsilon * std::cos(p.omega * t) * c.forcing;
  };
  s.fixed_point = Vector::Zero(2);
  s.eigenvalues = sorted_eigenvalues(c.A);
  return s;
}

Matrix chain_stiffness(const ChainParams& p) {
  const int n = p.masses;
  if (n < 2) throw ParameterError("oscillator_chain: need at least two masses");
  Matrix k = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    k(i, i) = 2.0 * p.stiffness;
    if (i + 1 < n) k(i, i + 1) = k(i + 1, i) = -p.stiffness;
  }
  if (p.fixed_free) k(n - 1, n - 1) = p.stiffness;
  return k;
}

Matrix chain_linear_part(const ChainParams& p) {
  const int n = p.masses;
  const Matrix k = chain_stiffness(p);
  const Matrix c = p.mass_damping * Matrix::Identity(n, n) + p.stiffness_damping * k;
  Matrix a = Matrix::Zero(2 * n, 2 * n);
  a.topRightCorner(n, n).setIdentity();
  a.bottomLeftCorner(n, n) = -k;
  a.bottomRightCorner(n, n) = -c;
  return a;
}

namespace {

struct ChainMode {
  Complex lambda;
  Vector shape;
};

// Modes ordered slowest decay first. Proportional damping keeps mode shapes real.
std::vector<ChainMode> chain_modes(const ChainParams& p) {
  const Matrix k = chain_stiffness(p);
  Eigen::SelfAdjointEigenSolver<Matrix> es(k);
  std::vector<ChainMode> modes;
  for (Eigen::Index j = 0; j < k.rows(); ++j) {
    const double w2 = es.eigenvalues()(j);
    const double c = p.mass_damping + p.stiffness_damping * w2;
    const Complex disc = std::sqrt(Complex(c * c - 4.0 * w2, 0.0));
    modes.push_back({(-c + disc) / 2.0, es.eigenvectors().col(j)});
  }
  std::sort(modes.begin(), modes.end(), [](const ChainMode& x, const ChainMode& y) { return x.lambda.real() > y.lambda.real(); });
  return modes;
}

}  // namespace

SystemSpec oscillator_chain(const ChainParams& p) {
  SystemSpec s;
  s.name = "chain";
  s.kind = SystemKind::Ode;
  const int n = p.masses;
  s.dim = 2 * n;
  s.params = {{"cubic", p.cubic}, {"stiffness", p.stiffness}, {"mass_damping", p.mass_damping},
              {"stiffness_damping", p.stiffness_damping}, {"fixed_free", p.fixed_free ? 1.0 : 0.0}};
  const Matrix a = chain_linear_part(p);
  const double cubic = p.cubic;
  s.rhs = [a, cubic, n](double, const Vector& x) -> Vector {
    Vector dx = a * x;
    dx(n) -= cubic * x(0) * x(0) * x(0);
    return dx;
  };
  s.fixed_point = Vector::Zero(2 * n);
  s.eigenvalues = sorted_eigenvalues(a);
  const auto modes = chain_modes(p);
  s.metadata["slow_real"] = modes.front().lambda.real();
  s.metadata["slow_imag"] = std::abs(modes.front().lambda.imag());
  return s;
}

Matrix chain_mode_plane(int j, const ChainParams& p) {
  const auto modes = chain_modes(p);
  if (j < 0 || j >= static_cast<int>(modes.size())) throw ParameterError("chain_mode_plane: mode index out of range");
  const ChainMode& m = modes[static_cast<std::size_t>(j)];
  const Complex lam(m.lambda.real(), std::abs(m.lambda.imag()));
  const auto n = m.shape.size();
  Matrix plane = Matrix::Zero(2 * n, 2);
  plane.col(0).head(n) = m.shape;
  plane.col(0).tail(n) = lam.real() * m.shape;
  plane.col(1).tail(n) = lam.imag() * m.shape;
  return plane;
}

SystemSpec nonsmooth_1d(double alpha) {
  if (!(alpha > 0.0)) throw ParameterError("nonsmooth_1d: alpha must be positive");
  SystemSpec s;
  s.name = "nonsmooth";
  s.kind = SystemKind::Ode;
  s.dim = 1;
  s.params = {{"alpha", alpha}};
  s.rhs = [alpha](double, const Vector& x) {
    Vector dx(1);
    dx(0) = -x(0) + std::pow(std::abs(x(0)), 1.0 + alpha);
    return dx;
  };
  s.fixed_point = Vector::Zero(1);
  s.eigenvalues = {Complex(-1.0, 0.0)};
  s.metadata["second_derivative_singular"] = alpha < 1.0 ? 1.0 : 0.0;
  return s;
}

SystemSpec linear_map(const Matrix& a) {
  if (a.rows() != a.cols()) throw ShapeError("linear_map: matrix must be square");
  SystemSpec s;
  s.name = "linear_map";
  s.kind = SystemKind::Map;
  s.dim = static_cast<int>(a.rows());
  s.step = [a](const Vector& x) -> Vector { return a * x; };
  s.fixed_point = Vector::Zero(s.dim);
  s.eigenvalues = sorted_eigenvalues(a);
  return s;
}

std::vector<ObservableCheck> rank_degeneracy_observables(const ChainParams& p) {
  const int n = p.masses;
  const Matrix plane = chain_mode_plane(0, p);
  std::vector<ObservableCheck> out(3);
  out[0].name = "phi1 (Re e1, Im e1)";
  out[0].jacobian = plane.transpose();
  out[1].name = "phi2 (q1, q1_dot)";
  out[1].jacobian = Matrix::Zero(2, 2 * n);
  out[1].jacobian(0, 0) = 1.0;
  out[1].jacobian(1, n) = 1.0;
  out[2].name = "phi3 (q1, q2)";
  out[2].jacobian = Matrix::Zero(2, 2 * n);
  out[2].jacobian(0, 0) = 1.0;
  out[2].jacobian(1, 1) = 1.0;
  for (auto& o : out) {
    o.rank_on_E = numerical_rank(o.jacobian * plane, 1e-8);
    o.ok = o.rank_on_E == 2;
  }
  return out;
}

Trajectory integrate(const SystemSpec& spec, const Vector& x0, double t_end, double dt_out, const Rk45Options& opts) {
  if (spec.kind != SystemKind::Ode) throw ParameterError("integrate: " + spec.name + " is a map");
  if (x0.size() != spec.dim) throw ShapeError("integrate: initial state dimension mismatch");
  return integrate_rk45(spec.rhs, x0, 0.0, t_end, dt_out, opts);
}

Trajectory iterate(const SystemSpec& spec, const Vector& x0, int n) {
  if (spec.kind != SystemKind::Map) throw ParameterError("iterate: " + spec.name + " is an ODE");
  if (x0.size() != spec.dim) throw ShapeError("iterate: initial state dimension mismatch");
  if (n < 0) throw ParameterError("iterate: negative step count");
  Trajectory out{Vector(n + 1), Matrix(spec.dim, n + 1)};
  Vector x = x0;
  for (int j = 0; j <= n; ++j) {
    out.t(j) = j;
    out.x.col(j) = x;
    if (j < n) {
      x = spec.step(x);
      if (!x.allFinite()) throw NumericalError("iterate: non-finite state at step " + std::to_string(j + 1));
    }
  }
  return out;
}

Matrix numerical_jacobian(const SystemSpec& spec, const Vector& x, double h) {
  auto f = [&](const Vector& y) -> Vector { return spec.kind == SystemKind::Ode ? spec.rhs(0.0, y) : spec.step(y); };
  Matrix j(spec.dim, spec.dim);
  Vector xp = x;
  for (int i = 0; i < spec.dim; ++i) {
    xp(i) = x(i) + h;
    const Vector fp = f(xp);
    xp(i) = x(i) - h;
    const Vector fm = f(xp);
    xp(i) = x(i);
    j.col(i) = (fp - fm) / (2.0 * h);
  }
  return j;
}

std::vector<std::string> system_names() {
  return {"stuart_landau", "nonnormal3d", "duffing", "duffing_phi", "chain", "nonsmooth"};
}

SystemSpec make_system(const std::string& name, const std::map<std::string, double>& params) {
  if (name == "stuart_landau") return stuart_landau_radial();
  if (name == "nonnormal3d") {
    NonnormalParams p;
    p.a = param_or(params, "a", p.a);
    p.b = param_or(params, "b", p.b);
    p.c = param_or(params, "c", p.c);
    p.theta1 = param_or(params, "theta1", p.theta1);
    p.theta2 = param_or(params, "theta2", p.theta2);
    return three_d_nonnormal_map(p);
  }
  if (name == "duffing" || name == "duffing_phi") {
    DuffingParams p;
    p.damping = param_or(params, "damping", p.damping);
    p.epsilon = param_or(params, "epsilon", p.epsilon);
    p.omega = param_or(params, "omega", p.omega);
    return name == "duffing" ? duffing(p) : duffing_phi(p);
  }
  if (name == "chain") {
    ChainParams p;
    p.cubic = param_or(params, "cubic", p.cubic);
    p.stiffness = param_or(params, "stiffness", p.stiffness);
    p.mass_damping = param_or(params, "mass_damping", p.mass_damping);
    p.stiffness_damping = param_or(params, "stiffness_damping", p.stiffness_damping);
    p.fixed_free = param_or(params, "fixed_free", 1.0) != 0.0;
    return oscillator_chain(p);
  }
  if (name == "nonsmooth") return nonsmooth_1d(param_or(params, "alpha", 1.0));
  throw ParameterError("unknown system '" + name + "'");
}

}  // namespace ddl::testbed
