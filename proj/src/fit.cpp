#include <cmath>
#include <sstream>

#include "ddl/lm.hpp"
#include "ddl/model.hpp"

namespace ddl {

namespace {

void set_hull(DdlModel& model, const SnapshotPairs& pairs) {
  model.hull_lower = pairs.phi.rowwise().minCoeff().cwiseMin(pairs.phi_hat.rowwise().minCoeff());
  model.hull_upper = pairs.phi.rowwise().maxCoeff().cwiseMax(pairs.phi_hat.rowwise().maxCoeff());
}

std::string describe_nonfinite(const DdlModel& shape, const SnapshotPairs& pairs, const Vector& params) {
  DdlModel m = shape;
  unpack_parameters(m, params);
  const Vector r = residuals(m, pairs);
  const Eigen::Index half = r.size() / 2;
  const bool bad1 = !r.head(half).allFinite();
  const bool bad2 = !r.tail(half).allFinite();
  std::ostringstream os;
  os << "non-finite values in ";
  if (bad1 && bad2) os << "both the invariance term L1 and the inverse term L2";
  else if (bad1) os << "the invariance term L1";
  else if (bad2) os << "the inverse term L2";
  else os << "no residual term (parameters overflowed)";
  return os.str();
}

DdlModel run_lm(const SnapshotPairs& pairs, const FitOptions& opts, int max_accepted) {
  if (opts.nu < 0.0) throw ParameterError("fit: nu must be nonnegative");
  if (opts.max_iter < 0) throw ParameterError("fit: max_iter must be nonnegative");
  DdlModel model = dmd_seed(pairs, opts.k, opts.nu, opts.lstsq);
  const DdlModel shape = model;

  std::vector<std::string> warnings = model.report.warnings;
  const auto n_res = 2 * pairs.dim() * pairs.count();
  if (n_res < model.parameter_count())
    warnings.push_back("overfit regime: " + std::to_string(n_res) + " residuals < " +
                       std::to_string(model.parameter_count()) + " parameters");

  DdlModel work = shape;
  auto residual_fn = [&](const Vector& p) {
    unpack_parameters(work, p);
    return residuals(work, pairs);
  };
  auto jacobian_fn = [&](const Vector& p) {
    unpack_parameters(work, p);
    return opts.finite_difference_jacobian ? residual_jacobian_fd(work, pairs) : residual_jacobian(work, pairs);
  };

  LmOptions lm;
  lm.initial_damping = opts.initial_damping;
  lm.max_iter = opts.max_iter;
  lm.cost_tol = opts.tol;
  lm.rel_decrease_tol = opts.rel_decrease_tol;
  lm.max_accepted_steps = max_accepted;
  lm.on_iteration = opts.progress;
  const LmResult res = levenberg_marquardt(pack_parameters(model), residual_fn, jacobian_fn, lm,
                                           [&](const Vector& p) { return describe_nonfinite(shape, pairs, p); });

  unpack_parameters(model, res.x);
  const DdlCost c = cost(model, pairs);
  FitReport& rep = model.report;
  rep.initial_cost = res.initial_cost;
  rep.final_cost = c.total;
  rep.l1 = c.l1;
  rep.l2 = c.l2;
  rep.iterations = res.iterations;
  rep.converged = res.converged;
  rep.stop_reason = res.stop_reason;
  rep.warnings = std::move(warnings);
  if (res.regularized) rep.warnings.push_back("singular normal equations regularized by damping");
  if (opts.consistency_samples > 0)
    rep.inverse_consistency = inverse_consistency(model, hull_samples(model, opts.consistency_samples, opts.consistency_seed));
  return model;
}

}  // namespace

DdlModel dmd_seed(const SnapshotPairs& pairs, int k, double nu, const LstsqOptions& opts) {
  const LinearModel dmd = fit_dmd(pairs, opts);
  DdlModel model;
  model.d = pairs.dim();
  model.basis = enumerate_monomials(model.d, 2, k);
  model.B = dmd.D;
  model.Q = Matrix::Zero(model.d, model.features());
  model.Qinv = Matrix::Zero(model.d, model.features());
  model.dt = pairs.dt;
  model.nu = nu;
  set_hull(model, pairs);
  const DdlCost c = cost(model, pairs);
  model.report.initial_cost = c.total;
  model.report.final_cost = c.total;
  model.report.l1 = c.l1;
  model.report.l2 = c.l2;
  model.report.warnings = dmd.warnings;
  return model;
}

DdlModel fit(const SnapshotPairs& pairs, const FitOptions& opts) { return run_lm(pairs, opts, -1); }

DdlModel first_order_correction(const SnapshotPairs& pairs, const FitOptions& opts) {
  FitOptions one = opts;
  one.max_iter = std::max(opts.max_iter, 1);
  return run_lm(pairs, one, 1);
}

}  // namespace ddl
