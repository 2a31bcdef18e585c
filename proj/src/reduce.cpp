#include "ddl/reduce.hpp"

#include <algorithm>
#include <cmath>

#include "ddl/spectral.hpp"

namespace ddl {

TrajectorySet::TrajectorySet(std::vector<Trajectory> trajs, double step) : trajectories(std::move(trajs)), dt(step) {
  validate();
}

int TrajectorySet::dim() const { return trajectories.empty() ? 0 : static_cast<int>(trajectories.front().x.rows()); }

Matrix TrajectorySet::stacked() const {
  Eigen::Index total = 0;
  for (const auto& tr : trajectories) total += tr.x.cols();
  Matrix out(dim(), total);
  Eigen::Index c = 0;
  for (const auto& tr : trajectories) {
    out.middleCols(c, tr.x.cols()) = tr.x;
    c += tr.x.cols();
  }
  return out;
}

void TrajectorySet::validate(double rel_tol) const {
  if (!(dt > 0.0)) throw ParameterError("TrajectorySet: dt must be positive");
  for (std::size_t k = 0; k < trajectories.size(); ++k) {
    const auto& tr = trajectories[k];
    if (tr.t.size() != tr.x.cols())
      throw ShapeError("TrajectorySet: trajectory " + std::to_string(k) + " has mismatched time and state counts");
    if (tr.x.rows() != dim()) throw ShapeError("TrajectorySet: trajectories differ in dimension");
    for (Eigen::Index j = 1; j < tr.t.size(); ++j) {
      const double step = tr.t(j) - tr.t(j - 1);
      if (!(step > 0.0)) throw ParameterError("TrajectorySet: time stamps must increase strictly");
      if (std::abs(step - dt) > rel_tol * dt)
        throw ParameterError("TrajectorySet: non-uniform sampling in trajectory " + std::to_string(k) + " at sample " +
                             std::to_string(j));
    }
  }
}

Trajectory make_trajectory(const Matrix& states, double dt, double t0) {
  Trajectory tr{Vector(states.cols()), states};
  for (Eigen::Index j = 0; j < states.cols(); ++j) tr.t(j) = t0 + static_cast<double>(j) * dt;
  return tr;
}

Matrix delay_embed(const Matrix& series, int dim, int lag) {
  if (dim < 1 || lag < 1) throw ParameterError("delay_embed: dim and lag must be >= 1");
  const Eigen::Index len = series.cols() - static_cast<Eigen::Index>(dim - 1) * lag;
  if (len < 1) throw ParameterError("delay_embed: series too short for dim * lag");
  const auto p = series.rows();
  Matrix out(p * dim, len);
  for (int j = 0; j < dim; ++j) out.middleRows(j * p, p) = series.middleCols(static_cast<Eigen::Index>(j) * lag, len);
  return out;
}

TrajectorySet delay_embed(const TrajectorySet& set, int dim, int lag) {
  TrajectorySet out;
  out.dt = set.dt;
  out.labels = set.labels;
  for (const auto& tr : set.trajectories) {
    Matrix x = delay_embed(tr.x, dim, lag);
    out.trajectories.push_back(Trajectory{tr.t.head(x.cols()), std::move(x)});
  }
  return out;
}

TruncationResult truncate_transients(const TrajectorySet& set, int d, const TruncationParams& params) {
  if (d < 1) throw ParameterError("truncate_transients: d must be >= 1");
  if (d > 1 && d % 2 != 0) throw ParameterError("truncate_transients: d must be even or 1");
  if (!(params.prominence > 0.0) || params.max_fraction < 0.0 || params.max_fraction > 1.0)
    throw ParameterError("truncate_transients: invalid parameters");
  const int wanted = (d + 1) / 2;
  TruncationResult out;
  out.set.dt = set.dt;
  out.set.labels = set.labels;
  for (std::size_t k = 0; k < set.trajectories.size(); ++k) {
    const Trajectory& tr = set.trajectories[k];
    const auto n = tr.x.cols();
    const Eigen::Index window = params.window > 0 ? params.window
                                                  : std::max<Eigen::Index>(8, static_cast<Eigen::Index>(params.window_fraction * n));
    if (window > n) throw ParameterError("truncate_transients: window longer than trajectory " + std::to_string(k));
    const Eigen::Index hop = params.hop > 0 ? params.hop : std::max<Eigen::Index>(1, window / 16);
    const auto limit = static_cast<Eigen::Index>(params.max_fraction * static_cast<double>(n));
    long found = -1;
    for (Eigen::Index s = 0; s + window <= n && s <= limit; s += hop) {
      const int peaks = static_cast<int>(spectral_peaks(power_spectrum(tr.x.middleCols(s, window)), params.prominence).size());
      if (peaks == wanted) {
        found = static_cast<long>(s);
        break;
      }
    }
    if (found < 0)
      throw NumericalError("truncate_transients: no window of trajectory " + std::to_string(k) + " shows " +
                           std::to_string(wanted) + " dominant frequencies; supply a start index manually");
    out.start.push_back(found);
    out.set.trajectories.push_back(Trajectory{tr.t.tail(n - found), tr.x.rightCols(n - found)});
  }
  return out;
}

Matrix ReducedEmbedding::reduce(const Matrix& states) const {
  return projection * (states.colwise() - offset);
}

Matrix ReducedEmbedding::lift(const Matrix& reduced) const {
  return (projection.transpose() * reduced).colwise() + offset;
}

ReductionResult svd_reduce(const TrajectorySet& set, int d, const std::optional<Vector>& fixed_point, double rank_tol) {
  if (set.trajectories.empty()) throw ParameterError("svd_reduce: no trajectories");
  const Matrix data = set.stacked();
  if (d < 1 || d > data.rows()) throw ParameterError("svd_reduce: target dimension out of range");
  ReductionResult out;
  ReducedEmbedding& emb = out.embedding;
  if (fixed_point) {
    if (fixed_point->size() != data.rows()) throw ShapeError("svd_reduce: fixed point dimension mismatch");
    emb.offset = *fixed_point;
  } else {
    emb.offset = data.rowwise().mean();
  }
  const Matrix centered = data.colwise() - emb.offset;
  Eigen::BDCSVD<Matrix> svd(centered, Eigen::ComputeThinU);
  emb.singular_values = svd.singularValues();
  const Vector& s = emb.singular_values;
  if (s.size() < d || !(s(d - 1) > rank_tol * s(0)))
    throw NumericalError("svd_reduce: data has fewer than " + std::to_string(d) + " meaningful singular values");
  emb.projection = svd.matrixU().leftCols(d).transpose();
  out.reduced.dt = set.dt;
  out.reduced.labels = set.labels;
  for (const auto& tr : set.trajectories) out.reduced.trajectories.push_back(Trajectory{tr.t, emb.reduce(tr.x)});
  return out;
}

SnapshotPairs snapshot_pairs(const TrajectorySet& set, int stride) {
  if (stride < 1) throw ParameterError("snapshot_pairs: stride must be >= 1");
  Eigen::Index total = 0;
  for (std::size_t k = 0; k < set.trajectories.size(); ++k) {
    const auto n = set.trajectories[k].x.cols();
    if (n <= stride) throw ParameterError("snapshot_pairs: trajectory " + std::to_string(k) + " shorter than stride");
    total += n - stride;
  }
  if (total == 0) throw ParameterError("snapshot_pairs: no data");
  Matrix phi(set.dim(), total), phi_hat(set.dim(), total);
  Eigen::Index c = 0;
  for (const auto& tr : set.trajectories) {
    const auto m = tr.x.cols() - stride;
    phi.middleCols(c, m) = tr.x.leftCols(m);
    phi_hat.middleCols(c, m) = tr.x.rightCols(m);
    c += m;
  }
  return SnapshotPairs(std::move(phi), std::move(phi_hat), stride * set.dt);
}

}  // namespace ddl
