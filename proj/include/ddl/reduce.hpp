/**
 * @file reduce.hpp
 * @brief From raw trajectories to reduced coordinates and snapshot pairs.
 */
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ddl/linfit.hpp"
#include "ddl/ode.hpp"
#include "ddl/types.hpp"

namespace ddl {

/// Trajectories sharing a uniform sampling step.
struct TrajectorySet {
  std::vector<Trajectory> trajectories;
  double dt = 1.0;
  std::vector<std::string> labels;

  TrajectorySet() = default;
  TrajectorySet(std::vector<Trajectory> trajs, double step);

  [[nodiscard]] int dim() const;
  [[nodiscard]] std::size_t size() const { return trajectories.size(); }
  /// All samples side by side.
  [[nodiscard]] Matrix stacked() const;
  /// Throws ParameterError when dt is non-uniform or time is not increasing.
  void validate(double rel_tol = 1e-9) const;
};

/// Wraps sampled states with times t0 + j dt.
[[nodiscard]] Trajectory make_trajectory(const Matrix& states, double dt, double t0 = 0.0);

/// Rows [j*p, (j+1)*p) of the result hold the series shifted by j*lag.
[[nodiscard]] Matrix delay_embed(const Matrix& series, int dim, int lag);
[[nodiscard]] TrajectorySet delay_embed(const TrajectorySet& set, int dim, int lag);

struct TruncationParams {
  double window_fraction = 0.25;  ///< window length relative to each trajectory
  int window = 0;                 ///< explicit window length in samples (overrides the fraction)
  int hop = 0;                    ///< window advance; 0 means window / 16
  double prominence = 0.1;        ///< peak prominence relative to the largest power
  double max_fraction = 0.8;      ///< never drop more than this share of a trajectory
};

struct TruncationResult {
  TrajectorySet set;
  std::vector<long> start;  ///< first kept index per trajectory
};

/// Drops the leading samples of each trajectory until a window shows exactly
/// ceil(d/2) dominant spectral peaks. Throws NumericalError when no window qualifies.
[[nodiscard]] TruncationResult truncate_transients(const TrajectorySet& set, int d, const TruncationParams& params = {});

struct ReducedEmbedding {
  int delay_dim = 1;
  int lag = 1;
  Matrix projection;  ///< d x D with orthonormal rows
  Vector singular_values;
  Vector offset;  ///< subtracted before projecting

  [[nodiscard]] Matrix reduce(const Matrix& states) const;
  [[nodiscard]] Matrix lift(const Matrix& reduced) const;
};

struct ReductionResult {
  ReducedEmbedding embedding;
  TrajectorySet reduced;
};

/// Projects (x - offset) onto the d leading left singular directions of the
/// stacked data. offset is the data mean unless a fixed point is given.
[[nodiscard]] ReductionResult svd_reduce(const TrajectorySet& set, int d, const std::optional<Vector>& fixed_point = {},
                                         double rank_tol = 1e-10);

/// Pairs (x_j, x_{j+stride}) across all trajectories, dt = stride * set.dt.
[[nodiscard]] SnapshotPairs snapshot_pairs(const TrajectorySet& set, int stride = 1);

}  // namespace ddl
