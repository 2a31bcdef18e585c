/**
 * @file io.hpp
 * @brief Model files (JSON), trajectory CSV and forced-response branch output.
 *
 * Trajectory CSV: header `t,phi_1,...,phi_d`, one row per sample, uniform step.
 * Branch CSV: header `omega,amplitude,stable,fold`.
 */
#pragma once

#include <string>

#include "ddl/forced.hpp"
#include "ddl/linfit.hpp"
#include "ddl/model.hpp"
#include "ddl/ode.hpp"

namespace ddl::io {

/// "dmd", "edmd" or "ddl".
[[nodiscard]] std::string model_kind(const std::string& path);

[[nodiscard]] std::string dump_model(const DdlModel& model);
[[nodiscard]] std::string dump_model(const LinearModel& model);
[[nodiscard]] DdlModel parse_ddl_model(const std::string& text);
[[nodiscard]] LinearModel parse_linear_model(const std::string& text);

void save_model(const DdlModel& model, const std::string& path);
void save_model(const LinearModel& model, const std::string& path);
[[nodiscard]] DdlModel load_ddl_model(const std::string& path);
[[nodiscard]] LinearModel load_linear_model(const std::string& path);

void write_trajectory_csv(const Trajectory& traj, const std::string& path);
/// Reads and validates a trajectory CSV; `dt` receives the sampling step.
[[nodiscard]] Trajectory read_trajectory_csv(const std::string& path, double& dt, double rel_tol = 1e-9);

void write_branch_csv(const FrcBranch& branch, const std::string& path);
/// Orbit anchors (omega, gamma0, multipliers) for restarting a continuation.
void write_branch_anchors(const FrcBranch& branch, const std::string& path);

[[nodiscard]] std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& text);

}  // namespace ddl::io
