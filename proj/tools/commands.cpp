#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "ddl/forced.hpp"
#include "ddl/io.hpp"
#include "ddl/linfit.hpp"
#include "ddl/model.hpp"
#include "ddl/reduce.hpp"
#include "ddl/spectral.hpp"
#include "ddl/testbed.hpp"
#include "json.hpp"

namespace ddl::cli {
namespace {

using json = nlohmann::ordered_json;

std::map<std::string, double> parse_params(const std::vector<std::string>& items) {
  std::map<std::string, double> out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw ParameterError("parameter '" + item + "' is not key=value");
    std::size_t used = 0;
    const std::string value = item.substr(eq + 1);
    double v = 0.0;
    try {
      v = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != value.size()) throw ParameterError("parameter '" + item + "' has a non-numeric value");
    out[item.substr(0, eq)] = v;
  }
  return out;
}

Vector to_vector(const std::vector<double>& v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
  return out;
}

std::string indexed_path(const std::string& path, int index, int count) {
  if (count == 1) return path;
  const auto dot = path.find_last_of('.');
  const auto slash = path.find_last_of('/');
  const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
  const std::string stem = has_ext ? path.substr(0, dot) : path;
  const std::string ext = has_ext ? path.substr(dot) : std::string(".csv");
  return stem + "_" + std::to_string(index) + ext;
}

TrajectorySet read_set(const std::vector<std::string>& paths) {
  if (paths.empty()) throw ParameterError("no input trajectories given");
  std::vector<Trajectory> trajs;
  double dt = 0.0;
  for (const auto& p : paths) {
    double step = 0.0;
    trajs.push_back(io::read_trajectory_csv(p, step));
    if (dt == 0.0) {
      dt = step;
    } else if (std::abs(step - dt) > 1e-9 * dt) {
      throw ParameterError("input '" + p + "' has a different sampling step");
    }
  }
  return TrajectorySet(std::move(trajs), dt);
}

json complex_list(const std::vector<Complex>& values) {
  json arr = json::array();
  for (const auto& v : values) arr.push_back({v.real(), v.imag()});
  return arr;
}

void emit(const json& doc, const std::string& path) {
  if (path.empty()) {
    std::cout << doc.dump(2) << "\n";
  } else {
    io::write_text(path, doc.dump(2) + "\n");
  }
}

json report_json(const FitReport& r) {
  return {{"initial_cost", r.initial_cost}, {"final_cost", r.final_cost}, {"l1", r.l1},
          {"l2", r.l2},                     {"iterations", r.iterations}, {"converged", r.converged},
          {"stop_reason", r.stop_reason},   {"inverse_consistency", r.inverse_consistency},
          {"warnings", r.warnings}};
}

Matrix predict_any(const std::string& path, const Vector& x0, int steps, double& dt) {
  const std::string kind = io::model_kind(path);
  if (kind == "ddl") {
    const DdlModel m = io::load_ddl_model(path);
    dt = m.dt;
    return predict(m, x0, steps);
  }
  const LinearModel m = io::load_linear_model(path);
  dt = m.dt;
  return predict(m, x0, steps);
}

double max_error(const Matrix& a, const Matrix& b) { return (a - b).colwise().norm().maxCoeff(); }

double rms_error(const Matrix& a, const Matrix& b) {
  return std::sqrt((a - b).colwise().squaredNorm().mean());
}

}  // namespace

int cmd_simulate(const SimulateConfig& cfg) {
  const testbed::SystemSpec spec = testbed::make_system(cfg.system, parse_params(cfg.params));
  const bool is_map = spec.kind == testbed::SystemKind::Map;
  if (!is_map && !(cfg.dt > 0.0 && cfg.t_end > 0.0)) throw ParameterError("--t and --dt must be positive");
  if (cfg.count < 1) throw ParameterError("--count must be at least 1");

  Matrix ics;
  if (!cfg.x0.empty()) {
    if (static_cast<int>(cfg.x0.size()) != spec.dim)
      throw ShapeError("--x0 has " + std::to_string(cfg.x0.size()) + " entries, system '" + cfg.system +
                       "' has dimension " + std::to_string(spec.dim));
    ics = to_vector(cfg.x0);
  } else {
    ics = testbed::random_initial_conditions(spec.dim, cfg.count, cfg.r_min, cfg.r_max, cfg.seed);
    if (spec.fixed_point) ics.colwise() += *spec.fixed_point;
  }

  const int count = static_cast<int>(ics.cols());
  for (int i = 0; i < count; ++i) {
    Trajectory traj = is_map ? testbed::iterate(spec, ics.col(i), cfg.steps)
                             : testbed::integrate(spec, ics.col(i), cfg.t_end, cfg.dt);
    if (cfg.observe) traj.x = spec.observe(traj.x);
    const std::string path = indexed_path(cfg.out, i, count);
    io::write_trajectory_csv(traj, path);
    std::cerr << "wrote " << path << " (" << traj.t.size() << " samples)\n";
  }
  return 0;
}

int cmd_fit(const FitConfig& cfg) {
  const TrajectorySet set = read_set(cfg.inputs);
  const SnapshotPairs pairs = snapshot_pairs(set, cfg.stride);
  json doc{{"method", cfg.method}, {"pairs", pairs.count()}, {"dim", pairs.dim()}, {"dt", pairs.dt}};

  if (cfg.method == "dmd" || cfg.method == "edmd") {
    const LinearModel m = cfg.method == "dmd" ? fit_dmd(pairs) : fit_edmd(pairs, cfg.k);
    io::save_model(m, cfg.out);
    doc["spectrum"] = complex_list(spectrum(m));
    doc["warnings"] = m.warnings;
    std::cout << doc.dump(2) << "\n";
    return 0;
  }
  if (cfg.method != "ddl") throw ParameterError("unknown method '" + cfg.method + "' (dmd, edmd, ddl)");

  FitOptions opts;
  opts.k = cfg.k;
  opts.nu = cfg.nu;
  opts.tol = cfg.tol;
  opts.max_iter = cfg.max_iter;
  if (cfg.verbose)
    opts.progress = [](int it, double c, double damping) {
      std::cerr << "iter " << it << "  cost " << c << "  damping " << damping << "\n";
    };
  const DdlModel m = fit(pairs, opts);
  io::save_model(m, cfg.out);
  doc["spectrum"] = complex_list(spectrum(m));
  doc["report"] = report_json(m.report);
  std::cout << doc.dump(2) << "\n";
  if (!m.report.converged) {
    std::cerr << "fit did not converge (" << m.report.stop_reason << "); model written anyway\n";
    return 1;
  }
  return 0;
}

int cmd_predict(const PredictConfig& cfg) {
  Trajectory truth;
  bool have_truth = false;
  if (!cfg.truth.empty()) {
    double step = 0.0;
    truth = io::read_trajectory_csv(cfg.truth, step);
    have_truth = true;
  }
  Vector x0;
  if (!cfg.x0.empty()) {
    x0 = to_vector(cfg.x0);
  } else if (have_truth) {
    x0 = truth.x.col(0);
  } else {
    throw ParameterError("predict needs --x0 or --truth");
  }
  const int steps = have_truth ? static_cast<int>(truth.x.cols()) - 1 : cfg.steps;
  if (steps < 0) throw ParameterError("--steps must be non-negative");

  double dt = 1.0;
  const Matrix pred = predict_any(cfg.model, x0, steps, dt);
  if (have_truth && truth.x.rows() != pred.rows()) throw ShapeError("truth dimension does not match the model");

  std::ostringstream os;
  os << std::setprecision(17) << "t";
  for (Eigen::Index i = 0; i < pred.rows(); ++i) os << ",phi_" << i + 1;
  if (have_truth) os << ",error";
  os << "\n";
  const double t0 = have_truth ? truth.t(0) : 0.0;
  for (Eigen::Index c = 0; c < pred.cols(); ++c) {
    os << t0 + static_cast<double>(c) * dt;
    for (Eigen::Index i = 0; i < pred.rows(); ++i) os << "," << pred(i, c);
    if (have_truth) os << "," << (pred.col(c) - truth.x.col(c)).norm();
    os << "\n";
  }
  io::write_text(cfg.out, os.str());
  if (have_truth) std::cerr << "max error " << max_error(pred, truth.x) << "\n";
  return 0;
}

int cmd_frc(const FrcConfig& cfg) {
  Vector forcing;
  if (!cfg.forcing.empty()) {
    forcing = to_vector(cfg.forcing);
  } else if (cfg.system == "duffing" || cfg.system == "duffing_phi") {
    forcing = testbed::duffing_coordinates().forcing;
  } else {
    throw ParameterError("frc needs --forcing or --system duffing");
  }
  if (!(cfg.omega_min > 0.0) || !(cfg.omega_max > cfg.omega_min)) throw ParameterError("invalid --omega-min/--omega-max");

  const std::string kind = io::model_kind(cfg.model);
  std::optional<DdlModel> ddl_model;
  Matrix generator;
  if (kind == "ddl") {
    ddl_model = io::load_ddl_model(cfg.model);
    generator = continuous_generator(*ddl_model);
  } else if (kind == "dmd") {
    generator = continuous_generator(io::load_linear_model(cfg.model));
  } else {
    throw ParameterError("frc needs a ddl or dmd model, got '" + kind + "'");
  }
  if (forcing.size() != generator.rows()) throw ShapeError("forcing length does not match the model dimension");

  json summary = json::array();
  for (const double eps : cfg.epsilons) {
    FrcBranch branch;
    if (ddl_model) {
      ContinuationOptions opts;
      opts.max_step = cfg.max_step;
      branch = continue_frc(forced_from_ddl(*ddl_model, forcing, eps), cfg.omega_min, cfg.omega_max, opts);
    } else {
      branch = dmd_frc(generator, forcing, eps, linspace(cfg.omega_min, cfg.omega_max, cfg.points));
    }
    std::ostringstream name;
    name << cfg.out << "_eps" << eps << ".csv";
    io::write_branch_csv(branch, name.str());
    const FrcPoint& peak = branch.peak();
    summary.push_back({{"epsilon", eps},
                       {"file", name.str()},
                       {"points", branch.points.size()},
                       {"peak_omega", peak.omega},
                       {"peak_amplitude", peak.amplitude},
                       {"folds", branch.fold_count()},
                       {"single_valued", branch.single_valued()},
                       {"truncated", branch.truncated}});
  }
  std::cout << summary.dump(2) << "\n";
  return 0;
}

int cmd_compare(const CompareConfig& cfg) {
  const TrajectorySet set = read_set(cfg.train);
  const SnapshotPairs pairs = snapshot_pairs(set, 1);
  double step = 0.0;
  const Trajectory test = io::read_trajectory_csv(cfg.test, step);
  if (std::abs(step - set.dt) > 1e-9 * set.dt) throw ParameterError("test trajectory has a different sampling step");
  if (test.x.rows() != pairs.dim()) throw ShapeError("test trajectory dimension does not match training data");
  const Vector x0 = test.x.col(0);
  const int n = static_cast<int>(test.x.cols()) - 1;

  const LinearModel dmd = fit_dmd(pairs);
  const LinearModel edmd = fit_edmd(pairs, cfg.k);
  FitOptions opts;
  opts.k = cfg.k;
  opts.nu = cfg.nu;
  opts.tol = cfg.tol;
  opts.max_iter = cfg.max_iter;
  const DdlModel ddl = fit(pairs, opts);

  auto entry = [&](const Matrix& pred, const std::vector<Complex>& spec) {
    return json{{"max_error", max_error(pred, test.x)}, {"rms_error", rms_error(pred, test.x)},
                {"spectrum", complex_list(spec)}};
  };
  std::vector<Complex> edmd_spec = spectrum(edmd);
  json doc{{"k", cfg.k},
           {"samples", n + 1},
           {"methods",
            {{"dmd", entry(predict(dmd, x0, n), spectrum(dmd))},
             {"edmd", entry(predict(edmd, x0, n), edmd_spec)},
             {"ddl", entry(predict(ddl, x0, n), spectrum(ddl))}}},
           {"ddl_report", report_json(ddl.report)}};
  emit(doc, cfg.out);
  return 0;
}

int cmd_spectrum(const SpectrumConfig& cfg) {
  const std::string kind = io::model_kind(cfg.model);
  std::vector<Complex> disc;
  Matrix gen;
  if (kind == "ddl") {
    const DdlModel m = io::load_ddl_model(cfg.model);
    disc = spectrum(m);
    gen = continuous_generator(m);
  } else {
    const LinearModel m = io::load_linear_model(cfg.model);
    disc = spectrum(m);
    gen = continuous_generator(m);
  }
  const std::vector<Complex> cont = sorted_eigenvalues(gen);
  json doc{{"kind", kind}, {"discrete", complex_list(disc)}, {"continuous", complex_list(cont)}};
  emit(doc, cfg.out);
  return 0;
}

int cmd_validity(const ValidityConfig& cfg) {
  if (io::model_kind(cfg.model) != "ddl") throw ParameterError("validity needs a ddl model");
  const DdlModel m = io::load_ddl_model(cfg.model);
  const Matrix samples = radial_samples(m.d, cfg.r_max, cfg.radii, cfg.directions, cfg.seed);
  const ValidityResult res = validity_domain(m, samples, cfg.tol);
  std::size_t valid = 0;
  for (bool b : res.mask) valid += b ? 1 : 0;
  json doc{{"radius", res.radius},
           {"tol", cfg.tol},
           {"samples", samples.cols()},
           {"valid_fraction", static_cast<double>(valid) / static_cast<double>(samples.cols())},
           {"max_error", res.errors.maxCoeff()}};
  emit(doc, cfg.out);
  return 0;
}

int cmd_diagnose(const DiagnoseConfig& cfg) {
  const TrajectorySet set = read_set(cfg.inputs);
  DiagnosticsOptions opts;
  opts.rank_tol = cfg.rank_tol;
  opts.peak_fraction = cfg.prominence;
  const DataReport r = data_diagnostics(snapshot_pairs(set, 1), cfg.d, opts);
  json sv = json::array();
  for (Eigen::Index i = 0; i < r.singular_values.size(); ++i) sv.push_back(r.singular_values(i));
  json doc{{"rank", r.rank},
           {"condition", r.condition},
           {"frequency_count", r.frequency_count},
           {"singular_values", sv},
           {"flags", r.flags}};
  emit(doc, cfg.out);
  return 0;
}

}  // namespace ddl::cli
