#include "ddl/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace ddl::io {

using nlohmann::json;

namespace {

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j, Eigen::Index rows, Eigen::Index cols, const char* what) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows)
    throw IoError(std::string("model file: field '") + what + "' has the wrong number of rows");
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw IoError(std::string("model file: field '") + what + "' has the wrong number of columns");
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

json vector_to_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Vector vector_from_json(const json& j) {
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

json basis_to_json(const MonomialBasis& b) { return json{{"dim", b.dim()}, {"exponents", b.exponents()}}; }

MonomialBasis basis_from_json(const json& j) {
  return MonomialBasis(j.at("dim").get<int>(), j.at("exponents").get<std::vector<Exponent>>());
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw IoError(std::string("model file: malformed JSON: ") + e.what());
  }
}

template <class Fn>
auto guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw IoError(std::string("model file: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw IoError(std::string("model file: ") + e.what());
  }
}

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IoError("failed writing '" + path + "'");
}

std::string dump_model(const DdlModel& model) {
  model.validate();
  json j;
  j["kind"] = "ddl";
  j["d"] = model.d;
  j["dt"] = model.dt;
  j["nu"] = model.nu;
  j["basis"] = basis_to_json(model.basis);
  j["B"] = matrix_to_json(model.B);
  j["Q"] = matrix_to_json(model.Q);
  j["Qinv"] = matrix_to_json(model.Qinv);
  j["hull_lower"] = vector_to_json(model.hull_lower);
  j["hull_upper"] = vector_to_json(model.hull_upper);
  const FitReport& r = model.report;
  j["report"] = {{"initial_cost", r.initial_cost}, {"final_cost", r.final_cost},  {"l1", r.l1},
                 {"l2", r.l2},                     {"iterations", r.iterations},  {"converged", r.converged},
                 {"stop_reason", r.stop_reason},   {"inverse_consistency", r.inverse_consistency},
                 {"warnings", r.warnings}};
  return j.dump(2) + "\n";
}

std::string dump_model(const LinearModel& model) {
  json j;
  j["kind"] = model.kind == LinearKind::Dmd ? "dmd" : "edmd";
  j["d"] = model.d;
  j["dt"] = model.dt;
  j["D"] = matrix_to_json(model.D);
  if (model.basis) j["basis"] = basis_to_json(*model.basis);
  j["warnings"] = model.warnings;
  return j.dump(2) + "\n";
}

DdlModel parse_ddl_model(const std::string& text) {
  const json j = parse_json(text);
  return guarded([&] {
    if (j.at("kind").get<std::string>() != "ddl") throw IoError("model file: not a ddl model");
    DdlModel m;
    m.d = j.at("d").get<int>();
    m.dt = j.at("dt").get<double>();
    m.nu = j.at("nu").get<double>();
    m.basis = basis_from_json(j.at("basis"));
    const auto M = static_cast<Eigen::Index>(m.basis.size());
    m.B = matrix_from_json(j.at("B"), m.d, m.d, "B");
    m.Q = matrix_from_json(j.at("Q"), m.d, M, "Q");
    m.Qinv = matrix_from_json(j.at("Qinv"), m.d, M, "Qinv");
    m.hull_lower = vector_from_json(j.at("hull_lower"));
    m.hull_upper = vector_from_json(j.at("hull_upper"));
    if (j.contains("report")) {
      const json& r = j.at("report");
      m.report.initial_cost = r.value("initial_cost", 0.0);
      m.report.final_cost = r.value("final_cost", 0.0);
      m.report.l1 = r.value("l1", 0.0);
      m.report.l2 = r.value("l2", 0.0);
      m.report.iterations = r.value("iterations", 0);
      m.report.converged = r.value("converged", false);
      m.report.stop_reason = r.value("stop_reason", std::string());
      m.report.inverse_consistency = r.value("inverse_consistency", 0.0);
      m.report.warnings = r.value("warnings", std::vector<std::string>{});
    }
    m.validate();
    return m;
  });
}

LinearModel parse_linear_model(const std::string& text) {
  const json j = parse_json(text);
  return guarded([&] {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind != "dmd" && kind != "edmd") throw IoError("model file: not a dmd/edmd model");
    LinearModel m;
    m.kind = kind == "dmd" ? LinearKind::Dmd : LinearKind::Edmd;
    m.d = j.at("d").get<int>();
    m.dt = j.at("dt").get<double>();
    Eigen::Index n = m.d;
    if (m.kind == LinearKind::Edmd) {
      m.basis = basis_from_json(j.at("basis"));
      n += static_cast<Eigen::Index>(m.basis->size());
    }
    m.D = matrix_from_json(j.at("D"), n, n, "D");
    m.warnings = j.value("warnings", std::vector<std::string>{});
    return m;
  });
}

std::string model_kind(const std::string& path) {
  const json j = parse_json(read_text(path));
  if (!j.contains("kind") || !j["kind"].is_string()) throw IoError("model file '" + path + "' has no kind");
  return j["kind"].get<std::string>();
}

void save_model(const DdlModel& model, const std::string& path) { write_text(path, dump_model(model)); }
void save_model(const LinearModel& model, const std::string& path) { write_text(path, dump_model(model)); }
DdlModel load_ddl_model(const std::string& path) { return parse_ddl_model(read_text(path)); }
LinearModel load_linear_model(const std::string& path) { return parse_linear_model(read_text(path)); }

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
  std::ostringstream os;
  os << 't';
  for (Eigen::Index i = 0; i < traj.x.rows(); ++i) os << ",phi_" << (i + 1);
  os << '\n';
  for (Eigen::Index j = 0; j < traj.x.cols(); ++j) {
    os << format_double(traj.t(j));
    for (Eigen::Index i = 0; i < traj.x.rows(); ++i) os << ',' << format_double(traj.x(i, j));
    os << '\n';
  }
  write_text(path, os.str());
}

Trajectory read_trajectory_csv(const std::string& path, double& dt, double rel_tol) {
  std::istringstream in(read_text(path));
  std::string line;
  if (!std::getline(in, line)) throw IoError("'" + path + "': empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header;
  {
    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) header.push_back(cell);
  }
  if (header.size() < 2 || header[0] != "t") throw IoError("'" + path + "': header must be t,phi_1,...,phi_d");
  for (std::size_t i = 1; i < header.size(); ++i)
    if (header[i] != "phi_" + std::to_string(i)) throw IoError("'" + path + "': unexpected header column '" + header[i] + "'");
  const auto d = static_cast<Eigen::Index>(header.size() - 1);

  std::vector<double> times;
  std::vector<double> values;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ls, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw IoError("'" + path + "': non-numeric value on line " + std::to_string(line_no));
      }
    }
    if (static_cast<Eigen::Index>(row.size()) != d + 1)
      throw IoError("'" + path + "': wrong column count on line " + std::to_string(line_no));
    times.push_back(row[0]);
    values.insert(values.end(), row.begin() + 1, row.end());
  }
  if (times.size() < 2) throw IoError("'" + path + "': need at least two samples");
  Trajectory tr{Vector(static_cast<Eigen::Index>(times.size())), Matrix(d, static_cast<Eigen::Index>(times.size()))};
  for (std::size_t j = 0; j < times.size(); ++j) {
    tr.t(static_cast<Eigen::Index>(j)) = times[j];
    for (Eigen::Index i = 0; i < d; ++i) tr.x(i, static_cast<Eigen::Index>(j)) = values[j * static_cast<std::size_t>(d) + static_cast<std::size_t>(i)];
  }
  dt = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
  if (!(dt > 0.0)) throw IoError("'" + path + "': time must increase");
  for (std::size_t j = 1; j < times.size(); ++j) {
    const double step = times[j] - times[j - 1];
    if (std::abs(step - dt) > rel_tol * dt)
      throw IoError("'" + path + "': non-uniform time step at line " + std::to_string(j + 2));
  }
  return tr;
}

void write_branch_csv(const FrcBranch& branch, const std::string& path) {
  std::ostringstream os;
  os << "omega,amplitude,stable,fold\n";
  for (const auto& p : branch.points)
    os << format_double(p.omega) << ',' << format_double(p.amplitude) << ',' << (p.stable ? 1 : 0) << ','
       << (p.fold ? 1 : 0) << '\n';
  write_text(path, os.str());
}

void write_branch_anchors(const FrcBranch& branch, const std::string& path) {
  json j;
  j["method"] = branch.method;
  j["epsilon"] = branch.epsilon;
  j["truncated"] = branch.truncated;
  json pts = json::array();
  for (const auto& p : branch.points) {
    json mult = json::array();
    for (const auto& z : p.multipliers) mult.push_back({z.real(), z.imag()});
    pts.push_back({{"omega", p.omega}, {"gamma0", vector_to_json(p.gamma0)}, {"multipliers", mult}, {"residual", p.residual}});
  }
  j["points"] = std::move(pts);
  write_text(path, j.dump(2) + "\n");
}

}  // namespace ddl::io
