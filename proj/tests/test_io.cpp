#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

#include "ddl/io.hpp"
#include "ddl/reduce.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace ddl;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  const fs::path p = fs::temp_directory_path() / "ddl_test_io";
  fs::create_directories(p);
  return p;
}

Matrix random_matrix(Eigen::Index r, Eigen::Index c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = u(rng) / 3.0;
  return m;
}

bool bit_equal(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

DdlModel sample_model() {
  DdlModel m;
  m.d = 2;
  m.basis = enumerate_monomials(2, 2, 4);
  m.B = random_matrix(2, 2, 1);
  m.Q = random_matrix(2, m.features(), 2);
  m.Qinv = random_matrix(2, m.features(), 3);
  m.dt = 0.1;
  m.nu = 0.3;
  m.hull_lower = Eigen::Vector2d(-0.3, -0.1 / 3.0);
  m.hull_upper = Eigen::Vector2d(0.7, 0.2);
  m.report.initial_cost = 1.0 / 3.0;
  m.report.final_cost = 1e-17 / 7.0;
  m.report.iterations = 12;
  m.report.converged = true;
  m.report.stop_reason = "cost tolerance";
  m.report.warnings = {"note"};
  return m;
}

void write_file(const fs::path& p, const std::string& s) {
  std::ofstream out(p);
  out << s;
}

}  // namespace

TEST_CASE("ddl model save and load are bit-exact") {
  const fs::path path = scratch_dir() / "model.json";
  const DdlModel m = sample_model();
  io::save_model(m, path.string());
  CHECK(io::model_kind(path.string()) == "ddl");
  const DdlModel back = io::load_ddl_model(path.string());
  CHECK(back.d == m.d);
  CHECK(back.basis == m.basis);
  CHECK(bit_equal(back.B, m.B));
  CHECK(bit_equal(back.Q, m.Q));
  CHECK(bit_equal(back.Qinv, m.Qinv));
  CHECK(bit_equal(back.hull_lower, m.hull_lower));
  CHECK(bit_equal(back.hull_upper, m.hull_upper));
  CHECK(back.dt == m.dt);
  CHECK(back.nu == m.nu);
  CHECK(back.report.final_cost == m.report.final_cost);
  CHECK(back.report.stop_reason == m.report.stop_reason);
  CHECK(back.report.warnings == m.report.warnings);
  CHECK(io::dump_model(back) == io::dump_model(m));

  const auto j = nlohmann::json::parse(io::read_text(path.string()));
  CHECK(j.at("basis").at("exponents").size() == m.basis.size());
  CHECK(j.at("basis").at("exponents")[0] == nlohmann::json::array({2, 0}));
}

TEST_CASE("linear model save and load") {
  const fs::path path = scratch_dir() / "edmd.json";
  LinearModel m;
  m.kind = LinearKind::Edmd;
  m.d = 2;
  m.basis = enumerate_monomials(2, 2, 2);
  m.D = random_matrix(5, 5, 4);
  m.dt = 0.25;
  io::save_model(m, path.string());
  CHECK(io::model_kind(path.string()) == "edmd");
  const LinearModel back = io::load_linear_model(path.string());
  CHECK(back.kind == LinearKind::Edmd);
  CHECK(bit_equal(back.D, m.D));
  REQUIRE(back.basis.has_value());
  CHECK(*back.basis == *m.basis);
  CHECK_THROWS_AS((void)io::load_ddl_model(path.string()), IoError);
}

TEST_CASE("malformed model files") {
  const fs::path dir = scratch_dir();
  write_file(dir / "bad.json", "{not json");
  CHECK_THROWS_AS((void)io::load_ddl_model((dir / "bad.json").string()), IoError);
  write_file(dir / "nokind.json", "{\"d\": 2}");
  CHECK_THROWS_AS((void)io::model_kind((dir / "nokind.json").string()), IoError);
  auto j = nlohmann::json::parse(io::dump_model(sample_model()));
  j["Q"][0].erase(0);
  write_file(dir / "shape.json", j.dump());
  CHECK_THROWS_AS((void)io::load_ddl_model((dir / "shape.json").string()), IoError);
  CHECK_THROWS_AS((void)io::read_text((dir / "missing.json").string()), IoError);
}

TEST_CASE("trajectory csv round trip") {
  const fs::path path = scratch_dir() / "traj.csv";
  const Trajectory tr = make_trajectory(random_matrix(3, 50, 5), 0.1, 2.0);
  io::write_trajectory_csv(tr, path.string());
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,phi_1,phi_2,phi_3");
  double dt = 0.0;
  const Trajectory back = io::read_trajectory_csv(path.string(), dt);
  CHECK(dt == doctest::Approx(0.1));
  CHECK(bit_equal(back.x, tr.x));
  CHECK(back.t(0) == 2.0);
}

TEST_CASE("trajectory csv validation") {
  const fs::path dir = scratch_dir();
  double dt = 0.0;
  write_file(dir / "hdr.csv", "time,x\n0,1\n1,2\n");
  CHECK_THROWS_AS((void)io::read_trajectory_csv((dir / "hdr.csv").string(), dt), IoError);
  write_file(dir / "uneven.csv", "t,phi_1\n0,1\n1,2\n2.5,3\n");
  CHECK_THROWS_AS((void)io::read_trajectory_csv((dir / "uneven.csv").string(), dt), IoError);
  write_file(dir / "text.csv", "t,phi_1\n0,1\n1,abc\n");
  CHECK_THROWS_AS((void)io::read_trajectory_csv((dir / "text.csv").string(), dt), IoError);
  write_file(dir / "cols.csv", "t,phi_1\n0,1\n1,2,3\n");
  CHECK_THROWS_AS((void)io::read_trajectory_csv((dir / "cols.csv").string(), dt), IoError);
  write_file(dir / "short.csv", "t,phi_1\n0,1\n");
  CHECK_THROWS_AS((void)io::read_trajectory_csv((dir / "short.csv").string(), dt), IoError);
}

TEST_CASE("branch csv") {
  const fs::path path = scratch_dir() / "branch.csv";
  FrcBranch b;
  b.method = "ddl";
  b.epsilon = 0.002;
  for (int i = 0; i < 3; ++i) {
    FrcPoint p;
    p.omega = 1.0 + 0.1 * i;
    p.amplitude = 0.01 * (i + 1);
    p.stable = i != 1;
    p.fold = i == 1;
    p.gamma0 = Eigen::Vector2d(0.1 * i, 0.0);
    b.points.push_back(p);
  }
  io::write_branch_csv(b, path.string());
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "omega,amplitude,stable,fold");
  int rows = 0;
  std::string second;
  while (std::getline(in, line)) {
    if (rows == 1) second = line;
    ++rows;
  }
  CHECK(rows == 3);
  CHECK(second.find(",0,1") != std::string::npos);

  const fs::path anchors = scratch_dir() / "branch.json";
  io::write_branch_anchors(b, anchors.string());
  const auto j = nlohmann::json::parse(io::read_text(anchors.string()));
  CHECK(j.at("points").size() == 3);
  CHECK(j.at("epsilon") == 0.002);
}
