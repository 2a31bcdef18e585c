#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ddl/io.hpp"
#include "ddl/reduce.hpp"
#include "ddl/spectral.hpp"
#include "ddl/testbed.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace ddl;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

const fs::path& work_dir() {
  static const fs::path dir = [] {
    const fs::path p = fs::temp_directory_path() / "ddl_test_cli";
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

std::string path_of(const std::string& name) { return (work_dir() / name).string(); }

struct RunResult {
  int code = -1;
  std::string out;
};

RunResult run(const std::string& args) {
  const std::string out_file = path_of("stdout.txt");
  const std::string cmd = std::string("\"") + DDL_CLI_PATH + "\" " + args + " > \"" + out_file + "\" 2> \"" +
                          path_of("stderr.txt") + "\"";
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(out_file);
  std::stringstream ss;
  ss << in.rdbuf();
  r.out = ss.str();
  return r;
}

int count_lines(const std::string& path) {
  std::ifstream in(path);
  int n = 0;
  std::string line;
  while (std::getline(in, line)) ++n;
  return n;
}

// Trajectories of a damped rotation written as CSVs.
std::vector<std::string> write_linear_data(const Matrix& a) {
  std::vector<std::string> paths;
  const Matrix ics = (Matrix(2, 3) << 0.5, -0.3, 0.1, 0.2, 0.4, -0.6).finished();
  for (int c = 0; c < 3; ++c) {
    const Trajectory tr = testbed::iterate(testbed::linear_map(a), ics.col(c), 40);
    const std::string p = path_of("lin_" + std::to_string(c) + ".csv");
    io::write_trajectory_csv(make_trajectory(tr.x, 0.5), p);
    paths.push_back(p);
  }
  return paths;
}

Matrix damped_rotation() {
  const double th = 0.3;
  return 0.97 * (Matrix(2, 2) << std::cos(th), -std::sin(th), std::sin(th), std::cos(th)).finished();
}

}  // namespace

TEST_CASE("simulate writes the expected number of rows") {
  const RunResult r = run("simulate --system duffing --x0 1.3,0 --t 200 --dt 0.01 --out " + path_of("duff.csv"));
  CHECK(r.code == 0);
  CHECK(count_lines(path_of("duff.csv")) == 20002);
}

TEST_CASE("simulate rejects unknown systems and is deterministic") {
  CHECK(run("simulate --system nope --out " + path_of("x.csv")).code == 2);
  CHECK(run("simulate --system duffing --x0 1,2,3 --out " + path_of("x.csv")).code == 2);
  CHECK(run("fit").code == 2);

  const std::string args = "simulate --system nonnormal3d --count 3 --seed 7 --r-min 0.2 --r-max 0.9 --steps 100 --out ";
  REQUIRE(run(args + path_of("a.csv")).code == 0);
  REQUIRE(run(args + path_of("b.csv")).code == 0);
  for (int i = 0; i < 3; ++i) {
    const std::string a = io::read_text(path_of("a_" + std::to_string(i) + ".csv"));
    const std::string b = io::read_text(path_of("b_" + std::to_string(i) + ".csv"));
    CHECK(a == b);
    CHECK(count_lines(path_of("a_" + std::to_string(i) + ".csv")) == 102);
  }
}

TEST_CASE("fit dmd on linear data recovers the generator spectrum") {
  const Matrix a = damped_rotation();
  const auto paths = write_linear_data(a);
  const RunResult r = run("fit --method dmd --input " + paths[0] + " --input " + paths[1] + " --out " + path_of("dmd.json"));
  REQUIRE(r.code == 0);
  const LinearModel m = io::load_linear_model(path_of("dmd.json"));
  const auto got = spectrum(m);
  const auto want = sorted_eigenvalues(a);
  for (std::size_t i = 0; i < want.size(); ++i) CHECK(std::abs(got[i] - want[i]) <= 1e-10);
  CHECK(json::parse(r.out).at("spectrum").size() == 2);
}

TEST_CASE("fit ddl on Stuart-Landau data reports cost dominance") {
  REQUIRE(run("simulate --system stuart_landau --x0 0.25 --t 8 --dt 0.05 --out " + path_of("sl.csv")).code == 0);
  const RunResult r = run("fit --method ddl --k 5 --max-iter 60 --input " + path_of("sl.csv") + " --out " + path_of("sl.json"));
  CHECK((r.code == 0 || r.code == 1));
  const json doc = json::parse(r.out);
  CHECK(doc.at("report").at("final_cost").get<double>() <= doc.at("report").at("initial_cost").get<double>());
  CHECK(io::model_kind(path_of("sl.json")) == "ddl");

  REQUIRE(run("fit --method ddl --k 3 --max-iter 5 --verbose --input " + path_of("sl.csv") + " --out " + path_of("slv.json")).code <= 1);
  CHECK(io::read_text(path_of("stderr.txt")).find("iter ") != std::string::npos);
}

TEST_CASE("malformed csv and missing model give usage errors") {
  io::write_text(path_of("bad.csv"), "time,x\n0,1\n1,2\n");
  CHECK(run("fit --method dmd --input " + path_of("bad.csv") + " --out " + path_of("m.json")).code == 2);
  CHECK(run("predict --model " + path_of("missing.json") + " --x0 0.1,0.1").code == 2);
  CHECK(run("fit --method svm --input " + path_of("bad.csv")).code == 2);
}

TEST_CASE("predict: zero steps and error column") {
  const auto paths = write_linear_data(damped_rotation());
  REQUIRE(run("fit --method ddl --k 3 --input " + paths[0] + " --input " + paths[1] + " --out " + path_of("lin_ddl.json")).code == 0);
  REQUIRE(run("predict --model " + path_of("lin_ddl.json") + " --x0 0.1,-0.2 --steps 0 --out " + path_of("p0.csv")).code == 0);
  double dt = 0.0;
  CHECK(count_lines(path_of("p0.csv")) == 2);
  std::ifstream in(path_of("p0.csv"));
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(header == "t,phi_1,phi_2");
  double t = 0, x = 0, y = 0;
  char comma = 0;
  std::istringstream rs(row);
  rs >> t >> comma >> x >> comma >> y;
  CHECK(std::abs(x - 0.1) <= 1e-8);
  CHECK(std::abs(y + 0.2) <= 1e-8);

  REQUIRE(run("predict --model " + path_of("lin_ddl.json") + " --truth " + paths[2] + " --out " + path_of("p1.csv")).code == 0);
  std::ifstream in2(path_of("p1.csv"));
  std::getline(in2, header);
  CHECK(header == "t,phi_1,phi_2,error");
  CHECK(count_lines(path_of("p1.csv")) == 42);
  (void)dt;
}

TEST_CASE("frc on a linear model: zero forcing gives a zero branch") {
  const auto paths = write_linear_data(damped_rotation());
  REQUIRE(run("fit --method dmd --input " + paths[0] + " --input " + paths[1] + " --out " + path_of("dmd2.json")).code == 0);
  const RunResult r = run("frc --model " + path_of("dmd2.json") + " --epsilon 0,0.01 --forcing 1,0 --omega-min 0.3 --omega-max 0.9 --points 31 --out " +
                          path_of("branch"));
  REQUIRE(r.code == 0);
  const json doc = json::parse(r.out);
  REQUIRE(doc.size() == 2);
  CHECK(doc[0].at("peak_amplitude").get<double>() == 0.0);
  CHECK(doc[1].at("peak_amplitude").get<double>() > 0.0);
  CHECK(doc[1].at("single_valued").get<bool>());
  CHECK(count_lines(doc[1].at("file").get<std::string>()) == 32);
  CHECK(run("frc --model " + path_of("dmd2.json") + " --epsilon 0.01 --out " + path_of("b")).code == 2);
}

TEST_CASE("compare on linear data: all three methods agree") {
  const auto paths = write_linear_data(damped_rotation());
  const RunResult r = run("compare --train " + paths[0] + " --train " + paths[1] + " --test " + paths[2] + " --k 2");
  REQUIRE(r.code == 0);
  const json doc = json::parse(r.out);
  const auto& m = doc.at("methods");
  const double e_dmd = m.at("dmd").at("max_error").get<double>();
  const double e_edmd = m.at("edmd").at("max_error").get<double>();
  const double e_ddl = m.at("ddl").at("max_error").get<double>();
  CHECK(std::abs(e_dmd - e_edmd) <= 1e-6);
  CHECK(std::abs(e_dmd - e_ddl) <= 1e-6);
  for (const char* key : {"dmd", "edmd", "ddl"}) {
    CHECK(m.at(key).contains("max_error"));
    CHECK(m.at(key).contains("rms_error"));
    CHECK(m.at(key).contains("spectrum"));
  }
}

TEST_CASE("spectrum, validity and diagnose emit JSON") {
  const auto paths = write_linear_data(damped_rotation());
  REQUIRE(run("fit --method ddl --k 3 --input " + paths[0] + " --input " + paths[1] + " --out " + path_of("v.json")).code == 0);
  const RunResult s = run("spectrum --model " + path_of("v.json"));
  REQUIRE(s.code == 0);
  const json sj = json::parse(s.out);
  CHECK(sj.at("kind") == "ddl");
  CHECK(sj.at("continuous").size() == 2);

  const RunResult v = run("validity --model " + path_of("v.json") + " --r-max 0.5 --radii 10 --directions 8");
  REQUIRE(v.code == 0);
  CHECK(json::parse(v.out).contains("radius"));

  const RunResult d = run("diagnose --input " + paths[0] + " --d 2 --out " + path_of("diag.json"));
  REQUIRE(d.code == 0);
  const json dj = json::parse(io::read_text(path_of("diag.json")));
  CHECK(dj.at("rank") == 2);
}

TEST_CASE("config file values are overridden by flags") {
  io::write_text(path_of("run.toml"),
                 "[simulate]\nsystem = \"duffing\"\nx0 = [1.3, 0.0]\nt = 10.0\ndt = 0.1\nout = \"" + path_of("cfg.csv") + "\"\n");
  REQUIRE(run("--config " + path_of("run.toml") + " simulate").code == 0);
  CHECK(count_lines(path_of("cfg.csv")) == 102);
  REQUIRE(run("--config " + path_of("run.toml") + " simulate --dt 0.5").code == 0);
  CHECK(count_lines(path_of("cfg.csv")) == 22);
}
