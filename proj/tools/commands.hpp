#pragma once

#include <map>
#include <string>
#include <vector>

namespace ddl::cli {

struct SimulateConfig {
  std::string system;
  std::vector<std::string> params;  // key=value
  std::vector<double> x0;
  double t_end = 100.0;
  double dt = 0.01;
  int steps = 100;  // maps
  int count = 1;
  double r_min = 0.1;
  double r_max = 0.5;
  unsigned long long seed = 0;
  bool observe = true;
  std::string out = "trajectory.csv";
};

struct FitConfig {
  std::vector<std::string> inputs;
  std::string method = "ddl";
  int k = 3;
  double nu = 1.0;
  double tol = 0.0;
  int max_iter = 500;
  int stride = 1;
  bool verbose = false;
  std::string out = "model.json";
};

struct PredictConfig {
  std::string model;
  std::vector<double> x0;
  std::string truth;
  int steps = 100;
  std::string out = "prediction.csv";
};

struct FrcConfig {
  std::string model;
  std::vector<double> epsilons{0.001};
  std::vector<double> forcing;
  double omega_min = 0.5;
  double omega_max = 1.5;
  int points = 201;
  double max_step = 0.02;
  std::string system;  // when set, forcing is taken from the system's phi-coordinates
  std::string out = "frc";
};

struct CompareConfig {
  std::vector<std::string> train;
  std::string test;
  int k = 3;
  double nu = 1.0;
  double tol = 0.0;
  int max_iter = 500;
  std::string out;
};

struct SpectrumConfig {
  std::string model;
  std::string out;
};

struct ValidityConfig {
  std::string model;
  double r_max = 1.0;
  int radii = 100;
  int directions = 32;
  double tol = 1e-4;
  unsigned long long seed = 0;
  std::string out;
};

struct DiagnoseConfig {
  std::vector<std::string> inputs;
  int d = 2;
  double rank_tol = 1e-8;
  double prominence = 0.1;
  std::string out;
};

int cmd_simulate(const SimulateConfig& cfg);
int cmd_fit(const FitConfig& cfg);
int cmd_predict(const PredictConfig& cfg);
int cmd_frc(const FrcConfig& cfg);
int cmd_compare(const CompareConfig& cfg);
int cmd_spectrum(const SpectrumConfig& cfg);
int cmd_validity(const ValidityConfig& cfg);
int cmd_diagnose(const DiagnoseConfig& cfg);

}  // namespace ddl::cli
