#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "ddl/types.hpp"

namespace {

template <class Config>
int guarded(int (*fn)(const Config&), const Config& cfg) {
  try {
    return fn(cfg);
  } catch (const ddl::DivergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ddl::NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  using namespace ddl::cli;
  CLI::App app{"Data-driven linearization: simulate, fit, predict and continue forced responses"};
  app.set_config("--config", "", "TOML run description; command-line flags take precedence");
  app.require_subcommand(1);

  SimulateConfig sim;
  auto* s = app.add_subcommand("simulate", "Integrate or iterate a built-in system and write trajectory CSVs");
  s->add_option("--system", sim.system, "stuart_landau, nonnormal3d, duffing, duffing_phi, chain, nonsmooth")
      ->required();
  s->add_option("--param", sim.params, "System parameter as key=value (repeatable)");
  s->add_option("--x0", sim.x0, "Initial state, comma separated")->delimiter(',');
  s->add_option("--t", sim.t_end, "End time (flows)");
  s->add_option("--dt", sim.dt, "Output step (flows)");
  s->add_option("--steps", sim.steps, "Iterations (maps)");
  s->add_option("--count", sim.count, "Number of random initial conditions when --x0 is absent");
  s->add_option("--r-min", sim.r_min, "Smallest distance of random initial conditions from the fixed point");
  s->add_option("--r-max", sim.r_max, "Largest distance of random initial conditions from the fixed point");
  s->add_option("--seed", sim.seed, "Random seed");
  s->add_option("--observe", sim.observe, "Apply the system's observable (true/false)");
  s->add_option("--out", sim.out, "Output CSV (indexed when several)");

  FitConfig fitc;
  auto* f = app.add_subcommand("fit", "Fit a DMD, EDMD or DDL model to trajectory CSVs");
  f->add_option("--input", fitc.inputs, "Trajectory CSV (repeatable)")->required();
  f->add_option("--method", fitc.method, "dmd, edmd or ddl")->check(CLI::IsMember({"dmd", "edmd", "ddl"}));
  f->add_option("--k", fitc.k, "Polynomial order")->check(CLI::Range(2, 20));
  f->add_option("--nu", fitc.nu, "Weight of the inverse-consistency term")->check(CLI::PositiveNumber);
  f->add_option("--tol", fitc.tol, "Stop when the cost falls below this value")->check(CLI::NonNegativeNumber);
  f->add_option("--max-iter", fitc.max_iter, "Optimizer iteration limit")->check(CLI::PositiveNumber);
  f->add_option("--stride", fitc.stride, "Snapshot stride in samples")->check(CLI::PositiveNumber);
  f->add_flag("--verbose", fitc.verbose, "Print optimizer progress to stderr");
  f->add_option("--out", fitc.out, "Model file");

  PredictConfig pred;
  auto* p = app.add_subcommand("predict", "Propagate a fitted model");
  p->add_option("--model", pred.model, "Model file")->required();
  p->add_option("--x0", pred.x0, "Initial observable value")->delimiter(',');
  p->add_option("--truth", pred.truth, "Reference trajectory CSV; adds an error column");
  p->add_option("--steps", pred.steps, "Number of steps when no truth is given");
  p->add_option("--out", pred.out, "Prediction CSV");

  FrcConfig frc;
  auto* r = app.add_subcommand("frc", "Forced-response branches for one or more forcing amplitudes");
  r->add_option("--model", frc.model, "DDL or DMD model file")->required();
  r->add_option("--epsilon", frc.epsilons, "Forcing amplitudes, comma separated")->delimiter(',');
  r->add_option("--forcing", frc.forcing, "Forcing direction in observable coordinates")->delimiter(',');
  r->add_option("--system", frc.system, "Take the forcing direction from a built-in system (duffing)");
  r->add_option("--omega-min", frc.omega_min, "Lower forcing frequency");
  r->add_option("--omega-max", frc.omega_max, "Upper forcing frequency");
  r->add_option("--points", frc.points, "Frequency samples for linear models");
  r->add_option("--max-step", frc.max_step, "Largest continuation step");
  r->add_option("--out", frc.out, "Output prefix; one CSV per amplitude");

  CompareConfig cmp;
  auto* c = app.add_subcommand("compare", "Held-out error of DMD, EDMD and DDL fitted to the same data");
  c->add_option("--train", cmp.train, "Training CSV (repeatable)")->required();
  c->add_option("--test", cmp.test, "Held-out CSV")->required();
  c->add_option("--k", cmp.k, "Polynomial order for EDMD and DDL")->check(CLI::Range(2, 20));
  c->add_option("--nu", cmp.nu, "DDL inverse-consistency weight")->check(CLI::PositiveNumber);
  c->add_option("--tol", cmp.tol, "DDL cost tolerance")->check(CLI::NonNegativeNumber);
  c->add_option("--max-iter", cmp.max_iter, "DDL iteration limit")->check(CLI::PositiveNumber);
  c->add_option("--out", cmp.out, "JSON report (stdout when absent)");

  SpectrumConfig spc;
  auto* sp = app.add_subcommand("spectrum", "Discrete and continuous-time eigenvalues of a model");
  sp->add_option("--model", spc.model, "Model file")->required();
  sp->add_option("--out", spc.out, "JSON output (stdout when absent)");

  ValidityConfig val;
  auto* v = app.add_subcommand("validity", "Radius where the DDL round trip stays within tolerance");
  v->add_option("--model", val.model, "DDL model file")->required();
  v->add_option("--r-max", val.r_max, "Largest sampled radius")->check(CLI::PositiveNumber);
  v->add_option("--radii", val.radii, "Number of radii")->check(CLI::PositiveNumber);
  v->add_option("--directions", val.directions, "Number of directions")->check(CLI::PositiveNumber);
  v->add_option("--tol", val.tol, "Round-trip tolerance, scaled by 1+|phi|")->check(CLI::PositiveNumber);
  v->add_option("--seed", val.seed, "Seed for directions in d>2");
  v->add_option("--out", val.out, "JSON output (stdout when absent)");

  DiagnoseConfig dia;
  auto* dg = app.add_subcommand("diagnose", "Rank, conditioning and dominant frequencies of trajectory data");
  dg->add_option("--input", dia.inputs, "Trajectory CSV (repeatable)")->required();
  dg->add_option("--d", dia.d, "Target dimension")->check(CLI::PositiveNumber);
  dg->add_option("--rank-tol", dia.rank_tol, "Relative singular-value threshold")->check(CLI::PositiveNumber);
  dg->add_option("--prominence", dia.prominence, "Peak threshold as a fraction of the largest peak")
      ->check(CLI::PositiveNumber);
  dg->add_option("--out", dia.out, "JSON output (stdout when absent)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (s->parsed()) return guarded(cmd_simulate, sim);
  if (f->parsed()) return guarded(cmd_fit, fitc);
  if (p->parsed()) return guarded(cmd_predict, pred);
  if (r->parsed()) return guarded(cmd_frc, frc);
  if (c->parsed()) return guarded(cmd_compare, cmp);
  if (sp->parsed()) return guarded(cmd_spectrum, spc);
  if (v->parsed()) return guarded(cmd_validity, val);
  if (dg->parsed()) return guarded(cmd_diagnose, dia);
  return 2;
}
