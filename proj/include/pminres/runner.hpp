#pragma once

#include <string>

#include "pminres/adaptivity.hpp"
#include "pminres/problems.hpp"

namespace pminres {

enum class Method { wp, galerkin, minres_l2 };
const char* method_name(Method m);

// A complete experiment run as driven from the command line. mesh_n = 0
// picks the per-experiment default (32 in 1d, 16 in 2d).
struct RunConfig {
  ExperimentId experiment = ExperimentId::exp1;
  Method method = Method::wp;
  double eps = 1e-3;  // eriksson only
  bool eps_set = false;
  double p = 100.0;
  RelaxationInterval zeta0{1e-2, 1e2};
  RefineMode refine = RefineMode::adaptive;
  double theta = 0.5;
  double w = 1.0;
  int max_dofs = 1000;
  int max_total_iters = 5000;
  int inner = 1;
  bool staged = false;
  int mesh_n = 0;
  std::string out_dir = "out";
  unsigned seed = 0;  // reserved; nothing draws random numbers yet
};

// Exit status of a pipeline run. Baseline solver breakdowns are an expected
// outcome (the history row records them), not an error.
constexpr int kRunOk = 0;
constexpr int kRunBaselineSolverFailure = 2;

// Runs the configured experiment and writes history.csv, iterations.csv,
// profile_x.csv (plus profile_y.csv in 2d), and meta.json into out_dir.
// Throws std::invalid_argument on inconsistent configs.
int run_pipeline(const RunConfig& cfg);

}  // namespace pminres
