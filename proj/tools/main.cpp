#include <cstdio>
#include <exception>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "pminres/runner.hpp"

using namespace pminres;

int main(int argc, char** argv) {
  CLI::App app{"minimal-residual convection-diffusion runner"};

  RunConfig cfg;
  std::string zeta_arg;

  std::map<std::string, ExperimentId> experiments{{"exp1", ExperimentId::exp1},
                                                  {"exp2", ExperimentId::exp2},
                                                  {"eriksson", ExperimentId::eriksson}};
  std::map<std::string, Method> methods{{"wp", Method::wp},
                                        {"galerkin", Method::galerkin},
                                        {"minres_l2", Method::minres_l2}};
  std::map<std::string, RefineMode> modes{{"uniform", RefineMode::uniform},
                                          {"adaptive", RefineMode::adaptive}};

  app.add_option("--experiment", cfg.experiment, "test problem")
      ->transform(CLI::CheckedTransformer(experiments, CLI::ignore_case));
  auto* eps_opt = app.add_option("--eps", cfg.eps, "diffusion (eriksson only)");
  app.add_option("--method", cfg.method, "solver")
      ->transform(CLI::CheckedTransformer(methods, CLI::ignore_case));
  app.add_option("--p", cfg.p, "residual exponent (>= 2)");
  app.add_option("--zeta", zeta_arg, "clamping interval lo:hi");
  app.add_option("--refine", cfg.refine, "refinement mode")
      ->transform(CLI::CheckedTransformer(modes, CLI::ignore_case));
  app.add_option("--theta", cfg.theta, "bulk marking fraction");
  app.add_option("--w", cfg.w, "refinement weight of the controller");
  app.add_option("--max-dofs", cfg.max_dofs, "stop once the trial space reaches this size");
  app.add_option("--inner-iters", cfg.inner, "fixed-point sweeps per mesh visit");
  app.add_flag("--staged-eps", cfg.staged, "lower the diffusion with the mesh size");
  app.add_option("--mesh-n", cfg.mesh_n, "initial mesh cells per direction");
  app.add_option("--out", cfg.out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  cfg.eps_set = eps_opt->count() > 0;
  if (!zeta_arg.empty()) {
    const auto colon = zeta_arg.find(':');
    try {
      if (colon == std::string::npos) throw std::invalid_argument("no colon");
      cfg.zeta0.lo = std::stod(zeta_arg.substr(0, colon));
      cfg.zeta0.hi = std::stod(zeta_arg.substr(colon + 1));
    } catch (const std::exception&) {
      std::fprintf(stderr, "error: --zeta expects lo:hi, got '%s'\n", zeta_arg.c_str());
      return 1;
    }
  }

  try {
    return run_pipeline(cfg);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
