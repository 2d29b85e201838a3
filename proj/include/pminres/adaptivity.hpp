#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <vector>

#include "pminres/kacanov.hpp"

namespace pminres {

enum class Action { refine, widen_up, widen_down, iterate };
const char* action_name(Action a);

// uniform advances one whole level (h -> h/2) per refine action instead of
// marking by indicator.
enum class RefineMode { adaptive, uniform };

// Controller knobs. fixed_zeta locks the relaxation interval and turns every
// controller decision into a refinement (the cheap fixed-interval strategy).
// staged_problem, when set, rebuilds the problem coefficients whenever the
// scheduled diffusion for the current dof count changes.
struct AdaptConfig {
  double p = 100.0;
  double w = 1.0;        // weight in the refine-vs-widen test
  double theta = 0.5;    // Dörfler bulk parameter
  RelaxationInterval zeta0;
  double zeta_factor = 10.0;
  int max_dofs = 10000;  // free trial dofs; loop stops once reached
  int max_total_iters = 10000;
  int inner = 1;         // Kačanov steps per loop visit
  RefineMode mode = RefineMode::adaptive;
  std::optional<RelaxationInterval> fixed_zeta;
  std::function<ProblemSpec(double)> staged_problem;
};

// One controller visit: the state of the iteration at decision time and the
// action that was taken.
struct LoopRecord {
  int step = 0;
  Action action = Action::iterate;
  int ndof = 0;
  double zeta_lo = 0.0;
  double zeta_hi = 0.0;
  double J_zeta = 0.0;
  double eta_zp2 = 0.0;
  double eta_zm2 = 0.0;
  double eta_kac2 = 0.0;
  double eta_h_pprime = 0.0;
  double residual = 0.0;
  double l2_error = std::numeric_limits<double>::quiet_NaN();
  double epsilon = 0.0;
};

// refine if the interval/lag indicators are dominated by w times the
// refinement indicator; otherwise widen the side whose indicator dominates;
// otherwise keep iterating. Ties between the widening branches go up.
Action decide(const Indicators& ind, const AdaptConfig& cfg);

// Carry σ to a once-refined mesh: the current iterate is evaluated exactly on
// the parent elements and rescaled by the parent's mean clamped weight.
SigmaField transfer_sigma(const KacanovState& state, const Mesh& new_mesh);

// One uniform level h -> h/2: a single sweep in 1d, two all-element sweeps in
// 2d (consecutive bisection states alternate in quality, so records compare
// like with like only level to level). Parent links lead back to the input.
Mesh refine_uniform_level(const Mesh& mesh);

struct AdaptiveRun {
  std::vector<LoopRecord> records;
  std::vector<std::unique_ptr<Mesh>> meshes;  // refinement history, coarsest first
  std::unique_ptr<ProblemSpec> problem;       // final coefficients (staged runs lower ε)
  std::unique_ptr<KacanovState> state;        // final iterate; lives on meshes.back()
};

AdaptiveRun run_adaptive(const ProblemSpec& prob, const Mesh& mesh0, const AdaptConfig& cfg);

}  // namespace pminres
