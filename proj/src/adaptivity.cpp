#include "pminres/adaptivity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "pminres/problems.hpp"

namespace pminres {

const char* action_name(Action a) {
  switch (a) {
    case Action::refine: return "refine";
    case Action::widen_up: return "widen_up";
    case Action::widen_down: return "widen_down";
    case Action::iterate: return "iterate";
  }
  throw std::logic_error("unknown action");
}

Action decide(const Indicators& ind, const AdaptConfig& cfg) {
  const double zp = ind.eta_zeta_plus_sq;
  const double zm = ind.eta_zeta_minus_sq;
  const double kc = ind.eta_kac_sq;
  const double eh = ind.eta_h_pprime_total;
  for (double v : {zp, zm, kc, eh})
    if (!std::isfinite(v)) throw std::invalid_argument("indicators must be finite");
  if (zp + zm + kc <= cfg.w * eh) return Action::refine;
  if (std::max(zm, kc) <= zp) return Action::widen_up;
  if (std::max(zp, kc) <= zm) return Action::widen_down;
  return Action::iterate;
}

SigmaField transfer_sigma(const KacanovState& state, const Mesh& new_mesh) {
  const Mesh& old_mesh = *state.mesh;
  if (new_mesh.parent.size() != static_cast<size_t>(new_mesh.n_elements()))
    throw std::invalid_argument("refined mesh carries no parent links");

  const QuadRule& rule = state.sigma.quad;
  const int nq = rule.size();
  double wsum = 0.0;
  for (int q = 0; q < nq; ++q) wsum += rule.weights[q];

  // mean clamped weight per coarse element; the rescaling is first order
  // only, the next sweep rebuilds the weight from the transferred flux
  WeightField w = weight_from_sigma(state.sigma, state.zeta, state.pprime);
  std::vector<double> meanw(old_mesh.n_elements(), 0.0);
  for (int e = 0; e < old_mesh.n_elements(); ++e) {
    double acc = 0.0;
    for (int q = 0; q < nq; ++q) acc += rule.weights[q] * w.at(e, q);
    meanw[e] = acc / wsum;
  }

  SigmaField out = initial_sigma(new_mesh, rule);
  for (int e = 0; e < new_mesh.n_elements(); ++e) {
    int pe = new_mesh.parent[e].parent;
    if (pe < 0 || pe >= old_mesh.n_elements())
      throw std::invalid_argument("parent link points outside the coarse mesh");
    for (int q = 0; q < nq; ++q) {
      std::array<double, 2> x = map_to_physical(new_mesh, e, rule.cart(q));
      std::array<double, 2> ref = map_to_reference(old_mesh, pe, x);
      EvalResult er = eval(state.psi, pe, ref);
      out.at(e, q) = {meanw[pe] * er.grad[0], meanw[pe] * er.grad[1]};
    }
  }
  return out;
}

namespace {

int free_trial_dofs(const KacanovState& st) {
  return static_cast<int>(st.U().free_dofs.size());
}

}  // namespace

Mesh refine_uniform_level(const Mesh& mesh) {
  std::vector<int> all(mesh.n_elements());
  std::iota(all.begin(), all.end(), 0);
  Mesh mid = refine(mesh, all);
  if (mesh.dim == 1) return mid;
  std::vector<int> all2(mid.n_elements());
  std::iota(all2.begin(), all2.end(), 0);
  Mesh fine = refine(mid, all2);
  std::vector<int> next_slot(mesh.n_elements(), 0);
  for (ElementParent& pl : fine.parent) {
    int root = mid.parent[pl.parent].parent;
    pl = {root, next_slot[root]++};
  }
  return fine;
}

AdaptiveRun run_adaptive(const ProblemSpec& prob, const Mesh& mesh0, const AdaptConfig& cfg) {
  if (!(cfg.w > 0.0)) throw std::invalid_argument("controller weight must be positive");
  if (!(cfg.theta > 0.0) || cfg.theta > 1.0)
    throw std::invalid_argument("theta must lie in (0,1]");
  if (!(cfg.zeta_factor > 1.0)) throw std::invalid_argument("zeta_factor must exceed 1");
  if (cfg.inner < 1) throw std::invalid_argument("need at least one sweep per visit");
  if (cfg.max_dofs < 1 || cfg.max_total_iters < 1) throw std::invalid_argument("empty budget");

  AdaptiveRun run;
  run.meshes.push_back(std::make_unique<Mesh>(mesh0));
  run.problem = std::make_unique<ProblemSpec>(prob);
  RelaxationInterval zeta = cfg.fixed_zeta ? *cfg.fixed_zeta : cfg.zeta0;
  run.state = std::make_unique<KacanovState>(
      make_state(*run.problem, *run.meshes.back(), cfg.p, zeta));

  // staged runs follow the diffusion schedule from the start
  auto apply_stage = [&](const SigmaField* seed) {
    double e = staged_epsilon(free_trial_dofs(*run.state));
    if (e == run.problem->epsilon) return;
    auto next = std::make_unique<ProblemSpec>(cfg.staged_problem(e));
    auto nstate = std::make_unique<KacanovState>(
        make_state(*next, *run.meshes.back(), cfg.p, zeta, seed));
    run.state = std::move(nstate);
    run.problem = std::move(next);
  };
  if (cfg.staged_problem) apply_stage(nullptr);

  int total_steps = 0;
  auto visit = [&](KacanovState& st) {
    int done = 0;
    while (done < cfg.inner || st.energy_history.size() < 2) {
      kacanov_step(st);
      ++done;
    }
    total_steps += done;
  };

  auto record = [&](Action act, const Indicators& ind, double j) {
    LoopRecord rec;
    rec.step = static_cast<int>(run.records.size());
    rec.action = act;
    rec.ndof = free_trial_dofs(*run.state);
    rec.zeta_lo = zeta.lo;
    rec.zeta_hi = zeta.hi;
    rec.J_zeta = j;
    rec.eta_zp2 = ind.eta_zeta_plus_sq;
    rec.eta_zm2 = ind.eta_zeta_minus_sq;
    rec.eta_kac2 = ind.eta_kac_sq;
    rec.eta_h_pprime = ind.eta_h_pprime_total;
    rec.residual = residual_estimate(*run.state);
    if (run.problem->exact) rec.l2_error = l2_error(run.state->u, run.problem->exact);
    rec.epsilon = run.problem->epsilon;
    run.records.push_back(rec);
  };

  for (;;) {
    visit(*run.state);
    const auto& h = run.state->energy_history;
    Indicators ind = compute_indicators(*run.state, h[h.size() - 2], h.back());
    Action act = cfg.fixed_zeta ? Action::refine : decide(ind, cfg);
    record(act, ind, h.back());
    if (total_steps >= cfg.max_total_iters) break;

    if (act == Action::refine) {
      std::unique_ptr<Mesh> finer;
      if (cfg.mode == RefineMode::uniform) {
        finer = std::make_unique<Mesh>(refine_uniform_level(*run.meshes.back()));
      } else {
        std::vector<int> marked = dorfler_mark(ind.eta_h_per_element, cfg.theta);
        finer = std::make_unique<Mesh>(refine(*run.meshes.back(), marked));
      }
      SigmaField seed = transfer_sigma(*run.state, *finer);
      run.meshes.push_back(std::move(finer));
      run.state = std::make_unique<KacanovState>(
          make_state(*run.problem, *run.meshes.back(), cfg.p, zeta, &seed));
    } else if (act == Action::widen_up) {
      zeta.hi *= cfg.zeta_factor;
      set_zeta(*run.state, zeta);
    } else if (act == Action::widen_down) {
      zeta.lo /= cfg.zeta_factor;
      set_zeta(*run.state, zeta);
    }  // iterate: the next visit supplies the sweep

    if (free_trial_dofs(*run.state) >= cfg.max_dofs) {
      // dof budget spent: solve once on the terminal mesh, record, stop.
      // The stop wins over the diffusion schedule, so a staged run ends in
      // the stage its budget belongs to.
      visit(*run.state);
      const auto& hh = run.state->energy_history;
      Indicators last = compute_indicators(*run.state, hh[hh.size() - 2], hh.back());
      record(cfg.fixed_zeta ? Action::refine : decide(last, cfg), last, hh.back());
      break;
    }
    if (cfg.staged_problem) apply_stage(&run.state->sigma);
  }
  return run;
}

}  // namespace pminres
