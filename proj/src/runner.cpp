#include "pminres/runner.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace pminres {

namespace {

const char* experiment_name(ExperimentId id) {
  switch (id) {
    case ExperimentId::exp1: return "exp1";
    case ExperimentId::exp2: return "exp2";
    case ExperimentId::eriksson: return "eriksson";
  }
  throw std::logic_error("unknown experiment");
}

struct File {
  std::FILE* f = nullptr;
  explicit File(const std::filesystem::path& p) : f(std::fopen(p.string().c_str(), "wb")) {
    if (!f) throw std::runtime_error("cannot open " + p.string());
  }
  ~File() {
    if (f) std::fclose(f);
  }
  File(const File&) = delete;
  File& operator=(const File&) = delete;
};

void put(std::FILE* f, const char* s) { std::fputs(s, f); }
void num(std::FILE* f, double v) { std::fprintf(f, "%.12e", v); }

void validate(const RunConfig& cfg) {
  if ((cfg.eps_set || cfg.staged) && cfg.experiment != ExperimentId::eriksson)
    throw std::invalid_argument("--eps and --staged-eps apply to eriksson only");
  if (cfg.eps_set && cfg.staged)
    throw std::invalid_argument("--staged-eps supplies its own diffusion; drop --eps");
  if (cfg.eps_set && !(cfg.eps > 0.0)) throw std::invalid_argument("eps must be positive");
  if (!(cfg.p >= 2.0)) throw std::invalid_argument("p must be at least 2");
  if (!(cfg.theta > 0.0) || cfg.theta > 1.0) throw std::invalid_argument("theta in (0,1]");
  if (!(cfg.w > 0.0)) throw std::invalid_argument("w must be positive");
  if (!(cfg.zeta0.lo > 0.0) || !(cfg.zeta0.hi >= cfg.zeta0.lo) || !std::isfinite(cfg.zeta0.hi))
    throw std::invalid_argument("zeta must satisfy 0 < lo <= hi < inf");
  if (cfg.max_dofs < 1 || cfg.max_total_iters < 1 || cfg.inner < 1)
    throw std::invalid_argument("budgets must be positive");
  if (cfg.mesh_n < 0) throw std::invalid_argument("mesh-n must be positive");
}

Mesh initial_mesh(const RunConfig& cfg) {
  const bool one_d = cfg.experiment == ExperimentId::exp1;
  int n = cfg.mesh_n > 0 ? cfg.mesh_n : (one_d ? 32 : 16);
  return one_d ? generate_unit_interval(n) : generate_unit_square(n);
}

void write_manifest(const RunConfig& cfg, const std::filesystem::path& dir) {
  nlohmann::json j;
  j["experiment"] = experiment_name(cfg.experiment);
  j["method"] = method_name(cfg.method);
  j["eps"] = cfg.eps;
  j["eps_set"] = cfg.eps_set;
  j["p"] = cfg.p;
  j["zeta_lo"] = cfg.zeta0.lo;
  j["zeta_hi"] = cfg.zeta0.hi;
  j["refine"] = cfg.refine == RefineMode::uniform ? "uniform" : "adaptive";
  j["theta"] = cfg.theta;
  j["w"] = cfg.w;
  j["max_dofs"] = cfg.max_dofs;
  j["max_total_iters"] = cfg.max_total_iters;
  j["inner_iters"] = cfg.inner;
  j["staged_eps"] = cfg.staged;
  j["mesh_n"] = cfg.mesh_n;
  j["out"] = cfg.out_dir;
  j["seed"] = cfg.seed;
  File out(dir / "meta.json");
  put(out.f, j.dump(2).c_str());
  put(out.f, "\n");
}

void write_profiles(const FeFunction& u, int dim, const std::filesystem::path& dir) {
  const int samples = 401;
  {
    File fx(dir / "profile_x.csv");
    put(fx.f, "x,u\n");
    for (const auto& s : line_profile(u, 'x', 0.5, samples)) {
      num(fx.f, s[0]);
      put(fx.f, ",");
      num(fx.f, s[1]);
      put(fx.f, "\n");
    }
  }
  if (dim == 2) {
    File fy(dir / "profile_y.csv");
    put(fy.f, "y,u\n");
    for (const auto& s : line_profile(u, 'y', 0.75, samples)) {
      num(fy.f, s[0]);
      put(fy.f, ",");
      num(fy.f, s[1]);
      put(fy.f, "\n");
    }
  }
}

constexpr const char* kIterationsHeader =
    "n,J_zeta,eta_zp2,eta_zm2,eta_kac2,eta_h_pprime,residual_estimate\n";

// Fixed-mesh sweep log on the initial mesh; the indicator columns need the
// previous iterate, so the first row carries nan there.
void write_iterations(const ProblemSpec& prob, const Mesh& mesh, const RunConfig& cfg,
                      const std::filesystem::path& dir) {
  File out(dir / "iterations.csv");
  put(out.f, kIterationsHeader);
  KacanovState st = make_state(prob, mesh, cfg.p, cfg.zeta0);
  const int cap = 200;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (int n = 1; n <= cap; ++n) {
    kacanov_step(st);
    const auto& h = st.energy_history;
    double zp = nan, zm = nan, kc = nan, eh = nan;
    if (n >= 2) {
      Indicators ind = compute_indicators(st, h[n - 2], h[n - 1]);
      zp = ind.eta_zeta_plus_sq;
      zm = ind.eta_zeta_minus_sq;
      kc = ind.eta_kac_sq;
      eh = ind.eta_h_pprime_total;
    }
    std::fprintf(out.f, "%d,", n);
    num(out.f, h[n - 1]);
    for (double v : {zp, zm, kc, eh}) {
      put(out.f, ",");
      num(out.f, v);
    }
    put(out.f, ",");
    num(out.f, residual_estimate(st));
    put(out.f, "\n");
    if (n >= 2 && h[n - 2] - h[n - 1] <= 1e-12 * std::max(1.0, std::abs(h[n - 1]))) break;
  }
}

constexpr const char* kHistoryHeader =
    "step,action,ndof,zeta_lo,zeta_hi,J_zeta,eta_zp2,eta_zm2,eta_kac2,"
    "eta_h_pprime,residual,l2_error,epsilon\n";

int run_wp(const RunConfig& cfg, const std::filesystem::path& dir) {
  ProblemSpec prob = cfg.experiment == ExperimentId::eriksson
                         ? make_problem(cfg.experiment, cfg.eps)
                         : make_problem(cfg.experiment);
  Mesh mesh0 = initial_mesh(cfg);

  AdaptConfig acfg;
  acfg.p = cfg.p;
  acfg.w = cfg.w;
  acfg.theta = cfg.theta;
  acfg.zeta0 = cfg.zeta0;
  acfg.max_dofs = cfg.max_dofs;
  acfg.max_total_iters = cfg.max_total_iters;
  acfg.inner = cfg.inner;
  acfg.mode = cfg.refine;
  if (cfg.staged) {
    ExperimentId id = cfg.experiment;
    acfg.staged_problem = [id](double e) { return make_problem(id, e); };
    // the sweep log below uses the stage the initial mesh belongs to
    FeSpace u0 = build_space(mesh0, 1, prob.dirichlet);
    prob = make_problem(id, staged_epsilon(static_cast<int>(u0.free_dofs.size())));
  }

  write_iterations(prob, mesh0, cfg, dir);

  AdaptiveRun run = run_adaptive(prob, mesh0, acfg);
  {
    File out(dir / "history.csv");
    put(out.f, kHistoryHeader);
    for (const LoopRecord& r : run.records) {
      std::fprintf(out.f, "%d,%s,%d", r.step, action_name(r.action), r.ndof);
      for (double v : {r.zeta_lo, r.zeta_hi, r.J_zeta, r.eta_zp2, r.eta_zm2, r.eta_kac2,
                       r.eta_h_pprime, r.residual, r.l2_error, r.epsilon}) {
        put(out.f, ",");
        num(out.f, v);
      }
      put(out.f, "\n");
    }
  }
  write_profiles(run.state->u, mesh0.dim, dir);
  return kRunOk;
}

constexpr const char* kBaselineHistoryHeader =
    "step,action,ndof,residual,l2_error,epsilon,status\n";

int run_baseline(const RunConfig& cfg, const std::filesystem::path& dir) {
  {
    File out(dir / "iterations.csv");  // baselines have no inner iteration
    put(out.f, kIterationsHeader);
  }

  ProblemSpec prob = cfg.experiment == ExperimentId::eriksson
                         ? make_problem(cfg.experiment, cfg.eps)
                         : make_problem(cfg.experiment);
  std::vector<std::unique_ptr<Mesh>> meshes;
  meshes.push_back(std::make_unique<Mesh>(initial_mesh(cfg)));
  const int dim = meshes.back()->dim;

  File out(dir / "history.csv");
  put(out.f, kBaselineHistoryHeader);

  FeFunction last_u;
  bool have_u = false;
  std::vector<std::unique_ptr<FeSpace>> spaces;
  int status = kRunOk;

  for (int step = 0;; ++step) {
    spaces.push_back(
        std::make_unique<FeSpace>(build_space(*meshes.back(), 1, prob.dirichlet)));
    FeSpace& U = *spaces.back();
    int ndof = static_cast<int>(U.free_dofs.size());
    if (cfg.staged) prob = make_problem(cfg.experiment, staged_epsilon(ndof));

    BaselineResult r;
    if (cfg.method == Method::galerkin) {
      r = galerkin_solve(prob, U);
    } else {
      spaces.push_back(
          std::make_unique<FeSpace>(build_space(*meshes.back(), 2, prob.dirichlet)));
      r = minres_l2_solve(prob, U, *spaces.back());
    }
    const bool failed = r.status == SolveStatus::solver_failure;
    double resid = std::numeric_limits<double>::quiet_NaN();
    double l2 = std::numeric_limits<double>::quiet_NaN();
    if (!failed) {
      resid = std::sqrt(std::accumulate(r.indicators.begin(), r.indicators.end(), 0.0));
      if (prob.exact) l2 = l2_error(r.u, prob.exact);
      last_u = r.u;
      last_u.space = &U;
      have_u = true;
    }
    const bool stop = failed || ndof >= cfg.max_dofs || step + 1 >= cfg.max_total_iters;
    std::fprintf(out.f, "%d,%s,%d,", step, stop ? "stop" : "refine", ndof);
    num(out.f, resid);
    put(out.f, ",");
    num(out.f, l2);
    put(out.f, ",");
    num(out.f, prob.epsilon);
    std::fprintf(out.f, ",%s\n", failed ? "solver_failure" : "ok");
    if (failed) status = kRunBaselineSolverFailure;
    if (stop) break;

    Mesh finer = cfg.refine == RefineMode::uniform
                     ? refine_uniform_level(*meshes.back())
                     : refine(*meshes.back(), dorfler_mark(r.indicators, cfg.theta));
    meshes.push_back(std::make_unique<Mesh>(std::move(finer)));
  }

  if (have_u) write_profiles(last_u, dim, dir);
  return status;
}

}  // namespace

const char* method_name(Method m) {
  switch (m) {
    case Method::wp: return "wp";
    case Method::galerkin: return "galerkin";
    case Method::minres_l2: return "minres_l2";
  }
  throw std::logic_error("unknown method");
}

int run_pipeline(const RunConfig& cfg) {
  validate(cfg);
  std::filesystem::path dir(cfg.out_dir);
  std::filesystem::create_directories(dir);
  write_manifest(cfg, dir);
  return cfg.method == Method::wp ? run_wp(cfg, dir) : run_baseline(cfg, dir);
}

}  // namespace pminres
