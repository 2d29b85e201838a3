#include "pminres/kacanov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "pminres/linsolve.hpp"
#include "pminres/quadrature.hpp"

namespace pminres {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_interval(const RelaxationInterval& zeta) {
  if (!(zeta.lo > 0.0) || !(zeta.hi >= zeta.lo) || !std::isfinite(zeta.hi))
    throw std::invalid_argument("relaxation interval must satisfy 0 < lo <= hi < inf");
}
}  // namespace

double clamp_to(double t, const RelaxationInterval& zeta) {
  return std::max(zeta.lo, std::min(t, zeta.hi));
}

WeightField weight_from_sigma(const SigmaField& sigma, const RelaxationInterval& zeta,
                              double pprime) {
  WeightField w;
  w.mesh = sigma.mesh;
  w.quad = sigma.quad;
  w.values.resize(sigma.samples.size());
  for (size_t i = 0; i < sigma.samples.size(); ++i) {
    const auto& s = sigma.samples[i];
    w.values[i] = std::pow(clamp_to(std::hypot(s[0], s[1]), zeta), 2.0 - pprime);
  }
  return w;
}

SigmaField initial_sigma(const Mesh& mesh, const QuadRule& quad) {
  SigmaField s;
  s.mesh = &mesh;
  s.quad = quad;
  s.samples.assign(static_cast<size_t>(mesh.n_elements()) * quad.size(), {0.0, 0.0});
  return s;
}

std::shared_ptr<Spaces> make_spaces(const ProblemSpec& prob, const Mesh& mesh) {
  auto sp = std::make_shared<Spaces>();
  sp->U = build_space(mesh, 1, prob.dirichlet);
  std::vector<DirichletBC> homog;
  homog.reserve(prob.dirichlet.size());
  for (const auto& bc : prob.dirichlet)
    homog.push_back({bc.part, [](double, double) { return 0.0; }});
  sp->V = build_space(mesh, 2, homog);
  return sp;
}

KacanovState make_state(const ProblemSpec& prob, const Mesh& mesh, double p,
                        const RelaxationInterval& zeta, const SigmaField* seed) {
  if (p < 2.0) throw std::invalid_argument("p must be at least 2");
  check_interval(zeta);
  if (prob.dim != mesh.dim) throw std::invalid_argument("problem dimension mismatch");

  KacanovState st;
  st.prob = &prob;
  st.mesh = &mesh;
  st.spaces = make_spaces(prob, mesh);
  st.p = p;
  st.pprime = p / (p - 1.0);
  st.zeta = zeta;
  if (seed) {
    if (seed->mesh != &mesh ||
        seed->samples.size() !=
            static_cast<size_t>(mesh.n_elements()) * static_cast<size_t>(default_quad(mesh.dim).size()))
      throw std::invalid_argument("seed sample layout does not match the mesh");
    st.sigma = *seed;
  } else {
    st.sigma = initial_sigma(mesh, default_quad(mesh.dim));
  }
  st.sigma_prev = st.sigma;
  st.lift = lift_function(st.U());
  st.psi = FeFunction{&st.spaces->V, std::vector<double>(st.V().n_dofs(), 0.0)};
  st.u = FeFunction{&st.spaces->U, std::vector<double>(st.U().n_dofs(), 0.0)};
  st.B_red = reduce_matrix(assemble_b(st.U(), st.V(), prob), st.V(), st.U());
  st.load_red = reduce_vector(assemble_load(st.V(), prob, &st.lift), st.V());
  return st;
}

void kacanov_step(KacanovState& st) {
  const Mesh& mesh = *st.mesh;
  const WeightField w = weight_from_sigma(st.sigma, st.zeta, st.pprime);
  SparseMatrix A_red =
      reduce_matrix(assemble_weighted_stiffness(st.V(), w), st.V(), st.V());
  SaddleSolution sol = solve_saddle({std::move(A_red), st.B_red, st.load_red});
  st.psi.coeffs = expand_free(sol.psi, st.V(), false);
  st.u.coeffs = expand_free(sol.u, st.U(), true);

  // sigma_{n+1}(x_q) = w(x_q) grad psi(x_q) on the shared rule
  st.sigma_prev = st.sigma;
  const QuadRule& rule = st.sigma.quad;
  const ShapeTable tab = tabulate(mesh.dim, st.V().degree, rule);
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const ElemGeom g = element_geometry(mesh, e);
    const auto& dofs = st.V().element_dofs[e];
    for (int q = 0; q < rule.size(); ++q) {
      std::array<double, 2> grad{0.0, 0.0};
      for (int i = 0; i < tab.ndofs; ++i) {
        const auto& dr = tab.dref[static_cast<size_t>(q) * tab.ndofs + i];
        const double c = st.psi.coeffs[dofs[i]];
        for (int d = 0; d < mesh.dim; ++d)
          for (int k = 0; k < mesh.dim; ++k) grad[d] += c * g.invJT[d][k] * dr[k];
      }
      st.sigma.at(e, q) = {w.at(e, q) * grad[0], w.at(e, q) * grad[1]};
    }
  }
  st.energy_history.push_back(
      energy_interval(st.sigma, st.zeta.lo, st.zeta.hi, st.pprime));
  ++st.iter;
}

void set_zeta(KacanovState& st, const RelaxationInterval& zeta) {
  check_interval(zeta);
  st.zeta = zeta;
  st.energy_history.clear();
  if (st.iter > 0)
    st.energy_history.push_back(
        energy_interval(st.sigma, zeta.lo, zeta.hi, st.pprime));
}

Indicators compute_indicators(const KacanovState& st, double j_prev, double j_curr) {
  const double pp = st.pprime;
  const double scale = std::max({1.0, std::abs(j_prev), std::abs(j_curr)});
  const double slack = 1e-12 * scale;

  auto checked = [&](double v, const char* what) {
    if (v < -slack)
      throw std::logic_error(std::string("negative error indicator: ") + what);
    return std::max(v, 0.0);
  };

  Indicators ind;
  ind.eta_zeta_plus_sq = checked(
      j_prev - energy_interval(st.sigma_prev, st.zeta.lo, kInf, pp), "upper clamp");
  ind.eta_zeta_minus_sq = checked(
      j_prev - energy_interval(st.sigma_prev, 0.0, st.zeta.hi, pp), "lower clamp");
  ind.eta_kac_sq = std::pow(st.zeta.hi / st.zeta.lo, 2.0 - pp) *
                   checked(j_prev - j_curr, "energy decrement");
  ind.eta_h_per_element = element_pprime_norms(st.sigma_prev, pp);
  double total = 0.0;
  for (double v : ind.eta_h_per_element) total += v;
  ind.eta_h_pprime_total = total;
  return ind;
}

double residual_estimate(const KacanovState& st) {
  auto norms = element_pprime_norms(st.sigma, st.pprime);
  double total = 0.0;
  for (double v : norms) total += v;
  return std::pow(total, 1.0 / st.pprime);
}

double psi_grad_norm(const KacanovState& st, double r) {
  const Mesh& mesh = *st.mesh;
  const QuadRule rule = default_quad(mesh.dim);
  const ShapeTable tab = tabulate(mesh.dim, st.V().degree, rule);
  double total = 0.0;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const ElemGeom g = element_geometry(mesh, e);
    const auto& dofs = st.V().element_dofs[e];
    double acc = 0.0;
    for (int q = 0; q < rule.size(); ++q) {
      std::array<double, 2> grad{0.0, 0.0};
      for (int i = 0; i < tab.ndofs; ++i) {
        const auto& dr = tab.dref[static_cast<size_t>(q) * tab.ndofs + i];
        const double c = st.psi.coeffs[dofs[i]];
        for (int d = 0; d < mesh.dim; ++d)
          for (int k = 0; k < mesh.dim; ++k) grad[d] += c * g.invJT[d][k] * dr[k];
      }
      acc += rule.weights[q] * std::pow(std::hypot(grad[0], grad[1]), r);
    }
    total += acc * g.detJ;
  }
  return std::pow(total, 1.0 / r);
}

double duality_gap(const KacanovState& st) {
  const double grad_p = std::pow(psi_grad_norm(st, st.p), st.p);
  const auto psi_red = reduce_vector(st.psi.coeffs, st.V());
  double f_psi = 0.0;
  for (size_t i = 0; i < psi_red.size(); ++i) f_psi += st.load_red[i] * psi_red[i];
  return std::abs(grad_p / st.p - f_psi + energy_J(st.sigma, st.pprime));
}

KacanovState run_kacanov(const ProblemSpec& prob, const Mesh& mesh, double p,
                         const RelaxationInterval& zeta, int max_iters, double rel_tol) {
  if (max_iters < 1) throw std::invalid_argument("max_iters must be at least 1");
  KacanovState st = make_state(prob, mesh, p, zeta);
  for (int n = 0; n < max_iters; ++n) {
    kacanov_step(st);
    const auto& h = st.energy_history;
    if (h.size() >= 2) {
      const double dec = h[h.size() - 2] - h.back();
      if (dec <= rel_tol * std::max(1.0, std::abs(h.back()))) break;
    }
  }
  return st;
}

}  // namespace pminres
