#include "pminres/problems.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "pminres/linsolve.hpp"
#include "pminres/quadrature.hpp"

namespace pminres {

namespace {

constexpr double kPi = 3.14159265358979323846;

double zero_fn(double, double) { return 0.0; }

}  // namespace

std::array<double, 2> eriksson_rates(double eps) {
  if (eps <= 0.0) throw std::invalid_argument("eriksson requires eps > 0");
  const double root = std::sqrt(1.0 + 4.0 * kPi * kPi * eps * eps);
  return {(1.0 + root) / (2.0 * eps), (1.0 - root) / (2.0 * eps)};
}

ProblemSpec make_problem(ExperimentId id, double eps) {
  ProblemSpec p;
  switch (id) {
    case ExperimentId::exp1:
      p.dim = 1;
      p.epsilon = 0.0;
      p.beta = {1.0, 0.0};
      p.c = 1.0;
      p.f = [](double, double) { return 1.0; };
      p.dirichlet = {{"left", zero_fn}, {"right", zero_fn}};
      p.exact = [](double x, double) { return 1.0 - std::exp(-x); };
      break;
    case ExperimentId::exp2:
      p.dim = 2;
      p.epsilon = 0.0;
      p.beta = {1.0, 0.0};
      p.c = 1.0;
      p.f = [](double, double) { return 1.0; };
      p.dirichlet = {{"left", zero_fn}, {"right", zero_fn}};
      p.exact = [](double x, double) { return 1.0 - std::exp(-x); };
      break;
    case ExperimentId::eriksson: {
      const auto [s1, s2] = eriksson_rates(eps);
      p.dim = 2;
      p.epsilon = eps;
      p.beta = {1.0, 0.0};
      p.c = 0.0;
      p.f = zero_fn;
      p.dirichlet = {{"left", [](double, double y) { return std::sin(kPi * y); }},
                     {"right", zero_fn},
                     {"bottom", zero_fn},
                     {"top", zero_fn}};
      const double denom = std::exp(-s1) - std::exp(-s2);
      p.exact = [s1 = s1, s2 = s2, denom](double x, double y) {
        return (std::exp(s1 * (x - 1.0)) - std::exp(s2 * (x - 1.0))) / denom *
               std::sin(kPi * y);
      };
      break;
    }
  }
  return p;
}

std::vector<double> galerkin_indicators(const ProblemSpec& prob, const FeFunction& u) {
  const FeSpace& U = *u.space;
  const Mesh& mesh = *U.mesh;
  if (U.degree != 1)
    throw std::invalid_argument("residual estimator expects a P1 function");

  const QuadRule rule = default_quad(mesh.dim);
  std::vector<double> ind(mesh.n_elements(), 0.0);

  // element residual (eps lap u vanishes elementwise for P1)
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const ElemGeom g = element_geometry(mesh, e);
    double acc = 0.0;
    for (int q = 0; q < rule.size(); ++q) {
      const auto xy = map_to_physical(mesh, e, rule.cart(q));
      const EvalResult r = eval(u, e, rule.cart(q));
      const double fq = prob.f ? prob.f(xy[0], xy[1]) : 0.0;
      const double res =
          fq - prob.beta[0] * r.grad[0] - prob.beta[1] * r.grad[1] - prob.c * r.value;
      acc += rule.weights[q] * res * res;
    }
    const double hT = element_diameter(mesh, e);
    ind[e] = hT * hT * acc * g.detJ;
  }

  if (prob.epsilon <= 0.0) return ind;

  // constant gradient per element
  std::vector<std::array<double, 2>> grads(mesh.n_elements());
  const std::array<double, 2> center =
      mesh.dim == 1 ? std::array<double, 2>{0.5, 0.0} : std::array<double, 2>{1.0 / 3, 1.0 / 3};
  for (int e = 0; e < mesh.n_elements(); ++e) grads[e] = eval(u, e, center).grad;

  if (mesh.dim == 1) {
    // interior vertices are the facets; counting measure for the jump
    std::vector<std::array<int, 2>> touch(mesh.n_vertices(), {-1, -1});
    for (int e = 0; e < mesh.n_elements(); ++e)
      for (int k = 0; k < 2; ++k) {
        auto& t = touch[mesh.elements[e][k]];
        (t[0] < 0 ? t[0] : t[1]) = e;
      }
    for (const auto& t : touch) {
      if (t[0] < 0 || t[1] < 0) continue;
      const double jump = prob.epsilon * (grads[t[0]][0] - grads[t[1]][0]);
      const double hF =
          0.5 * (element_volume(mesh, t[0]) + element_volume(mesh, t[1]));
      const double contrib = 0.5 * hF * jump * jump;
      ind[t[0]] += contrib;
      ind[t[1]] += contrib;
    }
  } else {
    const EdgeTable et = build_edge_table(mesh);
    for (size_t k = 0; k < et.edges.size(); ++k) {
      const int e1 = et.edge_elements[k][0], e2 = et.edge_elements[k][1];
      if (e2 < 0) continue;
      const auto& a = mesh.vertices[et.edges[k][0]];
      const auto& b = mesh.vertices[et.edges[k][1]];
      const double len = std::hypot(b[0] - a[0], b[1] - a[1]);
      const std::array<double, 2> n{(b[1] - a[1]) / len, -(b[0] - a[0]) / len};
      const double jump = prob.epsilon * ((grads[e1][0] - grads[e2][0]) * n[0] +
                                          (grads[e1][1] - grads[e2][1]) * n[1]);
      const double contrib = 0.5 * len * jump * jump * len;  // h_F ||[.]||^2 / 2
      ind[e1] += contrib;
      ind[e2] += contrib;
    }
  }
  return ind;
}

std::vector<double> element_gradient_norms_sq(const FeFunction& f) {
  const Mesh& mesh = *f.space->mesh;
  const QuadRule rule = default_quad(mesh.dim);
  std::vector<double> out(mesh.n_elements(), 0.0);
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const ElemGeom g = element_geometry(mesh, e);
    double acc = 0.0;
    for (int q = 0; q < rule.size(); ++q) {
      const EvalResult r = eval(f, e, rule.cart(q));
      acc += rule.weights[q] * (r.grad[0] * r.grad[0] + r.grad[1] * r.grad[1]);
    }
    out[e] = acc * g.detJ;
  }
  return out;
}

BaselineResult galerkin_solve(const ProblemSpec& prob, const FeSpace& U) {
  if (U.degree != 1) throw std::invalid_argument("galerkin baseline expects a P1 space");
  BaselineResult r;
  r.method = "galerkin";
  r.u = FeFunction{&U, std::vector<double>(U.n_dofs(), 0.0)};
  FeFunction lift = lift_function(U);
  SparseMatrix B = reduce_matrix(assemble_b(U, U, prob), U, U);
  const auto F = reduce_vector(assemble_load(U, prob, &lift), U);
  try {
    r.u.coeffs = expand_free(lu_solve(B, F), U, true);
  } catch (const SingularSystemError&) {
    r.status = SolveStatus::solver_failure;
    return r;
  }
  r.indicators = galerkin_indicators(prob, r.u);
  return r;
}

BaselineResult minres_l2_solve(const ProblemSpec& prob, const FeSpace& U, const FeSpace& V) {
  BaselineResult r;
  r.method = "minres_l2";
  r.u = FeFunction{&U, std::vector<double>(U.n_dofs(), 0.0)};
  const Mesh& mesh = *U.mesh;
  FeFunction lift = lift_function(U);
  SparseMatrix A = reduce_matrix(assemble_weighted_stiffness(V, unit_weight(mesh)), V, V);
  SparseMatrix B = reduce_matrix(assemble_b(U, V, prob), V, U);
  auto F = reduce_vector(assemble_load(V, prob, &lift), V);
  try {
    SaddleSolution sol = solve_saddle({std::move(A), std::move(B), std::move(F)});
    r.u.coeffs = expand_free(sol.u, U, true);
    const FeFunction eta{&V, expand_free(sol.psi, V, false)};
    r.indicators = element_gradient_norms_sq(eta);
  } catch (const SingularSystemError&) {
    r.status = SolveStatus::solver_failure;
  }
  return r;
}

double l2_error(const FeFunction& u, const ScalarFn& exact) {
  const Mesh& mesh = *u.space->mesh;
  const QuadRule rule = default_quad(mesh.dim);
  double total = 0.0;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const ElemGeom g = element_geometry(mesh, e);
    double acc = 0.0;
    for (int q = 0; q < rule.size(); ++q) {
      const auto xy = map_to_physical(mesh, e, rule.cart(q));
      const double d = eval(u, e, rule.cart(q)).value - exact(xy[0], xy[1]);
      acc += rule.weights[q] * d * d;
    }
    total += acc * g.detJ;
  }
  return std::sqrt(total);
}

std::vector<std::array<double, 2>> line_profile(const FeFunction& u, char axis,
                                                double value, int samples) {
  const Mesh& mesh = *u.space->mesh;
  if (samples < 2) throw std::invalid_argument("need at least two profile samples");
  if (value < 0.0 || value > 1.0)
    throw std::invalid_argument("profile line lies outside the unit domain");
  if (axis != 'x' && axis != 'y') throw std::invalid_argument("axis must be 'x' or 'y'");
  if (mesh.dim == 1 && axis != 'x')
    throw std::invalid_argument("1d meshes only have x-profiles");

  std::vector<std::array<double, 2>> out;
  out.reserve(samples);
  const double tol = 1e-10;
  for (int i = 0; i < samples; ++i) {
    const double t = static_cast<double>(i) / (samples - 1);
    std::array<double, 2> pt{t, 0.0};
    if (mesh.dim == 2) pt = axis == 'x' ? std::array<double, 2>{t, value}
                                        : std::array<double, 2>{value, t};
    bool found = false;
    for (int e = 0; e < mesh.n_elements() && !found; ++e) {
      const auto r = map_to_reference(mesh, e, pt);
      const bool inside = mesh.dim == 1
                              ? r[0] >= -tol && r[0] <= 1.0 + tol
                              : r[0] >= -tol && r[1] >= -tol && r[0] + r[1] <= 1.0 + tol;
      if (inside) {
        out.push_back({t, eval(u, e, r).value});
        found = true;
      }
    }
    if (!found) throw std::runtime_error("profile point not covered by the mesh");
  }
  return out;
}

double staged_epsilon(int ndof) {
  if (ndof < 0) throw std::invalid_argument("negative dof count");
  if (ndof < 1000) return 1e-2;
  if (ndof < 5000) return 1e-3;
  if (ndof < 10000) return 1e-4;
  if (ndof < 50000) return 1e-5;
  return 1e-6;
}

}  // namespace pminres
