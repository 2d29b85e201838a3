#pragma once

#include <array>
#include <string>
#include <vector>

#include "pminres/assembly.hpp"
#include "pminres/space.hpp"

namespace pminres {

// The three convection-diffusion test problems:
//   exp1     u' + u = 1 on (0,1), u(0) = u(1) = 0
//   exp2     d/dx u + u = 1 on (0,1)^2, u = 0 on x in {0,1}
//   eriksson -eps lap u + u_x = 0 on (0,1)^2, u = sin(pi y) at x = 0,
//            u = 0 on the rest of the boundary
enum class ExperimentId { exp1, exp2, eriksson };

// Fully populated coefficients, boundary data, and closed-form solution.
// `eps` is the diffusion parameter of eriksson (ignored otherwise).
ProblemSpec make_problem(ExperimentId id, double eps = 1e-3);

// Exponents s1 > 0 > s2 of the eriksson solution
// (e^{s1(x-1)} - e^{s2(x-1)}) / (e^{-s1} - e^{-s2}) * sin(pi y);
// both are roots of eps s^2 - s - eps pi^2 = 0.
std::array<double, 2> eriksson_rates(double eps);

enum class SolveStatus { ok, solver_failure };

// A direct comparison solve: primal iterate, per-element refinement
// indicators, and whether the linear system was solvable. `u` points into the
// caller's space.
struct BaselineResult {
  std::string method;
  FeFunction u;
  std::vector<double> indicators;
  SolveStatus status = SolveStatus::ok;
};

// Classical Galerkin on U (P1): b(u_h, w) = F(w) for all w in U. Indicators
// are the residual estimator h_T^2 ||f - beta.grad u_h - c u_h||_{L2(T)}^2
// plus the facet jump h_F ||[eps grad u_h . n]||^2 split between neighbours.
// A singular system is reported in `status`, not thrown.
BaselineResult galerkin_solve(const ProblemSpec& prob, const FeSpace& U);

// Unweighted minimal-residual solve: saddle system with the plain V
// stiffness. Indicators are ||grad eta_h||_{L2(T)}^2 of the Riesz
// representative eta_h (the psi component).
BaselineResult minres_l2_solve(const ProblemSpec& prob, const FeSpace& U, const FeSpace& V);

// Residual estimator of galerkin_solve for a given P1 function (exposed for
// direct verification against hand-computed values).
std::vector<double> galerkin_indicators(const ProblemSpec& prob, const FeFunction& u);

// Per-element ||grad f||_{L2(T)}^2 (the minres_l2 localization).
std::vector<double> element_gradient_norms_sq(const FeFunction& f);

// ||u_h - exact||_{L2} with the shared degree-4 rule.
double l2_error(const FeFunction& u, const ScalarFn& exact);

// u_h along an axis-parallel line: axis 'x' varies x at y = value, axis 'y'
// varies y at x = value (2d only). Equally spaced `samples` points including
// the endpoints; point location by brute-force element search.
std::vector<std::array<double, 2>> line_profile(const FeFunction& u, char axis,
                                                double value, int samples);

// Diffusion schedule for the staged eriksson runs.
double staged_epsilon(int ndof);

}  // namespace pminres
