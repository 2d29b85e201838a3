#pragma once

#include <array>
#include <vector>

#include "pminres/linsolve.hpp"
#include "pminres/space.hpp"

namespace pminres {

// Coefficients of the convection-diffusion-reaction form
//   b(u, v) = int eps grad u . grad v - int u beta . grad v + int c u v
// with load F(v) = int f v. Inhomogeneous Dirichlet data is carried by the
// nodal lifting of the trial space; `exact` optionally holds a closed-form
// solution for error reporting.
struct ProblemSpec {
  int dim = 1;
  double epsilon = 0.0;
  std::array<double, 2> beta{0.0, 0.0};
  double c = 0.0;
  ScalarFn f;
  std::vector<DirichletBC> dirichlet;
  ScalarFn exact;
};

// Vector-valued samples at the quadrature points of every element
// (samples[e*nq + q]; the y component is unused in 1d).
struct SigmaField {
  const Mesh* mesh = nullptr;
  QuadRule quad;
  std::vector<std::array<double, 2>> samples;

  int nq() const { return quad.size(); }
  std::array<double, 2>& at(int e, int q) { return samples[e * nq() + q]; }
  const std::array<double, 2>& at(int e, int q) const { return samples[e * nq() + q]; }
};

// Positive scalar samples with the same layout.
struct WeightField {
  const Mesh* mesh = nullptr;
  QuadRule quad;
  std::vector<double> values;

  int nq() const { return quad.size(); }
  double at(int e, int q) const { return values[e * nq() + q]; }
};

// w == 1 on the shared degree-4 rule.
WeightField unit_weight(const Mesh& mesh);

// Stiffness A_ij = int w grad phi_j . grad phi_i over all dofs of V
// (constraints are applied afterwards by row/column reduction).
SparseMatrix assemble_weighted_stiffness(const FeSpace& V, const WeightField& w);

// Mixed matrix B_ij = b(phi^U_j, phi^V_i): rows belong to the test space V,
// columns to the trial space U; the degree-4 rule integrates every term
// exactly for P1/P2 pairs.
SparseMatrix assemble_b(const FeSpace& U, const FeSpace& V, const ProblemSpec& prob);

// Load vector F(v) = int f v - b(lift, v) over all dofs of V.
std::vector<double> assemble_load(const FeSpace& V, const ProblemSpec& prob,
                                  const FeFunction* lift = nullptr);

// Regularized dual density: t^{p'}/p' between the clamps, extended
// quadratically (C^1) below zeta_lo and above zeta_hi. zeta_lo = 0 or
// zeta_hi = +inf switch the corresponding branch off.
double kappa_star(double t, double zeta_lo, double zeta_hi, double pprime);

// int kappa*(|sigma|) dx for the clamping interval [lo, hi].
double energy_interval(const SigmaField& sigma, double lo, double hi, double pprime);

// Unrelaxed dual energy (1/p') int |sigma|^{p'} dx.
double energy_J(const SigmaField& sigma, double pprime);

// Per-element int_T |sigma|^{p'} dx (local refinement indicators).
std::vector<double> element_pprime_norms(const SigmaField& sigma, double pprime);

// Constraint elimination: drop constrained rows/columns (test-space
// constraints are homogeneous; prescribed trial values enter via the lift).
SparseMatrix reduce_matrix(const SparseMatrix& M, const FeSpace& rowspace,
                           const FeSpace& colspace);
std::vector<double> reduce_vector(const std::vector<double>& v, const FeSpace& s);
// Scatter a reduced vector back to all dofs; constrained entries are zero or,
// when with_constraints is set, the prescribed boundary values.
std::vector<double> expand_free(const std::vector<double>& reduced, const FeSpace& s,
                                bool with_constraints);

}  // namespace pminres
