#pragma once

#include <memory>
#include <vector>

#include "pminres/assembly.hpp"

namespace pminres {

// Clamping interval [lo, hi] for the regularized dual density.
struct RelaxationInterval {
  double lo = 1e-2;
  double hi = 1e2;
};

double clamp_to(double t, const RelaxationInterval& zeta);

// Pointwise weight clamp(|sigma|)^{2-p'} on the sample set of sigma.
WeightField weight_from_sigma(const SigmaField& sigma, const RelaxationInterval& zeta,
                              double pprime);

// Zero start value on the shared quadrature rule.
SigmaField initial_sigma(const Mesh& mesh, const QuadRule& quad);

// Trial space U (P1) carrying the Dirichlet data and test space V (P2) with
// the homogeneous constraints on the same boundary parts.
struct Spaces {
  FeSpace U;
  FeSpace V;
};
std::shared_ptr<Spaces> make_spaces(const ProblemSpec& prob, const Mesh& mesh);

// One weighted-iteration state on a fixed mesh. psi/u point into *spaces;
// prob and mesh must outlive the state. energy_history holds J_zeta of the
// computed iterates (the seed's energy is not recorded: the seed need not
// satisfy the discrete constraint, so only later entries are comparable).
struct KacanovState {
  const ProblemSpec* prob = nullptr;
  const Mesh* mesh = nullptr;
  std::shared_ptr<Spaces> spaces;
  double p = 2.0;
  double pprime = 2.0;
  RelaxationInterval zeta;
  SigmaField sigma;       // current iterate (or the seed before any step)
  SigmaField sigma_prev;  // previous iterate
  FeFunction psi;
  FeFunction u;    // includes the prescribed boundary values
  FeFunction lift;
  SparseMatrix B_red;            // reduced mixed matrix (clamp-independent)
  std::vector<double> load_red;  // reduced F(v) - b(lift, v)
  std::vector<double> energy_history;
  int iter = 0;  // completed solves on this mesh

  const FeSpace& U() const { return spaces->U; }
  const FeSpace& V() const { return spaces->V; }
};

// Build a fresh state; `seed` (same sample layout as the default rule on
// `mesh`) replaces the zero start value when given.
KacanovState make_state(const ProblemSpec& prob, const Mesh& mesh, double p,
                        const RelaxationInterval& zeta, const SigmaField* seed = nullptr);

// One clamp-weight-solve-update sweep: w from the current sigma, weighted
// saddle solve for (psi, u), sigma(x_q) = w(x_q) grad psi(x_q), energy append.
void kacanov_step(KacanovState& state);

// Change the clamping interval. Energies recorded under the old interval are
// not comparable, so the history restarts at the current iterate's energy.
void set_zeta(KacanovState& state, const RelaxationInterval& zeta);

// Error indicators, all evaluated at the pre-step iterate sigma_prev with the
// already-performed lookahead step supplying j_curr.
struct Indicators {
  double eta_zeta_plus_sq = 0.0;   // clamping error at the upper bound
  double eta_zeta_minus_sq = 0.0;  // clamping error at the lower bound
  double eta_kac_sq = 0.0;         // fixed-point iteration error
  double eta_h_pprime_total = 0.0;
  std::vector<double> eta_h_per_element;  // int_T |sigma|^{p'}
};

// j_prev = J_zeta(sigma_prev), j_curr = J_zeta(sigma), both under the current
// interval. A negative indicator beyond -1e-12 (relative) raises logic_error;
// tiny negative round-off is clamped to zero.
Indicators compute_indicators(const KacanovState& state, double j_prev, double j_curr);

// ||sigma||_{L^{p'}}: the dual-norm residual of the current primal iterate.
double residual_estimate(const KacanovState& state);

// (int |grad psi|^r)^{1/r} by quadrature (diagnostic).
double psi_grad_norm(const KacanovState& state, double r);

// |(1/p) int |grad psi|^p - F(psi) + (1/p') int |sigma|^{p'}|: vanishes at an
// unclamped fixed point up to solver precision.
double duality_gap(const KacanovState& state);

// Iterate until the energy decrement drops below
// rel_tol * max(1, |J|) or max_iters steps were taken.
KacanovState run_kacanov(const ProblemSpec& prob, const Mesh& mesh, double p,
                         const RelaxationInterval& zeta, int max_iters,
                         double rel_tol = 1e-10);

}  // namespace pminres
