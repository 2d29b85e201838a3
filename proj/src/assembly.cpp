#include "pminres/assembly.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "pminres/quadrature.hpp"

namespace pminres {

namespace {

void check_samples(const Mesh& mesh, int nq, size_t n, const char* what) {
  if (n != static_cast<size_t>(mesh.n_elements()) * static_cast<size_t>(nq))
    throw std::invalid_argument(std::string(what) + ": sample layout does not match mesh and rule");
}

// Physical gradients of all shapes at one quadrature point.
void phys_grads(const ShapeTable& tab, const ElemGeom& g, int dim, int q,
                std::array<double, 2>* out) {
  for (int i = 0; i < tab.ndofs; ++i) {
    const auto& dr = tab.dref[static_cast<size_t>(q) * tab.ndofs + i];
    out[i] = {0.0, 0.0};
    for (int d = 0; d < dim; ++d)
      for (int k = 0; k < dim; ++k) out[i][d] += g.invJT[d][k] * dr[k];
  }
}

}  // namespace

WeightField unit_weight(const Mesh& mesh) {
  WeightField w;
  w.mesh = &mesh;
  w.quad = default_quad(mesh.dim);
  w.values.assign(static_cast<size_t>(mesh.n_elements()) * w.quad.size(), 1.0);
  return w;
}

SparseMatrix assemble_weighted_stiffness(const FeSpace& V, const WeightField& w) {
  const Mesh& mesh = *V.mesh;
  if (w.mesh != &mesh) throw std::invalid_argument("weight field lives on a different mesh");
  check_samples(mesh, w.quad.size(), w.values.size(), "weight field");

  const ShapeTable tab = tabulate(mesh.dim, V.degree, w.quad);
  const int nd = tab.ndofs;
  std::vector<Triplet> trips;
  trips.reserve(static_cast<size_t>(mesh.n_elements()) * nd * nd);
  std::array<double, 2> grad[6];

  for (int e = 0; e < mesh.n_elements(); ++e) {
    const ElemGeom g = element_geometry(mesh, e);
    const auto& dofs = V.element_dofs[e];
    for (int q = 0; q < w.quad.size(); ++q) {
      phys_grads(tab, g, mesh.dim, q, grad);
      const double wq = w.quad.weights[q] * g.detJ * w.at(e, q);
      for (int i = 0; i < nd; ++i)
        for (int j = 0; j < nd; ++j) {
          double dot = grad[i][0] * grad[j][0] + grad[i][1] * grad[j][1];
          trips.push_back({dofs[i], dofs[j], wq * dot});
        }
    }
  }
  return SparseMatrix::from_triplets(V.n_dofs(), V.n_dofs(), std::move(trips));
}

SparseMatrix assemble_b(const FeSpace& U, const FeSpace& V, const ProblemSpec& prob) {
  const Mesh& mesh = *V.mesh;
  if (U.mesh != &mesh) throw std::invalid_argument("trial and test spaces live on different meshes");
  if (prob.dim != mesh.dim) throw std::invalid_argument("problem dimension does not match the mesh");
  if (prob.epsilon < 0.0) throw std::invalid_argument("negative diffusion coefficient");

  const QuadRule rule = default_quad(mesh.dim);
  const ShapeTable tabU = tabulate(mesh.dim, U.degree, rule);
  const ShapeTable tabV = tabulate(mesh.dim, V.degree, rule);
  std::vector<Triplet> trips;
  trips.reserve(static_cast<size_t>(mesh.n_elements()) * tabU.ndofs * tabV.ndofs);
  std::array<double, 2> gU[6], gV[6];

  for (int e = 0; e < mesh.n_elements(); ++e) {
    const ElemGeom g = element_geometry(mesh, e);
    const auto& du = U.element_dofs[e];
    const auto& dv = V.element_dofs[e];
    for (int q = 0; q < rule.size(); ++q) {
      phys_grads(tabU, g, mesh.dim, q, gU);
      phys_grads(tabV, g, mesh.dim, q, gV);
      const double wq = rule.weights[q] * g.detJ;
      const double* valU = &tabU.val[static_cast<size_t>(q) * tabU.ndofs];
      const double* valV = &tabV.val[static_cast<size_t>(q) * tabV.ndofs];
      for (int i = 0; i < tabV.ndofs; ++i) {
        const double betagv = prob.beta[0] * gV[i][0] + prob.beta[1] * gV[i][1];
        for (int j = 0; j < tabU.ndofs; ++j) {
          double val = prob.epsilon * (gU[j][0] * gV[i][0] + gU[j][1] * gV[i][1]) -
                       valU[j] * betagv + prob.c * valU[j] * valV[i];
          trips.push_back({dv[i], du[j], wq * val});
        }
      }
    }
  }
  return SparseMatrix::from_triplets(V.n_dofs(), U.n_dofs(), std::move(trips));
}

std::vector<double> assemble_load(const FeSpace& V, const ProblemSpec& prob,
                                  const FeFunction* lift) {
  const Mesh& mesh = *V.mesh;
  if (prob.dim != mesh.dim) throw std::invalid_argument("problem dimension does not match the mesh");
  if (!prob.f) throw std::invalid_argument("problem has no source term");

  const QuadRule rule = default_quad(mesh.dim);
  const ShapeTable tabV = tabulate(mesh.dim, V.degree, rule);
  std::vector<double> F(V.n_dofs(), 0.0);
  std::array<double, 2> gV[6];

  for (int e = 0; e < mesh.n_elements(); ++e) {
    const ElemGeom g = element_geometry(mesh, e);
    const auto& dv = V.element_dofs[e];
    for (int q = 0; q < rule.size(); ++q) {
      const auto xy = map_to_physical(mesh, e, rule.cart(q));
      const double wq = rule.weights[q] * g.detJ;
      const double fq = prob.f(xy[0], xy[1]);
      phys_grads(tabV, g, mesh.dim, q, gV);
      const double* valV = &tabV.val[static_cast<size_t>(q) * tabV.ndofs];

      double liftval = 0.0;
      std::array<double, 2> liftgrad{0.0, 0.0};
      if (lift) {
        EvalResult r = eval(*lift, e, rule.cart(q));
        liftval = r.value;
        liftgrad = r.grad;
      }
      for (int i = 0; i < tabV.ndofs; ++i) {
        double v = fq * valV[i];
        if (lift) {
          const double betagv = prob.beta[0] * gV[i][0] + prob.beta[1] * gV[i][1];
          v -= prob.epsilon * (liftgrad[0] * gV[i][0] + liftgrad[1] * gV[i][1]) -
               liftval * betagv + prob.c * liftval * valV[i];
        }
        F[dv[i]] += wq * v;
      }
    }
  }
  return F;
}

double kappa_star(double t, double zeta_lo, double zeta_hi, double pprime) {
  if (zeta_lo > 0.0 && t < zeta_lo)
    return 0.5 * std::pow(zeta_lo, pprime - 2.0) * t * t +
           (1.0 / pprime - 0.5) * std::pow(zeta_lo, pprime);
  if (std::isfinite(zeta_hi) && t > zeta_hi)
    return 0.5 * std::pow(zeta_hi, pprime - 2.0) * t * t +
           (1.0 / pprime - 0.5) * std::pow(zeta_hi, pprime);
  return std::pow(t, pprime) / pprime;
}

namespace {

double integrate_density(const SigmaField& sigma, double lo, double hi, double pprime) {
  const Mesh& mesh = *sigma.mesh;
  check_samples(mesh, sigma.quad.size(), sigma.samples.size(), "sigma field");
  double total = 0.0;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const double detJ = element_geometry(mesh, e).detJ;
    double acc = 0.0;
    for (int q = 0; q < sigma.quad.size(); ++q) {
      const auto& s = sigma.at(e, q);
      acc += sigma.quad.weights[q] * kappa_star(std::hypot(s[0], s[1]), lo, hi, pprime);
    }
    total += acc * detJ;
  }
  return total;
}

}  // namespace

double energy_interval(const SigmaField& sigma, double lo, double hi, double pprime) {
  if (lo < 0.0 || hi < lo) throw std::invalid_argument("invalid clamping interval");
  return integrate_density(sigma, lo, hi, pprime);
}

double energy_J(const SigmaField& sigma, double pprime) {
  return integrate_density(sigma, 0.0, std::numeric_limits<double>::infinity(), pprime);
}

std::vector<double> element_pprime_norms(const SigmaField& sigma, double pprime) {
  const Mesh& mesh = *sigma.mesh;
  check_samples(mesh, sigma.quad.size(), sigma.samples.size(), "sigma field");
  std::vector<double> norms(mesh.n_elements(), 0.0);
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const double detJ = element_geometry(mesh, e).detJ;
    double acc = 0.0;
    for (int q = 0; q < sigma.quad.size(); ++q) {
      const auto& s = sigma.at(e, q);
      acc += sigma.quad.weights[q] * std::pow(std::hypot(s[0], s[1]), pprime);
    }
    norms[e] = acc * detJ;
  }
  return norms;
}

SparseMatrix reduce_matrix(const SparseMatrix& M, const FeSpace& rowspace,
                           const FeSpace& colspace) {
  if (M.rows != rowspace.n_dofs() || M.cols != colspace.n_dofs())
    throw std::invalid_argument("matrix shape does not match the spaces");
  std::vector<Triplet> trips;
  trips.reserve(M.vals.size());
  for (int r = 0; r < M.rows; ++r) {
    const int rr = rowspace.free_index[r];
    if (rr < 0) continue;
    for (int k = M.row_ptr[r]; k < M.row_ptr[r + 1]; ++k) {
      const int cc = colspace.free_index[M.col_idx[k]];
      if (cc < 0) continue;
      trips.push_back({rr, cc, M.vals[k]});
    }
  }
  return SparseMatrix::from_triplets(rowspace.n_free(), colspace.n_free(), std::move(trips));
}

std::vector<double> reduce_vector(const std::vector<double>& v, const FeSpace& s) {
  if (static_cast<int>(v.size()) != s.n_dofs())
    throw std::invalid_argument("vector length does not match the space");
  std::vector<double> out(s.n_free());
  for (int i = 0; i < s.n_free(); ++i) out[i] = v[s.free_dofs[i]];
  return out;
}

std::vector<double> expand_free(const std::vector<double>& reduced, const FeSpace& s,
                                bool with_constraints) {
  if (static_cast<int>(reduced.size()) != s.n_free())
    throw std::invalid_argument("vector length does not match the reduced space");
  std::vector<double> out(s.n_dofs(), 0.0);
  for (int i = 0; i < s.n_free(); ++i) out[s.free_dofs[i]] = reduced[i];
  if (with_constraints)
    for (int d = 0; d < s.n_dofs(); ++d)
      if (s.constrained[d]) out[d] = s.constraint_value[d];
  return out;
}

}  // namespace pminres
