#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "pminres/mesh.hpp"
#include "pminres/quadrature.hpp"

namespace pminres {

using ScalarFn = std::function<double(double, double)>;

// Dirichlet data attached to a boundary part by label.
struct DirichletBC {
  std::string part;
  ScalarFn value;
};

// Lagrange space of degree 1 or 2 on a mesh. Dofs sit at vertices plus, for
// degree 2, at cell midpoints (1d) or edge midpoints (2d). Constrained dofs
// carry the prescribed boundary value; the free_* arrays give the reduced
// numbering used by the solvers.
struct FeSpace {
  const Mesh* mesh = nullptr;
  int degree = 1;
  std::vector<std::array<double, 2>> dof_coords;
  std::vector<std::array<int, 6>> element_dofs;
  std::vector<char> constrained;
  std::vector<double> constraint_value;
  std::vector<int> free_index;  // dof id -> reduced index, -1 if constrained
  std::vector<int> free_dofs;   // reduced index -> dof id

  int n_dofs() const { return static_cast<int>(dof_coords.size()); }
  int n_free() const { return static_cast<int>(free_dofs.size()); }
  int dofs_per_element() const {
    return degree == 1 ? mesh->dim + 1 : (mesh->dim == 1 ? 3 : 6);
  }
};

FeSpace build_space(const Mesh& mesh, int degree,
                    const std::vector<DirichletBC>& dirichlet = {});

struct FeFunction {
  const FeSpace* space = nullptr;
  std::vector<double> coeffs;
};

struct EvalResult {
  double value = 0.0;
  std::array<double, 2> grad{0.0, 0.0};
};

// Value and physical gradient at a reference point of an element.
EvalResult eval(const FeFunction& f, int element, const std::array<double, 2>& ref);

// Nodal interpolation g(dof coordinates).
FeFunction interpolate(const ScalarFn& g, const FeSpace& space);

// The nodal lifting of the boundary data: prescribed values at constrained
// dofs, zero at free dofs.
FeFunction lift_function(const FeSpace& space);

// Reference basis values and reference gradients at (x, y); val/dref must
// hold dofs_per_element entries.
void eval_basis(int dim, int degree, double x, double y, double* val,
                std::array<double, 2>* dref);

// Basis tabulated at the points of a quadrature rule.
struct ShapeTable {
  int ndofs = 0;
  std::vector<double> val;                  // [q*ndofs + i]
  std::vector<std::array<double, 2>> dref;  // [q*ndofs + i]
};
ShapeTable tabulate(int dim, int degree, const QuadRule& rule);

}  // namespace pminres
