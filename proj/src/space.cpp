#include "pminres/space.hpp"

#include <map>
#include <set>
#include <stdexcept>

namespace pminres {

void eval_basis(int dim, int degree, double x, double y, double* val,
                std::array<double, 2>* dref) {
  if (dim == 1) {
    if (degree == 1) {
      val[0] = 1.0 - x;
      val[1] = x;
      dref[0] = {-1.0, 0.0};
      dref[1] = {1.0, 0.0};
      return;
    }
    // vertex, vertex, cell midpoint
    val[0] = 1.0 - 3.0 * x + 2.0 * x * x;
    val[1] = 2.0 * x * x - x;
    val[2] = 4.0 * x * (1.0 - x);
    dref[0] = {4.0 * x - 3.0, 0.0};
    dref[1] = {4.0 * x - 1.0, 0.0};
    dref[2] = {4.0 - 8.0 * x, 0.0};
    return;
  }
  double l0 = 1.0 - x - y, l1 = x, l2 = y;
  if (degree == 1) {
    val[0] = l0;
    val[1] = l1;
    val[2] = l2;
    dref[0] = {-1.0, -1.0};
    dref[1] = {1.0, 0.0};
    dref[2] = {0.0, 1.0};
    return;
  }
  // vertices then midpoints of edges (0,1), (1,2), (2,0)
  val[0] = l0 * (2.0 * l0 - 1.0);
  val[1] = l1 * (2.0 * l1 - 1.0);
  val[2] = l2 * (2.0 * l2 - 1.0);
  val[3] = 4.0 * l0 * l1;
  val[4] = 4.0 * l1 * l2;
  val[5] = 4.0 * l2 * l0;
  double g0 = 4.0 * l0 - 1.0, g1 = 4.0 * l1 - 1.0, g2 = 4.0 * l2 - 1.0;
  dref[0] = {-g0, -g0};
  dref[1] = {g1, 0.0};
  dref[2] = {0.0, g2};
  dref[3] = {4.0 * (l0 - l1), -4.0 * l1};
  dref[4] = {4.0 * l2, 4.0 * l1};
  dref[5] = {-4.0 * l2, 4.0 * (l0 - l2)};
}

ShapeTable tabulate(int dim, int degree, const QuadRule& rule) {
  ShapeTable t;
  t.ndofs = degree == 1 ? dim + 1 : (dim == 1 ? 3 : 6);
  t.val.resize(rule.size() * t.ndofs);
  t.dref.resize(rule.size() * t.ndofs);
  for (int q = 0; q < rule.size(); ++q) {
    auto x = rule.cart(q);
    eval_basis(dim, degree, x[0], x[1], &t.val[q * t.ndofs], &t.dref[q * t.ndofs]);
  }
  return t;
}

FeSpace build_space(const Mesh& mesh, int degree,
                    const std::vector<DirichletBC>& dirichlet) {
  if (degree != 1 && degree != 2) throw std::invalid_argument("degree must be 1 or 2");
  FeSpace s;
  s.mesh = &mesh;
  s.degree = degree;
  int nv = mesh.n_vertices();
  s.dof_coords = mesh.vertices;

  EdgeTable et;
  if (mesh.dim == 2 && degree == 2) et = build_edge_table(mesh);

  s.element_dofs.resize(mesh.n_elements());
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto& el = mesh.elements[e];
    auto& dofs = s.element_dofs[e];
    dofs.fill(-1);
    for (int k = 0; k < mesh.verts_per_element(); ++k) dofs[k] = el[k];
    if (degree == 2) {
      if (mesh.dim == 1) {
        dofs[2] = nv + e;
      } else {
        for (int k = 0; k < 3; ++k) dofs[3 + k] = nv + et.element_edges[e][k];
      }
    }
  }
  if (degree == 2) {
    if (mesh.dim == 1) {
      for (int e = 0; e < mesh.n_elements(); ++e) {
        const auto& el = mesh.elements[e];
        s.dof_coords.push_back(
            {0.5 * (mesh.vertices[el[0]][0] + mesh.vertices[el[1]][0]), 0.0});
      }
    } else {
      for (const auto& ed : et.edges)
        s.dof_coords.push_back({0.5 * (mesh.vertices[ed[0]][0] + mesh.vertices[ed[1]][0]),
                                0.5 * (mesh.vertices[ed[0]][1] + mesh.vertices[ed[1]][1])});
    }
  }

  int nd = s.n_dofs();
  s.constrained.assign(nd, 0);
  s.constraint_value.assign(nd, 0.0);

  std::set<std::string> labels;
  for (const auto& f : mesh.boundary_facets) labels.insert(f.part);
  std::map<std::array<int, 2>, int> edge_ids;
  if (mesh.dim == 2 && degree == 2)
    for (size_t ed = 0; ed < et.edges.size(); ++ed) edge_ids[et.edges[ed]] = static_cast<int>(ed);

  for (const auto& bc : dirichlet) {
    if (!labels.count(bc.part))
      throw std::invalid_argument("unknown boundary part label: " + bc.part);
    for (const auto& f : mesh.boundary_facets) {
      if (f.part != bc.part) continue;
      auto constrain = [&](int dof) {
        s.constrained[dof] = 1;
        s.constraint_value[dof] = bc.value(s.dof_coords[dof][0], s.dof_coords[dof][1]);
      };
      constrain(f.v[0]);
      if (mesh.dim == 2) {
        constrain(f.v[1]);
        if (degree == 2)
          constrain(nv + edge_ids.at({std::min(f.v[0], f.v[1]), std::max(f.v[0], f.v[1])}));
      }
    }
  }

  s.free_index.assign(nd, -1);
  for (int d = 0; d < nd; ++d)
    if (!s.constrained[d]) {
      s.free_index[d] = static_cast<int>(s.free_dofs.size());
      s.free_dofs.push_back(d);
    }
  return s;
}

EvalResult eval(const FeFunction& f, int element, const std::array<double, 2>& ref) {
  const FeSpace& s = *f.space;
  const Mesh& mesh = *s.mesh;
  int nd = s.dofs_per_element();
  double val[6];
  std::array<double, 2> dref[6];
  eval_basis(mesh.dim, s.degree, ref[0], ref[1], val, dref);
  ElemGeom g = element_geometry(mesh, element);
  EvalResult r;
  double gx = 0.0, gy = 0.0;
  for (int i = 0; i < nd; ++i) {
    double c = f.coeffs[s.element_dofs[element][i]];
    r.value += c * val[i];
    gx += c * dref[i][0];
    gy += c * dref[i][1];
  }
  if (mesh.dim == 1) {
    r.grad[0] = gx * g.invJT[0][0];
  } else {
    r.grad[0] = g.invJT[0][0] * gx + g.invJT[0][1] * gy;
    r.grad[1] = g.invJT[1][0] * gx + g.invJT[1][1] * gy;
  }
  return r;
}

FeFunction interpolate(const ScalarFn& g, const FeSpace& space) {
  FeFunction f;
  f.space = &space;
  f.coeffs.resize(space.n_dofs());
  for (int d = 0; d < space.n_dofs(); ++d)
    f.coeffs[d] = g(space.dof_coords[d][0], space.dof_coords[d][1]);
  return f;
}

FeFunction lift_function(const FeSpace& space) {
  FeFunction f;
  f.space = &space;
  f.coeffs = space.constraint_value;
  return f;
}

}  // namespace pminres
