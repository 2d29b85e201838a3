#pragma once

#include <array>
#include <string>
#include <vector>

namespace pminres {

// A boundary facet: a vertex in 1D (v[1] == -1), an edge in 2D. `part` is the
// label used to attach Dirichlet data ("left", "right", "bottom", "top").
struct BoundaryFacet {
  std::array<int, 2> v{-1, -1};
  std::string part;
};

// Link from an element of a refined mesh to the element of the previous mesh
// it descends from. slot enumerates the children created from that element
// (slot 0 for elements copied unchanged).
struct ElementParent {
  int parent = -1;
  int slot = 0;
};

// Simplicial mesh of the unit interval or unit square. Elements are vertex
// index tuples ordered counterclockwise in 2D (third entry -1 in 1D).
// refinement_edge[e] is the local edge (k joins vertices k and k+1 mod 3)
// that newest-vertex bisection splits first; generated and refined meshes
// keep it at 0 by ordering element vertices accordingly.
struct Mesh {
  int dim = 1;
  std::vector<std::array<double, 2>> vertices;  // y == 0 in 1D
  std::vector<std::array<int, 3>> elements;
  std::vector<BoundaryFacet> boundary_facets;
  std::vector<int> refinement_edge;   // 2D only (empty in 1D)
  std::vector<ElementParent> parent;  // empty for generated meshes

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_elements() const { return static_cast<int>(elements.size()); }
  int verts_per_element() const { return dim + 1; }
};

// Affine map x = x0 + J*xhat from the reference element (unit interval /
// unit triangle). detJ is the length in 1D and twice the area in 2D.
struct ElemGeom {
  std::array<double, 2> x0{0.0, 0.0};
  double J[2][2]{{0.0, 0.0}, {0.0, 0.0}};
  double invJT[2][2]{{0.0, 0.0}, {0.0, 0.0}};
  double detJ = 0.0;
};

ElemGeom element_geometry(const Mesh& mesh, int e);
double element_volume(const Mesh& mesh, int e);
double total_volume(const Mesh& mesh);
double element_diameter(const Mesh& mesh, int e);
std::array<double, 2> map_to_physical(const Mesh& mesh, int e, const std::array<double, 2>& ref);
std::array<double, 2> map_to_reference(const Mesh& mesh, int e, const std::array<double, 2>& x);

// Edge connectivity of a 2D mesh (also enumerates P2 midpoint dofs).
struct EdgeTable {
  std::vector<std::array<int, 2>> edges;          // sorted endpoint ids
  std::vector<std::array<int, 3>> element_edges;  // edge id per local edge
  std::vector<std::array<int, 2>> edge_elements;  // adjacent elements (-1 if boundary)
};
EdgeTable build_edge_table(const Mesh& mesh);

// n equal cells on (0,1); boundary parts "left" and "right".
Mesh generate_unit_interval(int n);

// n x n cells on (0,1)^2, each split along the diagonal from the lower-left
// to the upper-right corner; refinement edges sit on the hypotenuses so
// newest-vertex bisection terminates. Parts "bottom", "right", "top", "left".
Mesh generate_unit_square(int n);

// Greedy Doerfler (bulk) marking: smallest prefix of the elements sorted by
// decreasing indicator (ties towards lower id) whose sum reaches
// theta * sum(indicators). All-zero indicators mark element 0 as a fallback.
std::vector<int> dorfler_mark(const std::vector<double>& indicators, double theta);

// One refinement pass: every marked element is bisected at least once;
// newest-vertex bisection with recursive closure keeps the mesh conforming.
// The result carries parent links into `mesh`.
Mesh refine(const Mesh& mesh, const std::vector<int>& marked);

// Facet-incidence conformity check: interior facets shared by exactly two
// elements, single-incidence facets exactly the listed boundary facets,
// positive element volumes.
bool is_conforming(const Mesh& mesh);

// Plain-text dump: "dim n_vertices n_elements", vertex lines, element lines,
// boundary facet lines (vertex ids + part label).
std::string mesh_dump(const Mesh& mesh);

}  // namespace pminres
