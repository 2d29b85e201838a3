#include "pminres/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <stdexcept>

namespace pminres {

ElemGeom element_geometry(const Mesh& mesh, int e) {
  ElemGeom g;
  const auto& el = mesh.elements[e];
  const auto& v0 = mesh.vertices[el[0]];
  g.x0 = v0;
  if (mesh.dim == 1) {
    double h = mesh.vertices[el[1]][0] - v0[0];
    g.J[0][0] = h;
    g.invJT[0][0] = 1.0 / h;
    g.detJ = h;
  } else {
    const auto& v1 = mesh.vertices[el[1]];
    const auto& v2 = mesh.vertices[el[2]];
    g.J[0][0] = v1[0] - v0[0];
    g.J[1][0] = v1[1] - v0[1];
    g.J[0][1] = v2[0] - v0[0];
    g.J[1][1] = v2[1] - v0[1];
    g.detJ = g.J[0][0] * g.J[1][1] - g.J[0][1] * g.J[1][0];
    double inv = 1.0 / g.detJ;
    // J^{-1} = adj(J)/det, transposed below
    g.invJT[0][0] = g.J[1][1] * inv;
    g.invJT[1][0] = -g.J[0][1] * inv;
    g.invJT[0][1] = -g.J[1][0] * inv;
    g.invJT[1][1] = g.J[0][0] * inv;
  }
  return g;
}

double element_volume(const Mesh& mesh, int e) {
  ElemGeom g = element_geometry(mesh, e);
  return mesh.dim == 1 ? std::abs(g.detJ) : 0.5 * std::abs(g.detJ);
}

double total_volume(const Mesh& mesh) {
  double s = 0.0;
  for (int e = 0; e < mesh.n_elements(); ++e) s += element_volume(mesh, e);
  return s;
}

double element_diameter(const Mesh& mesh, int e) {
  const auto& el = mesh.elements[e];
  if (mesh.dim == 1)
    return std::abs(mesh.vertices[el[1]][0] - mesh.vertices[el[0]][0]);
  double d = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b) {
      const auto& p = mesh.vertices[el[a]];
      const auto& q = mesh.vertices[el[b]];
      d = std::max(d, std::hypot(p[0] - q[0], p[1] - q[1]));
    }
  return d;
}

std::array<double, 2> map_to_physical(const Mesh& mesh, int e, const std::array<double, 2>& ref) {
  ElemGeom g = element_geometry(mesh, e);
  if (mesh.dim == 1) return {g.x0[0] + g.J[0][0] * ref[0], 0.0};
  return {g.x0[0] + g.J[0][0] * ref[0] + g.J[0][1] * ref[1],
          g.x0[1] + g.J[1][0] * ref[0] + g.J[1][1] * ref[1]};
}

std::array<double, 2> map_to_reference(const Mesh& mesh, int e, const std::array<double, 2>& x) {
  ElemGeom g = element_geometry(mesh, e);
  if (mesh.dim == 1) return {(x[0] - g.x0[0]) / g.J[0][0], 0.0};
  double rx = x[0] - g.x0[0], ry = x[1] - g.x0[1];
  double inv = 1.0 / g.detJ;
  return {inv * (g.J[1][1] * rx - g.J[0][1] * ry),
          inv * (-g.J[1][0] * rx + g.J[0][0] * ry)};
}

EdgeTable build_edge_table(const Mesh& mesh) {
  if (mesh.dim != 2) throw std::logic_error("edge table requires a 2d mesh");
  EdgeTable et;
  et.element_edges.resize(mesh.n_elements());
  std::map<std::array<int, 2>, int> ids;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto& el = mesh.elements[e];
    for (int k = 0; k < 3; ++k) {
      int a = el[k], b = el[(k + 1) % 3];
      std::array<int, 2> key{std::min(a, b), std::max(a, b)};
      auto it = ids.find(key);
      int id;
      if (it == ids.end()) {
        id = static_cast<int>(et.edges.size());
        ids.emplace(key, id);
        et.edges.push_back(key);
        et.edge_elements.push_back({e, -1});
      } else {
        id = it->second;
        if (et.edge_elements[id][1] != -1)
          throw std::runtime_error("edge shared by more than two elements");
        et.edge_elements[id][1] = e;
      }
      et.element_edges[e][k] = id;
    }
  }
  return et;
}

Mesh generate_unit_interval(int n) {
  if (n < 1) throw std::invalid_argument("need at least one cell");
  Mesh m;
  m.dim = 1;
  m.vertices.resize(n + 1);
  for (int i = 0; i <= n; ++i) m.vertices[i] = {static_cast<double>(i) / n, 0.0};
  m.elements.resize(n);
  for (int i = 0; i < n; ++i) m.elements[i] = {i, i + 1, -1};
  m.boundary_facets.push_back({{0, -1}, "left"});
  m.boundary_facets.push_back({{n, -1}, "right"});
  return m;
}

Mesh generate_unit_square(int n) {
  if (n < 1) throw std::invalid_argument("need at least one cell");
  Mesh m;
  m.dim = 2;
  auto vid = [n](int i, int j) { return j * (n + 1) + i; };
  m.vertices.resize((n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      m.vertices[vid(i, j)] = {static_cast<double>(i) / n, static_cast<double>(j) / n};
  // two triangles per cell, diagonal from lower-left to upper-right;
  // vertices ordered so the hypotenuse is the local edge (v0, v1)
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      int a = vid(i, j), b = vid(i + 1, j), c = vid(i + 1, j + 1), d = vid(i, j + 1);
      m.elements.push_back({c, a, b});
      m.elements.push_back({a, c, d});
      m.refinement_edge.push_back(0);
      m.refinement_edge.push_back(0);
    }
  for (int i = 0; i < n; ++i) m.boundary_facets.push_back({{vid(i, 0), vid(i + 1, 0)}, "bottom"});
  for (int j = 0; j < n; ++j) m.boundary_facets.push_back({{vid(n, j), vid(n, j + 1)}, "right"});
  for (int i = 0; i < n; ++i) m.boundary_facets.push_back({{vid(i, n), vid(i + 1, n)}, "top"});
  for (int j = 0; j < n; ++j) m.boundary_facets.push_back({{vid(0, j), vid(0, j + 1)}, "left"});
  return m;
}

std::vector<int> dorfler_mark(const std::vector<double>& indicators, double theta) {
  if (indicators.empty()) throw std::invalid_argument("no indicators");
  if (!(theta > 0.0) || theta > 1.0) throw std::invalid_argument("theta must lie in (0,1]");
  double total = 0.0;
  for (double v : indicators) {
    if (v < 0.0 || !std::isfinite(v)) throw std::invalid_argument("indicators must be non-negative");
    total += v;
  }
  if (total == 0.0) return {0};

  std::vector<int> order(indicators.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (indicators[a] != indicators[b]) return indicators[a] > indicators[b];
    return a < b;
  });
  std::vector<int> marked;
  double acc = 0.0;
  for (int id : order) {
    marked.push_back(id);
    acc += indicators[id];
    if (acc >= theta * total) break;
  }
  return marked;
}

namespace {

void validate_marked(const Mesh& mesh, const std::vector<int>& marked) {
  for (int id : marked)
    if (id < 0 || id >= mesh.n_elements()) throw std::invalid_argument("marked element id out of range");
}

Mesh refine1d(const Mesh& mesh, const std::vector<int>& marked) {
  std::vector<char> split(mesh.n_elements(), 0);
  for (int id : marked) split[id] = 1;
  Mesh out;
  out.dim = 1;
  out.vertices = mesh.vertices;
  out.boundary_facets = mesh.boundary_facets;  // vertex ids are stable
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto& el = mesh.elements[e];
    if (!split[e]) {
      out.elements.push_back(el);
      out.parent.push_back({e, 0});
      continue;
    }
    int mid = out.n_vertices();
    out.vertices.push_back({0.5 * (mesh.vertices[el[0]][0] + mesh.vertices[el[1]][0]), 0.0});
    out.elements.push_back({el[0], mid, -1});
    out.parent.push_back({e, 0});
    out.elements.push_back({mid, el[1], -1});
    out.parent.push_back({e, 1});
  }
  return out;
}

Mesh refine2d(const Mesh& mesh, const std::vector<int>& marked) {
  EdgeTable et = build_edge_table(mesh);
  int ne = mesh.n_elements();
  std::vector<char> edge_marked(et.edges.size(), 0);
  for (int id : marked) edge_marked[et.element_edges[id][mesh.refinement_edge[id]]] = 1;

  // closure: whenever any edge of an element is split, its refinement edge
  // must be split as well (bisections always start there)
  bool changed = true;
  int guard = 0;
  while (changed) {
    if (++guard > static_cast<int>(et.edges.size()) + 2)
      throw std::runtime_error("refinement closure failed to terminate");
    changed = false;
    for (int e = 0; e < ne; ++e) {
      int re = et.element_edges[e][mesh.refinement_edge[e]];
      if (edge_marked[re]) continue;
      for (int k = 0; k < 3; ++k)
        if (edge_marked[et.element_edges[e][k]]) {
          edge_marked[re] = 1;
          changed = true;
          break;
        }
    }
  }

  Mesh out;
  out.dim = 2;
  out.vertices = mesh.vertices;
  std::vector<int> midpoint(et.edges.size(), -1);
  for (size_t ed = 0; ed < et.edges.size(); ++ed) {
    if (!edge_marked[ed]) continue;
    const auto& pq = et.edges[ed];
    midpoint[ed] = out.n_vertices();
    out.vertices.push_back({0.5 * (mesh.vertices[pq[0]][0] + mesh.vertices[pq[1]][0]),
                            0.5 * (mesh.vertices[pq[0]][1] + mesh.vertices[pq[1]][1])});
  }

  for (int e = 0; e < ne; ++e) {
    int k = mesh.refinement_edge[e];
    const auto& el = mesh.elements[e];
    int a = el[k], b = el[(k + 1) % 3], c = el[(k + 2) % 3];
    int m_ab = midpoint[et.element_edges[e][k]];
    int m_bc = midpoint[et.element_edges[e][(k + 1) % 3]];
    int m_ca = midpoint[et.element_edges[e][(k + 2) % 3]];
    int slot = 0;
    auto push = [&](int p, int q, int r) {
      out.elements.push_back({p, q, r});
      out.refinement_edge.push_back(0);  // children keep their refinement edge first
      out.parent.push_back({e, slot++});
    };
    if (m_ab == -1) {
      out.elements.push_back(el);
      out.refinement_edge.push_back(k);
      out.parent.push_back({e, 0});
      continue;
    }
    // bisect (a,b,c) at the refinement edge (a,b): children (c,a,m), (b,c,m),
    // each with the opposite old edge as its new refinement edge
    if (m_ca == -1)
      push(c, a, m_ab);
    else {
      push(m_ab, c, m_ca);
      push(a, m_ab, m_ca);
    }
    if (m_bc == -1)
      push(b, c, m_ab);
    else {
      push(m_ab, b, m_bc);
      push(c, m_ab, m_bc);
    }
  }

  std::map<std::array<int, 2>, int> edge_ids;
  for (size_t ed = 0; ed < et.edges.size(); ++ed) edge_ids[et.edges[ed]] = static_cast<int>(ed);
  for (const auto& f : mesh.boundary_facets) {
    std::array<int, 2> key{std::min(f.v[0], f.v[1]), std::max(f.v[0], f.v[1])};
    int ed = edge_ids.at(key);
    if (midpoint[ed] == -1) {
      out.boundary_facets.push_back(f);
    } else {
      out.boundary_facets.push_back({{f.v[0], midpoint[ed]}, f.part});
      out.boundary_facets.push_back({{midpoint[ed], f.v[1]}, f.part});
    }
  }
  return out;
}

}  // namespace

Mesh refine(const Mesh& mesh, const std::vector<int>& marked) {
  validate_marked(mesh, marked);
  return mesh.dim == 1 ? refine1d(mesh, marked) : refine2d(mesh, marked);
}

bool is_conforming(const Mesh& mesh) {
  for (int e = 0; e < mesh.n_elements(); ++e) {
    ElemGeom g = element_geometry(mesh, e);
    if (!(g.detJ > 0.0)) return false;
    for (int k = 0; k < mesh.verts_per_element(); ++k) {
      int v = mesh.elements[e][k];
      if (v < 0 || v >= mesh.n_vertices()) return false;
    }
  }
  if (mesh.dim == 1) {
    std::vector<int> incidence(mesh.n_vertices(), 0);
    for (int e = 0; e < mesh.n_elements(); ++e) {
      incidence[mesh.elements[e][0]]++;
      incidence[mesh.elements[e][1]]++;
    }
    std::vector<int> boundary;
    for (int v = 0; v < mesh.n_vertices(); ++v) {
      if (incidence[v] == 1)
        boundary.push_back(v);
      else if (incidence[v] != 2 && incidence[v] != 0)
        return false;
    }
    if (boundary.size() != mesh.boundary_facets.size()) return false;
    std::vector<int> listed;
    for (auto& f : mesh.boundary_facets) listed.push_back(f.v[0]);
    std::sort(listed.begin(), listed.end());
    return listed == boundary;
  }
  std::map<std::array<int, 2>, int> count;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto& el = mesh.elements[e];
    for (int k = 0; k < 3; ++k) {
      int a = el[k], b = el[(k + 1) % 3];
      count[{std::min(a, b), std::max(a, b)}]++;
    }
  }
  std::vector<std::array<int, 2>> single;
  for (auto& [key, c] : count) {
    if (c == 1)
      single.push_back(key);
    else if (c != 2)
      return false;
  }
  std::vector<std::array<int, 2>> listed;
  for (auto& f : mesh.boundary_facets)
    listed.push_back({std::min(f.v[0], f.v[1]), std::max(f.v[0], f.v[1])});
  std::sort(listed.begin(), listed.end());
  std::sort(single.begin(), single.end());
  return listed == single;
}

std::string mesh_dump(const Mesh& mesh) {
  std::string s;
  char buf[128];
  auto num = [&](double x) {
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return std::string(buf);
  };
  s += std::to_string(mesh.dim) + " " + std::to_string(mesh.n_vertices()) + " " +
       std::to_string(mesh.n_elements()) + "\n";
  for (const auto& v : mesh.vertices) {
    s += num(v[0]);
    if (mesh.dim == 2) s += " " + num(v[1]);
    s += "\n";
  }
  for (const auto& el : mesh.elements) {
    s += std::to_string(el[0]) + " " + std::to_string(el[1]);
    if (mesh.dim == 2) s += " " + std::to_string(el[2]);
    s += "\n";
  }
  for (const auto& f : mesh.boundary_facets) {
    s += std::to_string(f.v[0]);
    if (mesh.dim == 2) s += " " + std::to_string(f.v[1]);
    s += " " + f.part + "\n";
  }
  return s;
}

}  // namespace pminres
