#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "pminres/mesh.hpp"

using namespace pminres;

namespace {

double min_angle(const Mesh& m, int e) {
  auto& el = m.elements[e];
  double best = 4.0;
  for (int k = 0; k < 3; ++k) {
    auto a = m.vertices[el[k]];
    auto b = m.vertices[el[(k + 1) % 3]];
    auto c = m.vertices[el[(k + 2) % 3]];
    double ux = b[0] - a[0], uy = b[1] - a[1];
    double vx = c[0] - a[0], vy = c[1] - a[1];
    double ang = std::acos((ux * vx + uy * vy) /
                           (std::hypot(ux, uy) * std::hypot(vx, vy)));
    best = std::min(best, ang);
  }
  return best;
}

}  // namespace

TEST_CASE("unit interval generation") {
  Mesh m = generate_unit_interval(4);
  REQUIRE(m.dim == 1);
  REQUIRE(m.n_vertices() == 5);
  REQUIRE(m.n_elements() == 4);
  const double expect[] = {0.0, 0.25, 0.5, 0.75, 1.0};
  for (int i = 0; i < 5; ++i) CHECK(m.vertices[i][0] == doctest::Approx(expect[i]).epsilon(1e-15));
  for (int e = 0; e < 4; ++e) {
    CHECK(m.elements[e][0] == e);
    CHECK(m.elements[e][1] == e + 1);
    CHECK(element_volume(m, e) == doctest::Approx(0.25).epsilon(1e-14));
  }
  REQUIRE(m.boundary_facets.size() == 2);
  CHECK(m.boundary_facets[0].v[0] == 0);
  CHECK(m.boundary_facets[0].part == "left");
  CHECK(m.boundary_facets[1].v[0] == 4);
  CHECK(m.boundary_facets[1].part == "right");
  CHECK(is_conforming(m));
  CHECK(total_volume(m) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("unit square generation") {
  Mesh m = generate_unit_square(2);
  REQUIRE(m.dim == 2);
  CHECK(m.n_vertices() == 9);
  CHECK(m.n_elements() == 8);
  CHECK(m.boundary_facets.size() == 8);
  for (int e = 0; e < m.n_elements(); ++e) {
    CHECK(element_volume(m, e) == doctest::Approx(0.125).epsilon(1e-14));
    // right isoceles cells: smallest angle is 45 degrees
    CHECK(min_angle(m, e) == doctest::Approx(M_PI / 4).epsilon(1e-12));
  }
  CHECK(total_volume(m) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(is_conforming(m));
  // each side contributes n facets
  int counts[4] = {0, 0, 0, 0};
  for (auto& f : m.boundary_facets) {
    if (f.part == "bottom") counts[0]++;
    if (f.part == "right") counts[1]++;
    if (f.part == "top") counts[2]++;
    if (f.part == "left") counts[3]++;
  }
  for (int k = 0; k < 4; ++k) CHECK(counts[k] == 2);
}

TEST_CASE("element geometry maps") {
  Mesh m = generate_unit_square(2);
  for (int e = 0; e < m.n_elements(); ++e) {
    // reference centroid maps to physical centroid and back
    std::array<double, 2> ref{1.0 / 3.0, 1.0 / 3.0};
    auto x = map_to_physical(m, e, ref);
    auto back = map_to_reference(m, e, x);
    CHECK(back[0] == doctest::Approx(ref[0]).epsilon(1e-14));
    CHECK(back[1] == doctest::Approx(ref[1]).epsilon(1e-14));
    auto& el = m.elements[e];
    double cx = (m.vertices[el[0]][0] + m.vertices[el[1]][0] + m.vertices[el[2]][0]) / 3.0;
    CHECK(x[0] == doctest::Approx(cx).epsilon(1e-14));
  }
}

TEST_CASE("doerfler marking enumerations") {
  // hand-checked: total 8, theta*total = 4.8; prefix 3 -> 3+2 = 5 >= 4.8
  auto marked = dorfler_mark({3.0, 2.0, 2.0, 1.0}, 0.6);
  REQUIRE(marked.size() == 2);
  CHECK(marked[0] == 0);
  CHECK(marked[1] == 1);

  // tie at the top: lower id first
  marked = dorfler_mark({2.0, 3.0, 3.0}, 0.5);
  REQUIRE(marked.size() == 2);
  CHECK(marked[0] == 1);
  CHECK(marked[1] == 2);

  // theta = 1 marks everything with mass
  marked = dorfler_mark({1.0, 1.0, 1.0, 1.0}, 1.0);
  CHECK(marked.size() == 4);

  // all-zero fallback
  marked = dorfler_mark({0.0, 0.0, 0.0}, 0.5);
  REQUIRE(marked.size() == 1);
  CHECK(marked[0] == 0);

  CHECK_THROWS(dorfler_mark({}, 0.5));
  CHECK_THROWS(dorfler_mark({1.0, -0.5}, 0.5));
  CHECK_THROWS(dorfler_mark({1.0}, 0.0));
  CHECK_THROWS(dorfler_mark({1.0}, 1.5));
}

TEST_CASE("doerfler bulk inequality and minimality (randomized)") {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    int n = 1 + static_cast<int>(dist(rng) * 40);
    std::vector<double> ind(n);
    for (auto& v : ind) v = dist(rng);
    double theta = 0.05 + 0.9 * dist(rng);
    auto marked = dorfler_mark(ind, theta);
    double total = 0.0;
    for (double v : ind) total += v;
    double got = 0.0;
    for (int id : marked) got += ind[id];
    CHECK(got >= theta * total - 1e-12 * total);
    if (marked.size() > 1) {
      // dropping the smallest marked indicator must break the bulk bound
      double weakest = ind[marked[0]];
      for (int id : marked) weakest = std::min(weakest, ind[id]);
      CHECK(got - weakest < theta * total);
    }
  }
}

TEST_CASE("1d refinement splits marked cells at midpoints") {
  Mesh m = generate_unit_interval(4);
  Mesh r = refine(m, {1});
  REQUIRE(r.n_elements() == 5);
  REQUIRE(r.n_vertices() == 6);
  CHECK(r.vertices[5][0] == doctest::Approx(0.375).epsilon(1e-15));
  CHECK(is_conforming(r));
  CHECK(total_volume(r) == doctest::Approx(1.0).epsilon(1e-14));
  // parent links: two children of element 1, others copied
  int children_of_1 = 0;
  for (auto& p : r.parent)
    if (p.parent == 1) children_of_1++;
  CHECK(children_of_1 == 2);
  // boundary facets survive
  REQUIRE(r.boundary_facets.size() == 2);
  CHECK(r.boundary_facets[0].part == "left");
}

TEST_CASE("2d refinement of both initial triangles") {
  Mesh m = generate_unit_square(1);
  Mesh r = refine(m, {0, 1});
  CHECK(r.n_elements() == 4);  // shared hypotenuse: one bisection each
  CHECK(is_conforming(r));
  CHECK(total_volume(r) == doctest::Approx(1.0).epsilon(1e-14));
  for (int e = 0; e < r.n_elements(); ++e)
    CHECK(min_angle(r, e) == doctest::Approx(M_PI / 4).epsilon(1e-12));
}

TEST_CASE("2d single-element refinement stays conforming via closure") {
  Mesh m = generate_unit_square(2);
  Mesh r = refine(m, {3});
  CHECK(r.n_elements() > m.n_elements());
  CHECK(is_conforming(r));
  CHECK(total_volume(r) == doctest::Approx(1.0).epsilon(1e-13));
  // marked element got bisected: at least two children
  int kids = 0;
  for (auto& p : r.parent)
    if (p.parent == 3) kids++;
  CHECK(kids >= 2);
}

TEST_CASE("nvb keeps the right-isoceles shape class under random marking") {
  Mesh m = generate_unit_square(2);
  std::mt19937 rng(7);
  for (int round = 0; round < 6; ++round) {
    std::vector<int> marked;
    std::uniform_int_distribution<int> pick(0, m.n_elements() - 1);
    std::set<int> chosen;
    int nmark = 1 + round % 3;
    while (static_cast<int>(chosen.size()) < nmark) chosen.insert(pick(rng));
    marked.assign(chosen.begin(), chosen.end());
    Mesh r = refine(m, marked);
    REQUIRE(is_conforming(r));
    CHECK(total_volume(r) == doctest::Approx(1.0).epsilon(1e-12));
    for (int e = 0; e < r.n_elements(); ++e)
      CHECK(min_angle(r, e) == doctest::Approx(M_PI / 4).epsilon(1e-10));
    // every refined-mesh element knows its parent
    for (auto& p : r.parent) {
      REQUIRE(p.parent >= 0);
      REQUIRE(p.parent < m.n_elements());
    }
    m = std::move(r);
  }
  CHECK(m.n_elements() > 8);
}

TEST_CASE("refine rejects bad element ids") {
  Mesh m = generate_unit_square(1);
  CHECK_THROWS(refine(m, {7}));
  CHECK_THROWS(refine(m, {-1}));
}

TEST_CASE("mesh dump golden strings") {
  Mesh m1 = generate_unit_interval(2);
  CHECK(mesh_dump(m1) ==
        "1 3 2\n"
        "0\n"
        "0.5\n"
        "1\n"
        "0 1\n"
        "1 2\n"
        "0 left\n"
        "2 right\n");

  Mesh m2 = generate_unit_square(1);
  CHECK(mesh_dump(m2) ==
        "2 4 2\n"
        "0 0\n"
        "1 0\n"
        "0 1\n"
        "1 1\n"
        "3 0 1\n"
        "0 3 2\n"
        "0 1 bottom\n"
        "1 3 right\n"
        "2 3 top\n"
        "0 2 left\n");
}

TEST_CASE("edge table adjacency") {
  Mesh m = generate_unit_square(1);
  EdgeTable et = build_edge_table(m);
  CHECK(et.edges.size() == 5);
  int boundary_edges = 0, interior_edges = 0;
  for (auto& adj : et.edge_elements) {
    if (adj[1] == -1)
      boundary_edges++;
    else
      interior_edges++;
  }
  CHECK(boundary_edges == 4);
  CHECK(interior_edges == 1);
}
