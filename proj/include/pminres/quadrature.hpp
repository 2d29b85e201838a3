#pragma once

#include <array>
#include <vector>

namespace pminres {

// Quadrature rule on the reference interval (0,1) or reference triangle
// {x,y >= 0, x+y <= 1}. Points are stored in barycentric coordinates
// ((1-x, x, 0) in 1d); weights are positive and sum to the reference
// measure (1 resp. 1/2).
struct QuadRule {
  int dim = 1;
  int degree = 0;  // declared polynomial exactness
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;

  int size() const { return static_cast<int>(weights.size()); }
  std::array<double, 2> cart(int q) const { return {points[q][1], points[q][2]}; }
};

// Smallest positive-weight rule of the requested exactness.
// Supported: degree <= 7 in 1d (Gauss), degree <= 6 on triangles.
QuadRule quad_rule(int dim, int degree);

// The fixed rule used for all nonlinear-weight integrals (degree 4; the
// 6-point rule on triangles, 3-point Gauss on intervals).
QuadRule default_quad(int dim);

}  // namespace pminres
