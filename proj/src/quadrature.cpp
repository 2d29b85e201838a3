#include "pminres/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace pminres {

namespace {

QuadRule gauss1d(int npts, int degree) {
  QuadRule r;
  r.dim = 1;
  r.degree = degree;
  auto add = [&](double x, double w) {
    r.points.push_back({1.0 - x, x, 0.0});
    r.weights.push_back(w);
  };
  switch (npts) {
    case 1:
      add(0.5, 1.0);
      break;
    case 2: {
      double d = 0.5 / std::sqrt(3.0);
      add(0.5 - d, 0.5);
      add(0.5 + d, 0.5);
      break;
    }
    case 3: {
      double d = 0.5 * std::sqrt(3.0 / 5.0);
      add(0.5 - d, 5.0 / 18.0);
      add(0.5, 4.0 / 9.0);
      add(0.5 + d, 5.0 / 18.0);
      break;
    }
    case 4: {
      double a = std::sqrt((3.0 - 2.0 * std::sqrt(6.0 / 5.0)) / 7.0);
      double b = std::sqrt((3.0 + 2.0 * std::sqrt(6.0 / 5.0)) / 7.0);
      double wa = (18.0 + std::sqrt(30.0)) / 72.0;  // half of the (-1,1) weight
      double wb = (18.0 - std::sqrt(30.0)) / 72.0;
      add(0.5 * (1.0 - b), wb);
      add(0.5 * (1.0 - a), wa);
      add(0.5 * (1.0 + a), wa);
      add(0.5 * (1.0 + b), wb);
      break;
    }
    default:
      throw std::invalid_argument("unsupported 1d rule size");
  }
  return r;
}

void orbit3(QuadRule& r, double a, double b, double w) {
  // permutations of (a, b, b)
  r.points.push_back({a, b, b});
  r.points.push_back({b, a, b});
  r.points.push_back({b, b, a});
  r.weights.insert(r.weights.end(), 3, w);
}

void orbit6(QuadRule& r, double a, double b, double c, double w) {
  r.points.push_back({a, b, c});
  r.points.push_back({a, c, b});
  r.points.push_back({b, a, c});
  r.points.push_back({b, c, a});
  r.points.push_back({c, a, b});
  r.points.push_back({c, b, a});
  r.weights.insert(r.weights.end(), 6, w);
}

QuadRule triangle_rule(int degree) {
  QuadRule r;
  r.dim = 2;
  switch (degree) {
    case 1:
      r.degree = 1;
      r.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
      r.weights.push_back(0.5);
      break;
    case 2:
      r.degree = 2;
      orbit3(r, 0.0, 0.5, 1.0 / 6.0);  // edge midpoints
      break;
    case 3:  // smallest positive-weight rule of degree >= 3
    case 4:
      r.degree = 4;
      orbit3(r, 0.816847572980459, 0.091576213509771, 0.5 * 0.109951743655322);
      orbit3(r, 0.108103018168070, 0.445948490915965, 0.5 * 0.223381589678011);
      break;
    case 5:
      r.degree = 5;
      r.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
      r.weights.push_back(0.5 * 0.225);
      orbit3(r, 0.059715871789770, 0.470142064105115, 0.5 * 0.132394152788506);
      orbit3(r, 0.797426985353087, 0.101286507323456, 0.5 * 0.125939180544827);
      break;
    case 6:
      r.degree = 6;
      orbit3(r, 0.873821971016996, 0.063089014491502, 0.5 * 0.050844906370207);
      orbit3(r, 0.501426509658179, 0.249286745170910, 0.5 * 0.116786275726379);
      orbit6(r, 0.636502499121399, 0.310352451033785, 0.053145049844816, 0.5 * 0.082851075618374);
      break;
    default:
      throw std::invalid_argument("unsupported triangle rule degree");
  }
  return r;
}

}  // namespace

QuadRule quad_rule(int dim, int degree) {
  if (degree < 1) throw std::invalid_argument("rule degree must be positive");
  if (dim == 1) {
    if (degree > 7) throw std::invalid_argument("unsupported 1d rule degree");
    int npts = (degree + 2) / 2;  // Gauss: n points are exact to 2n-1
    return gauss1d(npts, 2 * npts - 1);
  }
  if (dim == 2) {
    if (degree > 6) throw std::invalid_argument("unsupported triangle rule degree");
    return triangle_rule(degree);
  }
  throw std::invalid_argument("dim must be 1 or 2");
}

QuadRule default_quad(int dim) { return quad_rule(dim, 4); }

}  // namespace pminres
