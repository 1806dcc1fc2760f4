#include "polyxfem/quadrature.hpp"

#include <cmath>

namespace polyxfem {

double QuadratureScheme::total() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {  // recurrence up to P_n
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
  }
}

void triangle_rule(int order, std::vector<Vec2>& points, std::vector<double>& weights) {
  // n-point Gauss per axis of the collapsed square integrates total degree
  // 2n-2 exactly on the triangle (the Duffy Jacobian raises the degree by 1).
  const int n = std::max(1, (order + 3) / 2);
  std::vector<double> gx, gw;
  gauss_legendre(n, gx, gw);
  points.clear();
  weights.clear();
  for (int i = 0; i < n; ++i) {
    const double u = 0.5 * (gx[i] + 1.0);
    const double wu = 0.5 * gw[i];
    for (int j = 0; j < n; ++j) {
      const double v = 0.5 * (gx[j] + 1.0);
      const double wv = 0.5 * gw[j];
      points.emplace_back(u, v * (1.0 - u));
      weights.push_back(wu * wv * (1.0 - u));
    }
  }
}

QuadratureScheme tri_scheme(const Tri& t, int order) {
  std::vector<Vec2> rp;
  std::vector<double> rw;
  triangle_rule(order, rp, rw);
  QuadratureScheme s;
  const double jac = 2.0 * t.area();  // reference triangle area is 1/2
  for (size_t q = 0; q < rp.size(); ++q) {
    s.points.push_back(t.a + rp[q].x() * (t.b - t.a) + rp[q].y() * (t.c - t.a));
    s.weights.push_back(rw[q] * jac);
  }
  return s;
}

QuadratureScheme scheme_over_tris(const std::vector<Tri>& tris, int order) {
  QuadratureScheme s;
  for (const auto& t : tris) {
    QuadratureScheme ts = tri_scheme(t, order);
    s.points.insert(s.points.end(), ts.points.begin(), ts.points.end());
    s.weights.insert(s.weights.end(), ts.weights.begin(), ts.weights.end());
  }
  return s;
}

QuadratureScheme triangulate_quadrature(const Polygon& poly, int order) {
  return scheme_over_tris(triangulate(poly), order);
}

QuadratureScheme edge_gauss(const Vec2& a, const Vec2& b, int n) {
  std::vector<double> gx, gw;
  gauss_legendre(n, gx, gw);
  QuadratureScheme s;
  const double half_len = 0.5 * (b - a).norm();
  for (int i = 0; i < n; ++i) {
    s.points.push_back(0.5 * (a + b) + 0.5 * gx[i] * (b - a));
    s.weights.push_back(gw[i] * half_len);
  }
  return s;
}

}  // namespace polyxfem
