#include "polyxfem/mvc.hpp"

#include <cmath>

namespace polyxfem {

namespace {

// Vertex / edge limit handling shared by value and gradient paths.
// Returns true when a limit applied and N is already filled.
bool boundary_limit(const Polygon& ring, const Vec2& x, double diam, Eigen::VectorXd& N) {
  const size_t n = ring.size();
  const double vtol = 1e-12 * diam;
  for (size_t i = 0; i < n; ++i) {
    if ((x - ring[i]).norm() <= vtol) {
      N.setZero(long(n));
      N[long(i)] = 1.0;
      return true;
    }
  }
  const double etol = 1e-9 * diam;
  for (size_t i = 0; i < n; ++i) {
    const size_t j = (i + 1) % n;
    double t = 0.0;
    if (segment_distance(x, ring[i], ring[j], &t) <= etol) {
      N.setZero(long(n));
      N[long(i)] = 1.0 - t;
      N[long(j)] = t;
      return true;
    }
  }
  return false;
}

}  // namespace

void mean_value_shape(const Polygon& ring, const Vec2& x, Eigen::VectorXd& N) {
  const size_t n = ring.size();
  const double diam = polygon_diameter(ring);
  if (boundary_limit(ring, x, diam, N)) return;

  std::vector<double> r(n), t(n);
  std::vector<Vec2> a(n);
  for (size_t i = 0; i < n; ++i) {
    a[i] = ring[i] - x;
    r[i] = a[i].norm();
  }
  for (size_t i = 0; i < n; ++i) {
    const size_t j = (i + 1) % n;
    // tan(alpha_i/2) in the division-safe form; Q -> 0 only on the segment
    // itself, which the edge limit above already intercepted.
    const double det = cross2(a[i], a[j]);
    const double q = r[i] * r[j] + a[i].dot(a[j]);
    t[i] = det / q;
  }
  N.resize(long(n));
  double wsum = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const size_t p = (i + n - 1) % n;
    const double w = (t[p] + t[i]) / r[i];
    N[long(i)] = w;
    wsum += w;
  }
  N /= wsum;
}

void mean_value_shape_grad(const Polygon& ring, const Vec2& x, Eigen::VectorXd& N,
                           Eigen::Matrix<double, Eigen::Dynamic, 2>& dN) {
  const size_t n = ring.size();
  const double diam = polygon_diameter(ring);
  if (boundary_limit(ring, x, diam, N)) {
    // Gradient from a point nudged inward; boundary gradients only back
    // diagnostic paths, production quadrature points are interior.
    const Vec2 c = polygon_centroid(ring);
    const Vec2 xin = x + 1e-7 * diam * (c - x).normalized();
    Eigen::VectorXd Nin;
    mean_value_shape_grad(ring, xin, Nin, dN);
    return;
  }

  std::vector<double> r(n), t(n);
  std::vector<Vec2> a(n), dr(n), dt(n);
  for (size_t i = 0; i < n; ++i) {
    a[i] = ring[i] - x;
    r[i] = a[i].norm();
    dr[i] = -a[i] / r[i];
  }
  for (size_t i = 0; i < n; ++i) {
    const size_t j = (i + 1) % n;
    const double det = cross2(a[i], a[j]);
    const double q = r[i] * r[j] + a[i].dot(a[j]);
    t[i] = det / q;
    const Vec2 ddet(ring[i].y() - ring[j].y(), ring[j].x() - ring[i].x());
    const Vec2 ddot = 2.0 * x - ring[i] - ring[j];
    const Vec2 dq = r[j] * dr[i] + r[i] * dr[j] + ddot;
    dt[i] = (ddet * q - det * dq) / (q * q);
  }
  N.resize(long(n));
  dN.resize(long(n), 2);
  std::vector<Vec2> dw(n);
  double wsum = 0.0;
  Vec2 dwsum = Vec2::Zero();
  for (size_t i = 0; i < n; ++i) {
    const size_t p = (i + n - 1) % n;
    const double w = (t[p] + t[i]) / r[i];
    N[long(i)] = w;
    dw[i] = (dt[p] + dt[i]) / r[i] - (w / r[i]) * dr[i];
    wsum += w;
    dwsum += dw[i];
  }
  for (size_t i = 0; i < n; ++i) {
    N[long(i)] /= wsum;
    const Vec2 g = (dw[i] - N[long(i)] * dwsum) / wsum;
    dN(long(i), 0) = g.x();
    dN(long(i), 1) = g.y();
  }
}

Polygon canonical_ngon(int n) {
  Polygon p;
  for (int k = 0; k < n; ++k) {
    const double th = M_PI / 2.0 + 2.0 * M_PI * k / n;
    p.emplace_back(std::cos(th), std::sin(th));
  }
  return p;
}

void isoparametric_map(const Polygon& ref, const Polygon& phys, const Vec2& xi,
                       Vec2& X, Eigen::Matrix2d& J0) {
  Eigen::VectorXd N;
  Eigen::Matrix<double, Eigen::Dynamic, 2> dN;
  mean_value_shape_grad(ref, xi, N, dN);
  X.setZero();
  J0.setZero();
  for (size_t i = 0; i < phys.size(); ++i) {
    X += N[long(i)] * phys[i];
    J0.col(0) += dN(long(i), 0) * phys[i];
    J0.col(1) += dN(long(i), 1) * phys[i];
  }
}

QuadratureScheme two_level_quadrature(const Polygon& phys_ring, int order) {
  const Polygon ref = canonical_ngon(int(phys_ring.size()));
  QuadratureScheme ref_scheme = scheme_over_tris(fan_triangulate(ref, Vec2::Zero()), order);
  QuadratureScheme s;
  for (size_t q = 0; q < ref_scheme.size(); ++q) {
    Vec2 X;
    Eigen::Matrix2d J0;
    isoparametric_map(ref, phys_ring, ref_scheme.points[q], X, J0);
    s.points.push_back(X);
    s.weights.push_back(ref_scheme.weights[q] * J0.determinant());
  }
  return s;
}

std::vector<Vec2> gradient_correction(const Polygon& ring, const QuadratureScheme& scheme) {
  const size_t n = ring.size();
  std::vector<Vec2> corr(n, Vec2::Zero());

  // Boundary term: N is linear on each straight edge segment, 4-pt Gauss is
  // well beyond exact.
  for (size_t e = 0; e < n; ++e) {
    const Vec2& a = ring[e];
    const Vec2& b = ring[(e + 1) % n];
    const Vec2 d = b - a;
    const Vec2 nrm = Vec2(d.y(), -d.x()).normalized();  // outward for CCW
    QuadratureScheme eg = edge_gauss(a, b, 4);
    for (size_t q = 0; q < eg.size(); ++q) {
      Eigen::VectorXd N;
      mean_value_shape(ring, eg.points[q], N);
      for (size_t i = 0; i < n; ++i) corr[i] += eg.weights[q] * N[long(i)] * nrm;
    }
  }
  // Interior term with the element's own scheme keeps the identity exact.
  for (size_t q = 0; q < scheme.size(); ++q) {
    Eigen::VectorXd N;
    Eigen::Matrix<double, Eigen::Dynamic, 2> dN;
    mean_value_shape_grad(ring, scheme.points[q], N, dN);
    for (size_t i = 0; i < n; ++i)
      corr[i] -= scheme.weights[q] * Vec2(dN(long(i), 0), dN(long(i), 1));
  }
  const double area = polygon_area(ring);
  for (auto& c : corr) c /= area;
  return corr;
}

}  // namespace polyxfem
