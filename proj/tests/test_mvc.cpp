#include <doctest.h>

#include <cmath>
#include <random>

#include "polyxfem/mvc.hpp"

using namespace polyxfem;

namespace {

// Interior sample by rejection against the polygon.
Vec2 interior_point(const Polygon& p, std::mt19937_64& rng) {
  Vec2 lo, hi;
  polygon_bbox(p, lo, hi);
  std::uniform_real_distribution<double> ux(lo.x(), hi.x()), uy(lo.y(), hi.y());
  const double diam = polygon_diameter(p);
  for (;;) {
    const Vec2 x(ux(rng), uy(rng));
    if (!point_in_polygon(x, p)) continue;
    bool clear = true;
    const size_t n = p.size();
    for (size_t i = 0; i < n && clear; ++i)
      if (segment_distance(x, p[i], p[(i + 1) % n]) < 1e-3 * diam) clear = false;
    if (clear) return x;
  }
}

std::vector<Polygon> test_rings() {
  Polygon pent;
  for (int k = 0; k < 5; ++k) {
    const double t = 0.3 + 2.0 * M_PI * k / 5.0;
    pent.emplace_back(1.3 * std::cos(t), 0.9 * std::sin(t));
  }
  // Concave polygon.
  Polygon ell = {{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}};
  // Quad with two collinear hanging vertices on the bottom edge.
  Polygon hang = {{0, 0}, {0.35, 0}, {0.7, 0}, {1, 0}, {1, 1}, {0, 1}};
  return {pent, ell, hang};
}

}  // namespace

TEST_CASE("mean value coordinates: partition of unity, linear completeness, positivity on convex") {
  std::mt19937_64 rng(11);
  for (const auto& ring : test_rings()) {
    for (int rep = 0; rep < 200; ++rep) {
      const Vec2 x = interior_point(ring, rng);
      Eigen::VectorXd N;
      Eigen::Matrix<double, Eigen::Dynamic, 2> dN;
      mean_value_shape_grad(ring, x, N, dN);
      CHECK(N.sum() == doctest::Approx(1.0).epsilon(1e-10));
      Vec2 rec = Vec2::Zero(), gsum = Vec2::Zero();
      Eigen::Matrix2d lin = Eigen::Matrix2d::Zero();
      for (size_t i = 0; i < ring.size(); ++i) {
        rec += N[long(i)] * ring[i];
        gsum += Vec2(dN(long(i), 0), dN(long(i), 1));
        lin += ring[i] * Vec2(dN(long(i), 0), dN(long(i), 1)).transpose();
      }
      CHECK((rec - x).norm() < 1e-10 * (1.0 + x.norm()));
      CHECK(gsum.norm() < 1e-10);
      CHECK((lin - Eigen::Matrix2d::Identity()).norm() < 1e-9);
    }
  }
  // Positivity holds on convex rings.
  const Polygon pent = test_rings()[0];
  for (int rep = 0; rep < 100; ++rep) {
    Eigen::VectorXd N;
    mean_value_shape(pent, interior_point(pent, rng), N);
    for (long i = 0; i < N.size(); ++i) CHECK(N[i] >= 0.0);
  }
}

TEST_CASE("mean value coordinates: Kronecker at vertices and linear edge trace") {
  for (const auto& ring : test_rings()) {
    const size_t n = ring.size();
    for (size_t i = 0; i < n; ++i) {
      Eigen::VectorXd N;
      mean_value_shape(ring, ring[i], N);
      for (size_t j = 0; j < n; ++j)
        CHECK(N[long(j)] == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
    }
    for (size_t i = 0; i < n; ++i) {
      const size_t j = (i + 1) % n;
      const Vec2 x = 0.25 * ring[i] + 0.75 * ring[j];
      Eigen::VectorXd N;
      mean_value_shape(ring, x, N);
      CHECK(N[long(i)] == doctest::Approx(0.25).epsilon(1e-9));
      CHECK(N[long(j)] == doctest::Approx(0.75).epsilon(1e-9));
    }
  }
}

TEST_CASE("mean value gradients match central differences") {
  std::mt19937_64 rng(7);
  for (const auto& ring : test_rings()) {
    const double h = 1e-6 * polygon_diameter(ring);
    for (int rep = 0; rep < 60; ++rep) {
      const Vec2 x = interior_point(ring, rng);
      Eigen::VectorXd N, Nxp, Nxm, Nyp, Nym;
      Eigen::Matrix<double, Eigen::Dynamic, 2> dN;
      mean_value_shape_grad(ring, x, N, dN);
      mean_value_shape(ring, x + Vec2(h, 0), Nxp);
      mean_value_shape(ring, x - Vec2(h, 0), Nxm);
      mean_value_shape(ring, x + Vec2(0, h), Nyp);
      mean_value_shape(ring, x - Vec2(0, h), Nym);
      for (size_t i = 0; i < ring.size(); ++i) {
        const double fdx = (Nxp[long(i)] - Nxm[long(i)]) / (2.0 * h);
        const double fdy = (Nyp[long(i)] - Nym[long(i)]) / (2.0 * h);
        const double scale = 1.0 + std::abs(fdx) + std::abs(fdy);
        CHECK(std::abs(dN(long(i), 0) - fdx) / scale < 1e-6);
        CHECK(std::abs(dN(long(i), 1) - fdy) / scale < 1e-6);
      }
    }
  }
}

TEST_CASE("gradient correction closes the divergence identity per element") {
  for (const auto& ring : test_rings()) {
    QuadratureScheme s = triangulate_quadrature(ring, 3);
    const auto corr = gradient_correction(ring, s);
    // After correction, the volume integral of each corrected gradient equals
    // the boundary integral of N n by construction; re-check independently.
    const size_t n = ring.size();
    std::vector<Vec2> vol(n, Vec2::Zero()), sur(n, Vec2::Zero());
    for (size_t q = 0; q < s.size(); ++q) {
      Eigen::VectorXd N;
      Eigen::Matrix<double, Eigen::Dynamic, 2> dN;
      mean_value_shape_grad(ring, s.points[q], N, dN);
      for (size_t i = 0; i < n; ++i)
        vol[i] += s.weights[q] * (Vec2(dN(long(i), 0), dN(long(i), 1)) + corr[i]);
    }
    for (size_t e = 0; e < n; ++e) {
      const Vec2 &a = ring[e], &b = ring[(e + 1) % n];
      const Vec2 d = b - a;
      const Vec2 nrm = Vec2(d.y(), -d.x()).normalized();
      QuadratureScheme eg = edge_gauss(a, b, 4);
      for (size_t q = 0; q < eg.size(); ++q) {
        Eigen::VectorXd N;
        mean_value_shape(ring, eg.points[q], N);
        for (size_t i = 0; i < n; ++i) sur[i] += eg.weights[q] * N[long(i)] * nrm;
      }
    }
    double worst = 0.0;
    for (size_t i = 0; i < n; ++i) worst = std::max(worst, (vol[i] - sur[i]).norm());
    CHECK(worst < 1e-13 * polygon_diameter(ring));
    // Corrections sum to zero over the ring.
    Vec2 csum = Vec2::Zero();
    for (const auto& c : corr) csum += c;
    CHECK(csum.norm() < 1e-12);
  }
}

TEST_CASE("canonical n-gon map reproduces ring vertices and positive Jacobian") {
  // Pentagon that absorbed one mid-edge node becomes a 6-ring; its canonical
  // element is the regular hexagon.
  Polygon phys = {{0, 0}, {1, 0}, {2, 0.1}, {2.2, 1.4}, {1.0, 2.1}, {-0.2, 1.2}};
  const Polygon ref = canonical_ngon(6);
  for (size_t i = 0; i < phys.size(); ++i) {
    Vec2 X;
    Eigen::Matrix2d J0;
    isoparametric_map(ref, phys, ref[i], X, J0);
    CHECK((X - phys[i]).norm() < 1e-9);
  }
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 50; ++rep) {
    const Vec2 xi = interior_point(ref, rng);
    Vec2 X;
    Eigen::Matrix2d J0;
    isoparametric_map(ref, phys, xi, X, J0);
    CHECK(J0.determinant() > 0.0);
    CHECK(point_in_polygon(X, phys));
  }
}

TEST_CASE("two-level and one-level quadrature agree on affine data") {
  Polygon phys;
  for (int k = 0; k < 7; ++k) {
    const double t = 0.15 + 2.0 * M_PI * k / 7.0;
    phys.emplace_back(1.2 * std::cos(t) + 0.4, 0.8 * std::sin(t) + 0.2);
  }
  QuadratureScheme two = two_level_quadrature(phys, 3);
  QuadratureScheme one = triangulate_quadrature(phys, 3);
  CHECK(two.total() == doctest::Approx(one.total()).epsilon(1e-10));
  const auto lin = [](const Vec2& p) { return 0.7 - 1.3 * p.x() + 2.1 * p.y(); };
  double a = 0.0, b = 0.0;
  for (size_t q = 0; q < two.size(); ++q) a += two.weights[q] * lin(two.points[q]);
  for (size_t q = 0; q < one.size(); ++q) b += one.weights[q] * lin(one.points[q]);
  CHECK(a == doctest::Approx(b).epsilon(1e-9));
}
