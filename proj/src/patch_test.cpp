#include "polyxfem/patch_test.hpp"

#include <Eigen/Sparse>
#include <set>
#include <vector>

#include "polyxfem/material.hpp"
#include "polyxfem/mvc.hpp"

namespace polyxfem {

PatchTestResult run_patch_test(const PolyMesh& mesh, const Eigen::Matrix2d& A, bool corrected,
                               int quad_order) {
  const Material mat = Material::linear(1.0, 0.3);
  const Eigen::Matrix3d D = mat.evaluate(Eigen::Matrix2d::Identity()).tangent;
  const int nn = mesh.n_nodes();
  const int ndof = 2 * nn;

  std::vector<Eigen::Triplet<double>> trips;
  for (int e = 0; e < mesh.n_elems(); ++e) {
    const auto& ring = mesh.elems[size_t(e)];
    const Polygon poly = mesh.element_polygon(e);
    const QuadratureScheme scheme = triangulate_quadrature(poly, quad_order);
    const std::vector<Vec2> corr =
        corrected ? gradient_correction(poly, scheme) : std::vector<Vec2>(ring.size(), Vec2::Zero());

    const int n = int(ring.size());
    Eigen::MatrixXd Ke = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    Eigen::VectorXd N;
    Eigen::Matrix<double, Eigen::Dynamic, 2> dN;
    for (size_t q = 0; q < scheme.size(); ++q) {
      mean_value_shape_grad(poly, scheme.points[q], N, dN);
      Eigen::MatrixXd B = Eigen::MatrixXd::Zero(3, 2 * n);
      for (int i = 0; i < n; ++i) {
        const Vec2 g = dN.row(i).transpose() + corr[size_t(i)];
        B(0, 2 * i) = g.x();
        B(1, 2 * i + 1) = g.y();
        B(2, 2 * i) = g.y();
        B(2, 2 * i + 1) = g.x();
      }
      Ke += scheme.weights[q] * B.transpose() * D * B;
    }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b)
            trips.emplace_back(2 * ring[size_t(i)] + a, 2 * ring[size_t(j)] + b,
                               Ke(2 * i + a, 2 * j + b));
  }
  Eigen::SparseMatrix<double> K(ndof, ndof);
  K.setFromTriplets(trips.begin(), trips.end());

  // Dirichlet on every boundary node from the exact affine field.
  std::set<int> fixed;
  for (const auto& [a, b] : mesh.boundary_edges()) {
    fixed.insert(a);
    fixed.insert(b);
  }
  Eigen::VectorXd u = Eigen::VectorXd::Zero(ndof);
  for (int i : fixed) {
    const Vec2 ue = A * mesh.nodes[size_t(i)];
    u[2 * i] = ue.x();
    u[2 * i + 1] = ue.y();
  }
  std::vector<char> is_fixed(size_t(ndof), 0);
  for (int i : fixed) is_fixed[size_t(2 * i)] = is_fixed[size_t(2 * i + 1)] = 1;

  // Condense free dofs: K_ff u_f = -K_fc u_c.
  std::vector<int> free_ix(size_t(ndof), -1);
  int nf = 0;
  for (int i = 0; i < ndof; ++i)
    if (!is_fixed[size_t(i)]) free_ix[size_t(i)] = nf++;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nf);
  std::vector<Eigen::Triplet<double>> ft;
  for (int col = 0; col < K.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(K, col); it; ++it) {
      const int r = int(it.row()), c = int(it.col());
      if (is_fixed[size_t(r)]) continue;
      if (is_fixed[size_t(c)])
        rhs[free_ix[size_t(r)]] -= it.value() * u[c];
      else
        ft.emplace_back(free_ix[size_t(r)], free_ix[size_t(c)], it.value());
    }
  if (nf > 0) {
    Eigen::SparseMatrix<double> Kff(nf, nf);
    Kff.setFromTriplets(ft.begin(), ft.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(Kff);
    const Eigen::VectorXd uf = solver.solve(rhs);
    for (int i = 0; i < ndof; ++i)
      if (free_ix[size_t(i)] >= 0) u[i] = uf[free_ix[size_t(i)]];
  }

  // Errors against the affine field, same schemes as assembly.
  double l2 = 0, l2ref = 0, h1 = 0, h1ref = 0;
  for (int e = 0; e < mesh.n_elems(); ++e) {
    const auto& ring = mesh.elems[size_t(e)];
    const Polygon poly = mesh.element_polygon(e);
    const QuadratureScheme scheme = triangulate_quadrature(poly, quad_order);
    Eigen::VectorXd N;
    Eigen::Matrix<double, Eigen::Dynamic, 2> dN;
    for (size_t q = 0; q < scheme.size(); ++q) {
      const Vec2& x = scheme.points[q];
      mean_value_shape_grad(poly, x, N, dN);
      Vec2 uh = Vec2::Zero();
      Eigen::Matrix2d G = Eigen::Matrix2d::Zero();
      for (size_t i = 0; i < ring.size(); ++i) {
        const Vec2 ui(u[2 * ring[i]], u[2 * ring[i] + 1]);
        uh += N[int(i)] * ui;
        G += ui * dN.row(int(i));
      }
      const Vec2 ue = A * x;
      const double w = scheme.weights[q];
      l2 += w * (uh - ue).squaredNorm();
      l2ref += w * ue.squaredNorm();
      h1 += w * (G - A).squaredNorm();
      h1ref += w * A.squaredNorm();
    }
  }

  PatchTestResult r;
  r.l2_err = std::sqrt(l2 / (l2ref > 0 ? l2ref : 1.0));
  r.h1_err = std::sqrt(h1 / (h1ref > 0 ? h1ref : 1.0));
  r.n_elems = mesh.n_elems();
  r.n_nodes = nn;
  return r;
}

}  // namespace polyxfem
