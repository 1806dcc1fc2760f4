#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "doctest.h"
#include "polyxfem/material.hpp"

using namespace polyxfem;
using Eigen::Matrix2d;
using Eigen::Matrix3d;

namespace {

Matrix2d random_F(std::mt19937_64& rng, double spread = 0.4) {
  std::uniform_real_distribution<double> u(-spread, spread);
  Matrix2d F;
  do {
    F << 1.0 + u(rng), u(rng), u(rng), 1.0 + u(rng);
  } while (F.determinant() < 0.3);
  return F;
}

Matrix2d random_sym(std::mt19937_64& rng, double spread = 1.0) {
  std::uniform_real_distribution<double> u(-spread, spread);
  const double a = u(rng), b = u(rng), c = u(rng);
  Matrix2d S;
  S << a, c, c, b;
  return S;
}

Matrix2d sym_sqrt(const Matrix2d& C) {
  Eigen::SelfAdjointEigenSolver<Matrix2d> es(C);
  return es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() *
         es.eigenvectors().transpose();
}

// Energy as a function of C alone (objectivity makes F = sqrt(C) sufficient).
double energy_of_C(const Material& mat, const Matrix2d& C) { return mat.energy(sym_sqrt(C)); }

// Contract a minor-symmetric Voigt modulus with a symmetric dC: (T : dC)_ij.
Matrix2d voigt_contract(const Matrix3d& V, const Matrix2d& dC) {
  constexpr int kV[3][2] = {{0, 0}, {1, 1}, {0, 1}};
  double T[2][2][2][2];
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      const int i = kV[a][0], j = kV[a][1], k = kV[b][0], l = kV[b][1];
      T[i][j][k][l] = T[j][i][k][l] = T[i][j][l][k] = T[j][i][l][k] = V(a, b);
    }
  Matrix2d R = Matrix2d::Zero();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) R(i, j) += T[i][j][k][l] * dC(k, l);
  return R;
}

// In-plane 2nd Piola stress of the compressible plane-strain model, written
// from the strain energy instead of the push-forward used in evaluate().
Matrix2d nh_plane_strain_S(const Material& mat, const Matrix2d& C) {
  const double lnJ = 0.5 * std::log(C.determinant());
  const Matrix2d Ci = C.inverse();
  return mat.mu * (Matrix2d::Identity() - Ci) + mat.lambda * lnJ * Ci;
}

}  // namespace

TEST_CASE("Lame parameters round-trip through engineering constants") {
  const Lame l = lame_from_engineering(5e4, 0.45);
  double E = 0, nu = 0;
  engineering_from_lame(l, E, nu);
  CHECK(E == doctest::Approx(5e4).epsilon(1e-12));
  CHECK(nu == doctest::Approx(0.45).epsilon(1e-12));
}

TEST_CASE("all models are stress-free at the identity") {
  const Material mats[] = {Material::neo_hookean_compressible(5e4, 0.3),
                           Material::neo_hookean_ps(0.4225e6),
                           Material::mooney_rivlin_ps(3.6969e5, -0.5281e5),
                           Material::linear(5e4, 0.45)};
  for (const auto& mat : mats) {
    const StressState s = mat.evaluate(Matrix2d::Identity());
    CHECK(s.sigma.norm() < 1e-14 * (1.0 + mat.mu));
    CHECK(std::abs(s.sigma_zz) < 1e-14 * (1.0 + mat.mu));
    CHECK(std::abs(s.W) < 1e-14 * (1.0 + mat.mu));
  }
}

TEST_CASE("compressible tangent at identity reduces to the linear modulus") {
  const Material nh = Material::neo_hookean_compressible(5e4, 0.3);
  const Material lin = Material::linear(5e4, 0.3);
  const Matrix3d Dn = nh.evaluate(Matrix2d::Identity()).tangent;
  const Matrix3d Dl = lin.evaluate(Matrix2d::Identity()).tangent;
  CHECK((Dn - Dl).norm() < 1e-10 * Dl.norm());
}

TEST_CASE("incompressible tangent at identity matches the plane-stress limit") {
  // E = 3 mu, nu = 1/2 in D = E/(1-nu^2) [[1,nu,0],[nu,1,0],[0,0,(1-nu)/2]].
  const double mu = 0.7;
  const Material m = Material::neo_hookean_ps(mu);
  Matrix3d Dref;
  Dref << 4 * mu, 2 * mu, 0, 2 * mu, 4 * mu, 0, 0, 0, mu;
  CHECK((m.evaluate(Matrix2d::Identity()).tangent - Dref).norm() < 1e-12 * Dref.norm());
}

TEST_CASE("plane-stress S is the gradient of the stored energy") {
  std::mt19937_64 rng(11);
  const Material mats[] = {Material::neo_hookean_ps(1.3),
                           Material::mooney_rivlin_ps(2.0, 0.35),
                           Material::mooney_rivlin_ps(3.6969e5, -0.5281e5)};
  for (const auto& mat : mats) {
    for (int trial = 0; trial < 6; ++trial) {
      const Matrix2d F = random_F(rng);
      const Matrix2d C = F.transpose() * F;
      const Matrix2d S = plane_stress_S(mat, C);
      const Matrix2d dC = random_sym(rng);
      const double h = 1e-6;
      const double dW = (energy_of_C(mat, C + h * dC) - energy_of_C(mat, C - h * dC)) / (2.0 * h);
      // dW = 1/2 S : dC.
      const double pred = 0.5 * (S.array() * dC.array()).sum();
      CHECK(dW == doctest::Approx(pred).epsilon(5e-6).scale(mat.mu1 != 0 ? std::abs(mat.mu1) : 1));
    }
  }
}

TEST_CASE("plane-stress modulus matches finite differences of S") {
  std::mt19937_64 rng(12);
  const Material mats[] = {Material::neo_hookean_ps(1.3),
                           Material::mooney_rivlin_ps(2.0, 0.35),
                           Material::mooney_rivlin_ps(3.6969e5, -0.5281e5)};
  for (const auto& mat : mats) {
    const double scale = std::abs(mat.mu1) + std::abs(mat.mu2) + 1.0;
    for (int trial = 0; trial < 6; ++trial) {
      const Matrix2d F = random_F(rng);
      const Matrix2d C = F.transpose() * F;
      const Matrix3d CE = plane_stress_material_tangent(mat, C);
      const Matrix2d dC = random_sym(rng);
      const double h = 1e-6;
      const Matrix2d dS =
          (plane_stress_S(mat, C + h * dC) - plane_stress_S(mat, C - h * dC)) / (2.0 * h);
      // dS = 1/2 (2 dS/dC) : dC.
      const Matrix2d pred = 0.5 * voigt_contract(CE, dC);
      CHECK((dS - pred).norm() < 2e-5 * scale);
    }
  }
}

TEST_CASE("compressible spatial tangent agrees with the pulled-back FD modulus") {
  std::mt19937_64 rng(13);
  const Material mat = Material::neo_hookean_compressible(3.0, 0.35);
  for (int trial = 0; trial < 6; ++trial) {
    const Matrix2d F = random_F(rng);
    const Matrix2d C = F.transpose() * F;
    const double J = F.determinant();
    // 2 dS/dC by central differences, one symmetric direction per Voigt slot.
    Matrix3d CE;
    const Matrix2d dirs[3] = {(Matrix2d() << 1, 0, 0, 0).finished(),
                              (Matrix2d() << 0, 0, 0, 1).finished(),
                              (Matrix2d() << 0, 0.5, 0.5, 0).finished()};
    const double h = 1e-6;
    for (int b = 0; b < 3; ++b) {
      const Matrix2d dS =
          (nh_plane_strain_S(mat, C + h * dirs[b]) - nh_plane_strain_S(mat, C - h * dirs[b])) /
          (2.0 * h);
      // Column b of 2 dS/dC in tensor Voigt: perturbing slot b with the
      // symmetrized direction gives dS = (dS/dC):dirs = 1/2 CE:dirs.
      const Matrix2d col = 2.0 * dS;
      CE(0, b) = col(0, 0);
      CE(1, b) = col(1, 1);
      CE(2, b) = col(0, 1);
    }
    const Matrix3d spatial = push_forward_tangent(F, CE) / J;
    const Matrix3d coded = mat.evaluate(F).tangent;
    CHECK((spatial - coded).norm() < 1e-5 * (coded.norm() + 1.0));
  }
}

TEST_CASE("push-forward of the tangent matches an independent contraction") {
  std::mt19937_64 rng(14);
  constexpr int kV[3][2] = {{0, 0}, {1, 1}, {0, 1}};
  for (int trial = 0; trial < 4; ++trial) {
    const Matrix2d F = random_F(rng);
    Matrix3d V;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) V(a, b) = std::uniform_real_distribution<double>(-1, 1)(rng);
    V = ((V + V.transpose()) / 2).eval();  // major symmetry like a real modulus

    double T[2][2][2][2];
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        const int i = kV[a][0], j = kV[a][1], k = kV[b][0], l = kV[b][1];
        T[i][j][k][l] = T[j][i][k][l] = T[i][j][l][k] = T[j][i][l][k] = V(a, b);
      }
    const Matrix3d got = push_forward_tangent(F, V);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        const int i = kV[a][0], j = kV[a][1], k = kV[b][0], l = kV[b][1];
        double want = 0.0;
        for (int m = 0; m < 2; ++m)
          for (int n = 0; n < 2; ++n)
            for (int p = 0; p < 2; ++p)
              for (int q = 0; q < 2; ++q)
                want += F(i, m) * F(j, n) * F(k, p) * F(l, q) * T[m][n][p][q];
        CHECK(got(a, b) == doctest::Approx(want).epsilon(1e-12));
      }
  }
}

TEST_CASE("Cauchy stress is frame-indifferent") {
  std::mt19937_64 rng(15);
  const Material mats[] = {Material::neo_hookean_compressible(2.0, 0.3),
                           Material::neo_hookean_ps(1.1),
                           Material::mooney_rivlin_ps(1.6, 0.3)};
  for (const auto& mat : mats) {
    for (int trial = 0; trial < 4; ++trial) {
      const Matrix2d F = random_F(rng);
      const double th = std::uniform_real_distribution<double>(0, 6.28)(rng);
      Matrix2d R;
      R << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
      const StressState a = mat.evaluate(F);
      const StressState b = mat.evaluate(R * F);
      CHECK((b.sigma - R * a.sigma * R.transpose()).norm() < 1e-12 * (1.0 + a.sigma.norm()));
      CHECK(b.W == doctest::Approx(a.W).epsilon(1e-10));
    }
  }
}

TEST_CASE("incompressible models keep volume through the thickness") {
  std::mt19937_64 rng(16);
  const Material mats[] = {Material::neo_hookean_ps(1.0), Material::mooney_rivlin_ps(1.5, 0.2)};
  for (const auto& mat : mats) {
    for (int trial = 0; trial < 4; ++trial) {
      const Matrix2d F = random_F(rng);
      const StressState s = mat.evaluate(F);
      CHECK(s.J == 1.0);
      CHECK(s.thickness_ratio * F.determinant() == doctest::Approx(1.0).epsilon(1e-14));
      CHECK(s.sigma_zz == 0.0);
    }
  }
}

TEST_CASE("uniaxial stretch closed forms") {
  const double lam = 1.8;

  SUBCASE("neo-hookean plane stress") {
    const double mu = 0.4225e6;
    const Material mat = Material::neo_hookean_ps(mu);
    const StressState s = mat.evaluate(mat.farfield_F(lam, false));
    CHECK(s.sigma(0, 0) ==
          doctest::Approx(mu * (lam * lam - 1.0 / lam)).epsilon(1e-12));
    CHECK(std::abs(s.sigma(1, 1)) < 1e-9 * std::abs(s.sigma(0, 0)));
    CHECK(std::abs(s.sigma(0, 1)) < 1e-12 * mu);
  }

  SUBCASE("mooney-rivlin plane stress") {
    const double mu1 = 3.6969e5, mu2 = -0.5281e5;
    const Material mat = Material::mooney_rivlin_ps(mu1, mu2);
    const StressState s = mat.evaluate(mat.farfield_F(lam, false));
    const double want = (lam * lam - 1.0 / lam) * (mu1 - mu2 / lam);
    CHECK(s.sigma(0, 0) == doctest::Approx(want).epsilon(1e-12));
    CHECK(std::abs(s.sigma(1, 1)) < 1e-9 * std::abs(s.sigma(0, 0)));
  }

  SUBCASE("mooney-rivlin equibiaxial") {
    const double mu1 = 2.0, mu2 = 0.35;
    const Material mat = Material::mooney_rivlin_ps(mu1, mu2);
    const StressState s = mat.evaluate(mat.farfield_F(lam, true));
    const double l2 = lam * lam;
    const double want = (l2 - 1.0 / (l2 * l2)) * (mu1 - mu2 * l2);
    CHECK(s.sigma(0, 0) == doctest::Approx(want).epsilon(1e-12));
    CHECK(s.sigma(1, 1) == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("stress is the energy gradient for every nonlinear model") {
  std::mt19937_64 rng(17);
  const Material mats[] = {Material::neo_hookean_compressible(2.0, 0.3),
                           Material::neo_hookean_ps(1.1),
                           Material::mooney_rivlin_ps(1.6, 0.3)};
  for (const auto& mat : mats) {
    for (int trial = 0; trial < 4; ++trial) {
      const Matrix2d F = random_F(rng);
      const StressState s = mat.evaluate(F);
      // P = dW/dF by central differences; sigma = P F^T / J with the 3D J
      // (1 for the incompressible models, det F in plane strain).
      Matrix2d P;
      const double h = 1e-6;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          Matrix2d Fp = F, Fm = F;
          Fp(i, j) += h;
          Fm(i, j) -= h;
          P(i, j) = (mat.energy(Fp) - mat.energy(Fm)) / (2.0 * h);
        }
      const Matrix2d sig = P * F.transpose() / s.J;
      CHECK((sig - s.sigma).norm() < 2e-5 * (1.0 + s.sigma.norm()));
    }
  }
}

TEST_CASE("inverted configurations throw for the nonlinear models only") {
  Matrix2d F;
  F << 1.0, 0.0, 0.0, -0.5;
  CHECK_THROWS_AS(Material::neo_hookean_compressible(2.0, 0.3).evaluate(F), InvertedElement);
  CHECK_THROWS_AS(Material::neo_hookean_ps(1.0).evaluate(F), InvertedElement);
  CHECK_THROWS_AS(Material::mooney_rivlin_ps(1.0, 0.2).evaluate(F), InvertedElement);
  CHECK_NOTHROW(Material::linear(1.0, 0.3).evaluate(F));
}

TEST_CASE("von Mises stress of simple states") {
  StressState s;
  s.sigma << 3.0, 0, 0, 3.0;
  s.sigma_zz = 3.0;
  CHECK(von_mises(s) < 1e-14);
  s.sigma << 5.0, 0, 0, 0;
  s.sigma_zz = 0.0;
  CHECK(von_mises(s) == doctest::Approx(5.0).epsilon(1e-14));
}
