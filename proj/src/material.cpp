#include "polyxfem/material.hpp"

#include <cmath>

namespace polyxfem {

namespace {

constexpr int kV[3][2] = {{0, 0}, {1, 1}, {0, 1}};  // Voigt order xx yy xy

using Tensor4 = double[2][2][2][2];

void add_dyad(Tensor4& T, double s, const Eigen::Matrix2d& A, const Eigen::Matrix2d& B) {
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) T[i][j][k][l] += s * A(i, j) * B(k, l);
}

// s/2 (A_ik B_jl + A_il B_jk): the symmetrized product appearing in dA^-1.
void add_symprod(Tensor4& T, double s, const Eigen::Matrix2d& A, const Eigen::Matrix2d& B) {
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l)
          T[i][j][k][l] += 0.5 * s * (A(i, k) * B(j, l) + A(i, l) * B(j, k));
}

Eigen::Matrix3d to_voigt(const Tensor4& T) {
  Eigen::Matrix3d V;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) V(a, b) = T[kV[a][0]][kV[a][1]][kV[b][0]][kV[b][1]];
  return V;
}

}  // namespace

Lame lame_from_engineering(double E, double nu) {
  return {E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)), E / (2.0 * (1.0 + nu))};
}

void engineering_from_lame(const Lame& lame, double& E, double& nu) {
  E = lame.mu * (3.0 * lame.lambda + 2.0 * lame.mu) / (lame.lambda + lame.mu);
  nu = lame.lambda / (2.0 * (lame.lambda + lame.mu));
}

Eigen::Matrix2d push_forward_stress(const Eigen::Matrix2d& F, const Eigen::Matrix2d& S) {
  return (F * S * F.transpose()) / F.determinant();
}

Eigen::Matrix3d push_forward_tangent(const Eigen::Matrix2d& F, const Eigen::Matrix3d& CE_voigt) {
  // Recover tensor components (minor symmetry), contract, re-pack.
  Tensor4 CE{}, c{};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      const int i = kV[a][0], j = kV[a][1], k = kV[b][0], l = kV[b][1];
      CE[i][j][k][l] = CE[j][i][k][l] = CE[i][j][l][k] = CE[j][i][l][k] = CE_voigt(a, b);
    }
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) {
          double s = 0.0;
          for (int m = 0; m < 2; ++m)
            for (int n = 0; n < 2; ++n)
              for (int p = 0; p < 2; ++p)
                for (int q = 0; q < 2; ++q)
                  s += F(i, m) * F(j, n) * F(k, p) * F(l, q) * CE[m][n][p][q];
          c[i][j][k][l] = s;
        }
  return to_voigt(c);
}

Material Material::neo_hookean_compressible(double E, double nu) {
  Material m;
  m.kind = Kind::neo_hookean;
  const Lame l = lame_from_engineering(E, nu);
  m.lambda = l.lambda;
  m.mu = l.mu;
  return m;
}

Material Material::neo_hookean_ps(double mu) {
  Material m;
  m.kind = Kind::neo_hookean_incompressible;
  m.mu1 = mu;
  m.mu = mu;
  return m;
}

Material Material::mooney_rivlin_ps(double mu1, double mu2) {
  Material m;
  m.kind = Kind::mooney_rivlin_incompressible;
  m.mu1 = mu1;
  m.mu2 = mu2;
  m.mu = mu1 - mu2;  // small-strain shear modulus
  return m;
}

Material Material::linear(double E, double nu) {
  Material m;
  m.kind = Kind::linear_elastic;
  const Lame l = lame_from_engineering(E, nu);
  m.lambda = l.lambda;
  m.mu = l.mu;
  return m;
}

bool Material::incompressible_plane_stress() const {
  return kind == Kind::neo_hookean_incompressible || kind == Kind::mooney_rivlin_incompressible;
}

double Material::dW_dI1() const { return 0.5 * (incompressible_plane_stress() ? mu1 : mu); }

double Material::dW_dI2() const { return incompressible_plane_stress() ? -0.5 * mu2 : 0.0; }

Eigen::Matrix2d plane_stress_S(const Material& mat, const Eigen::Matrix2d& C) {
  const double d = C.determinant();
  const Eigen::Matrix2d Ci = C.inverse();
  Eigen::Matrix2d S = mat.mu1 * (Eigen::Matrix2d::Identity() - Ci / d);
  if (mat.kind == Material::Kind::mooney_rivlin_incompressible)
    S += mat.mu2 * (Ci * Ci - d * Ci);
  return S;
}

Eigen::Matrix3d plane_stress_material_tangent(const Material& mat, const Eigen::Matrix2d& C) {
  const double d = C.determinant();
  const Eigen::Matrix2d Ci = C.inverse();
  const Eigen::Matrix2d Ci2 = Ci * Ci;
  Tensor4 T{};
  add_dyad(T, 2.0 * mat.mu1 / d, Ci, Ci);
  add_symprod(T, 2.0 * mat.mu1 / d, Ci, Ci);
  if (mat.kind == Material::Kind::mooney_rivlin_incompressible) {
    add_symprod(T, -2.0 * mat.mu2, Ci, Ci2);
    add_symprod(T, -2.0 * mat.mu2, Ci2, Ci);
    add_dyad(T, -2.0 * mat.mu2 * d, Ci, Ci);
    add_symprod(T, 2.0 * mat.mu2 * d, Ci, Ci);
  }
  return to_voigt(T);
}

StressState Material::evaluate(const Eigen::Matrix2d& F) const {
  StressState s;
  const double Jbar = F.determinant();

  if (kind == Kind::linear_elastic) {
    const Eigen::Matrix2d eps = 0.5 * (F + F.transpose()) - Eigen::Matrix2d::Identity();
    const double tr = eps.trace();
    s.sigma = lambda * tr * Eigen::Matrix2d::Identity() + 2.0 * mu * eps;
    s.sigma_zz = lambda * tr;
    s.tangent << lambda + 2.0 * mu, lambda, 0, lambda, lambda + 2.0 * mu, 0, 0, 0, mu;
    s.J = 1.0;
    s.W = 0.5 * (s.sigma(0, 0) * eps(0, 0) + s.sigma(1, 1) * eps(1, 1) +
                 2.0 * s.sigma(0, 1) * eps(0, 1));
    return s;
  }

  if (Jbar <= 0.0) throw InvertedElement();

  if (kind == Kind::neo_hookean) {
    // Plane strain, W = lambda/2 (ln J)^2 - mu ln J + mu/2 (tr C - 3).
    const double lnJ = std::log(Jbar);
    const Eigen::Matrix2d B = F * F.transpose();
    s.sigma = (lambda * lnJ * Eigen::Matrix2d::Identity() + mu * (B - Eigen::Matrix2d::Identity())) / Jbar;
    s.sigma_zz = lambda * lnJ / Jbar;
    const double a = lambda / Jbar;
    const double b = (mu - lambda * lnJ) / Jbar;
    s.tangent << a + 2.0 * b, a, 0, a, a + 2.0 * b, 0, 0, 0, b;
    s.J = Jbar;
    s.W = 0.5 * lambda * lnJ * lnJ - mu * lnJ + 0.5 * mu * (B.trace() + 1.0 - 3.0);
    return s;
  }

  // Incompressible plane stress: thickness takes up the volume change,
  // t/T = 1/det(Fbar) and the 3D J is exactly 1.
  const Eigen::Matrix2d C = F.transpose() * F;
  const double d = C.determinant();
  const Eigen::Matrix2d S = plane_stress_S(*this, C);
  s.sigma = F * S * F.transpose();  // J = 1
  s.sigma_zz = 0.0;
  s.J = 1.0;
  s.thickness_ratio = 1.0 / Jbar;
  s.tangent = push_forward_tangent(F, plane_stress_material_tangent(*this, C));
  // 3D invariants with C33 = 1/d: I1 = tr C + 1/d, I2 = d + tr C / d.
  const double I1 = C.trace() + 1.0 / d;
  const double I2 = d + C.trace() / d;
  s.W = 0.5 * mu1 * (I1 - 3.0);
  if (kind == Kind::mooney_rivlin_incompressible) s.W -= 0.5 * mu2 * (I2 - 3.0);
  return s;
}

double Material::energy(const Eigen::Matrix2d& F) const { return evaluate(F).W; }

Eigen::Matrix2d Material::farfield_F(double lam, bool equibiaxial) const {
  if (equibiaxial) return Eigen::Vector2d(lam, lam).asDiagonal();
  // Uniaxial with free lateral contraction: lam2 = lam^-1/2 for the
  // incompressible isotropic models (sigma_22 = 0 identically).
  return Eigen::Vector2d(lam, 1.0 / std::sqrt(lam)).asDiagonal();
}

std::string Material::name() const {
  switch (kind) {
    case Kind::neo_hookean: return "neo_hookean";
    case Kind::neo_hookean_incompressible: return "neo_hookean_incompressible";
    case Kind::mooney_rivlin_incompressible: return "mooney_rivlin_incompressible";
    case Kind::linear_elastic: return "linear_elastic";
  }
  return "unknown";
}

double von_mises(const StressState& s) {
  const double sxx = s.sigma(0, 0), syy = s.sigma(1, 1), sxy = s.sigma(0, 1), szz = s.sigma_zz;
  return std::sqrt(0.5 * ((sxx - syy) * (sxx - syy) + (syy - szz) * (syy - szz) +
                          (szz - sxx) * (szz - sxx)) +
                   3.0 * sxy * sxy);
}

}  // namespace polyxfem
