#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace polyxfem {

// Raised when det F becomes non-positive at a quadrature point; the load
// stepper catches it and bisects.
struct InvertedElement : std::runtime_error {
  InvertedElement() : std::runtime_error("non-positive deformation Jacobian") {}
};

struct Lame {
  double lambda = 0, mu = 0;
};
Lame lame_from_engineering(double E, double nu);
void engineering_from_lame(const Lame& lame, double& E, double& nu);

// Everything assembly needs at one quadrature point. `tangent` is the
// consistent spatial modulus in Voigt order [xx yy xy] with engineering shear,
// i.e. the D of K_mat = B^T D B paired with K_geo carrying `sigma`.
struct StressState {
  Eigen::Matrix2d sigma = Eigen::Matrix2d::Zero();  // Cauchy, in-plane
  double sigma_zz = 0;                              // out of plane (plane strain)
  Eigen::Matrix3d tangent = Eigen::Matrix3d::Zero();
  double J = 1;                // 3D volume ratio (1 for the incompressible models)
  double thickness_ratio = 1;  // t/T for plane stress
  double W = 0;                // stored energy per undeformed volume
};

// Paper-layout push-forward of second Piola-Kirchhoff quantities:
//   sigma = (1/J) F S F^T,  c_ijkl = F_im F_jn F_kp F_lq C_mnpq.
// The tangent transform deliberately carries no 1/J; material models divide by
// J themselves where consistency demands it.
Eigen::Matrix2d push_forward_stress(const Eigen::Matrix2d& F, const Eigen::Matrix2d& S);
Eigen::Matrix3d push_forward_tangent(const Eigen::Matrix2d& F, const Eigen::Matrix3d& CE_voigt);

struct Material {
  enum class Kind {
    neo_hookean,               // compressible, plane strain
    neo_hookean_incompressible,  // plane stress
    mooney_rivlin_incompressible,  // plane stress
    linear_elastic,            // plane strain small-strain
  };
  Kind kind = Kind::neo_hookean;
  double lambda = 0, mu = 0;  // compressible / linear models
  double mu1 = 0, mu2 = 0;    // incompressible models

  static Material neo_hookean_compressible(double E, double nu);
  static Material neo_hookean_ps(double mu);                 // incompressible plane stress
  static Material mooney_rivlin_ps(double mu1, double mu2);  // incompressible plane stress
  static Material linear(double E, double nu);

  bool incompressible_plane_stress() const;
  bool is_linear() const { return kind == Kind::linear_elastic; }

  StressState evaluate(const Eigen::Matrix2d& F) const;
  double energy(const Eigen::Matrix2d& F) const;

  // dW/dI1, dW/dI2 at fixed invariants (constant for these models).
  double dW_dI1() const;
  double dW_dI2() const;

  // Homogeneous far-field state of the uncracked sheet at stretch `lam`
  // (uniaxial: free lateral contraction; equibiaxial: equal stretches).
  Eigen::Matrix2d farfield_F(double lam, bool equibiaxial) const;

  std::string name() const;
};

// Effective 2nd Piola tangent 2 dS/dC for the incompressible plane-stress
// models (pressure eliminated through C33 = 1/det C). Exposed for the
// finite-difference oracle tests.
Eigen::Matrix3d plane_stress_material_tangent(const Material& mat, const Eigen::Matrix2d& C);
Eigen::Matrix2d plane_stress_S(const Material& mat, const Eigen::Matrix2d& C);

double von_mises(const StressState& s);

}  // namespace polyxfem
