#pragma once

#include "polyxfem/solver.hpp"

namespace polyxfem {

struct JIntegralParams {
  double r_outer = 0;         // weight reaches zero here
  double inner_frac = 0.5;    // weight is one within inner_frac * r_outer
};

// Domain form of the energy release rate around one tip, integrated over the
// undeformed configuration with a radial plateau weight. Valid for the finite
// strain models (1st Piola stress work term) and the small strain model.
double j_integral(const XfemProblem& prob, const Eigen::VectorXd& u, int tip,
                  const JIntegralParams& params);

// Mode separation through auxiliary tip fields; small strain model only.
void stress_intensity_factors(const XfemProblem& prob, const Eigen::VectorXd& u, int tip,
                              const JIntegralParams& params, double& KI, double& KII);

// Plane strain near-tip field of unit intensity in the tip frame (mode 0
// opening, mode 1 sliding); kappa = 3 - 4 nu. The crack lies on theta = +-pi.
void tip_field(int mode, double r, double theta, double shear_mu, double kappa, Vec2& u,
               Eigen::Matrix2d& grad, Eigen::Matrix2d& sigma);

// Half of the largest displacement jump across the crack faces.
double max_half_opening(const XfemProblem& prob, const Eigen::VectorXd& u, int n_samples = 200);

// Prefactors k of the tearing estimate T = 2 k W c at far-field stretch lam.
double tearing_k_surface(double lam);                    // pi / sqrt(lam)
double tearing_k_empirical(double lam);                  // fitted strip factor
// Blunt-tip estimate from the tip stress at stretch lam and half-opening b.
double tearing_k_blunt(const Material& mat, double lam, double b, double W, double c);

}  // namespace polyxfem
