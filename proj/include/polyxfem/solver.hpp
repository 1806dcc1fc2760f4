#pragma once

#include <Eigen/Sparse>
#include <functional>
#include <iosfwd>
#include <optional>

#include "polyxfem/material.hpp"
#include "polyxfem/xfem.hpp"

namespace polyxfem {

struct DirichletBC {
  std::string node_set;
  std::optional<double> ux, uy;  // values at full load, ramped by load factor
};

struct TractionBC {
  std::string edge_set;
  Vec2 traction{0, 0};  // full-load force per unit current edge length
};

struct SolveParams {
  int n_steps = 1;
  int max_iters = 30;
  double tol = 6e-3;  // residual relative to the external force (or first residual)
  int max_bisect = 4;
  int edge_gauss = 4;
};

struct StepRecord {
  double load = 0;     // load factor reached
  int iters = 0;
  double res_rel = 0;  // final relative residual
};

struct SolveResult {
  Eigen::VectorXd u;
  std::vector<StepRecord> steps;
  bool converged = false;
  int total_iters = 0;
};

class XfemProblem {
 public:
  XfemProblem(XfemSpace space, Material mat);

  void add_dirichlet(const DirichletBC& bc) { dirichlet_.push_back(bc); }
  void add_traction(const TractionBC& bc) { tractions_.push_back(bc); }

  // Internal force and tangent at state u. Either output may be null. Throws
  // InvertedElement when a quadrature point inverts.
  void assemble(const Eigen::VectorXd& u, Eigen::VectorXd* fint,
                std::vector<Eigen::Triplet<double>>* k_trips) const;

  // Follower-measure tractions: direction fixed, length factor taken from the
  // deformation at u_ref (the last converged step).
  Eigen::VectorXd external_force(const Eigen::VectorXd& u_ref, double load) const;

  // Prescribed value per dof at full load (unset for free dofs). Enriched
  // pairs of constrained nodes are pinned to zero.
  std::vector<std::optional<double>> dirichlet_values() const;

  // `on_step` runs after every converged sub-step with the accepted state.
  using StepCallback = std::function<void(const StepRecord&, const Eigen::VectorXd&)>;
  SolveResult solve(const SolveParams& params, std::ostream* log = nullptr,
                    const StepCallback& on_step = {});

  const XfemSpace& space() const { return space_; }
  const Material& material() const { return mat_; }
  const QuadratureScheme& scheme(int e) const { return schemes_[size_t(e)]; }
  const std::vector<Vec2>* correction(int e) const {
    return corrections_[size_t(e)].empty() ? nullptr : &corrections_[size_t(e)];
  }

 private:
  XfemSpace space_;
  Material mat_;
  std::vector<DirichletBC> dirichlet_;
  std::vector<TractionBC> tractions_;
  std::vector<QuadratureScheme> schemes_;
  std::vector<std::vector<Vec2>> corrections_;
};

}  // namespace polyxfem
