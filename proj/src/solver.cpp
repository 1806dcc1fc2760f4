#include "polyxfem/solver.hpp"

#include <Eigen/SparseLU>
#include <limits>
#include <map>
#include <ostream>

namespace polyxfem {

namespace {

// Voigt stress and the 4x4 sigma block of the geometric stiffness.
Eigen::Vector3d stress_voigt(const Eigen::Matrix2d& s) {
  return Eigen::Vector3d(s(0, 0), s(1, 1), s(0, 1));
}

}  // namespace

XfemProblem::XfemProblem(XfemSpace space, Material mat)
    : space_(std::move(space)), mat_(mat) {
  const PolyMesh& mesh = *space_.mesh;
  schemes_.resize(size_t(mesh.n_elems()));
  corrections_.resize(size_t(mesh.n_elems()));
  for (int e = 0; e < mesh.n_elems(); ++e) {
    schemes_[size_t(e)] = element_scheme(space_, e);
    if (space_.params.corrected_gradients)
      corrections_[size_t(e)] = gradient_correction(mesh.element_polygon(e), schemes_[size_t(e)]);
  }
}

void XfemProblem::assemble(const Eigen::VectorXd& u, Eigen::VectorXd* fint,
                           std::vector<Eigen::Triplet<double>>* k_trips) const {
  const PolyMesh& mesh = *space_.mesh;
  if (fint) fint->setZero(space_.n_dofs);
  const bool linear = mat_.is_linear();

  ShapeEval sh;
  for (int e = 0; e < mesh.n_elems(); ++e) {
    const QuadratureScheme& scheme = schemes_[size_t(e)];
    const std::vector<Vec2>* corr = correction(e);

    Eigen::MatrixXd Ke;
    Eigen::VectorXd fe;
    int n2 = 0;
    std::vector<int> dofs;
    for (size_t q = 0; q < scheme.size(); ++q) {
      evaluate_shapes(space_, e, scheme.points[q], corr, sh);
      const int M = sh.n_modes;
      if (q == 0) {
        n2 = 2 * M;
        dofs.resize(size_t(n2));
        for (int m = 0; m < M; ++m) {
          dofs[size_t(2 * m)] = sh.gdof[size_t(m)];
          dofs[size_t(2 * m + 1)] = sh.gdof[size_t(m)] + 1;
        }
        if (k_trips) Ke = Eigen::MatrixXd::Zero(n2, n2);
        if (fint) fe = Eigen::VectorXd::Zero(n2);
      }

      Eigen::Matrix2d dudX = Eigen::Matrix2d::Zero();
      for (int m = 0; m < M; ++m) {
        const Vec2 um(u[sh.gdof[size_t(m)]], u[sh.gdof[size_t(m)] + 1]);
        dudX += um * sh.dphi.row(m);
      }
      const Eigen::Matrix2d F = Eigen::Matrix2d::Identity() + dudX;
      const StressState st = mat_.evaluate(F);

      // Shape gradients in the configuration the stress lives in: current for
      // the finite strain models, material for the small strain model.
      Eigen::Matrix<double, Eigen::Dynamic, 2> g = sh.dphi;
      if (!linear) {
        const Eigen::Matrix2d FinvT = F.inverse().transpose();
        for (int m = 0; m < M; ++m) g.row(m) = (FinvT * sh.dphi.row(m).transpose()).transpose();
      }

      const double wv = scheme.weights[q] * st.J;
      Eigen::MatrixXd B = Eigen::MatrixXd::Zero(3, n2);
      for (int m = 0; m < M; ++m) {
        B(0, 2 * m) = g(m, 0);
        B(1, 2 * m + 1) = g(m, 1);
        B(2, 2 * m) = g(m, 1);
        B(2, 2 * m + 1) = g(m, 0);
      }
      if (fint) fe += wv * B.transpose() * stress_voigt(st.sigma);
      if (k_trips) {
        Ke += wv * B.transpose() * st.tangent * B;
        if (!linear) {
          // Geometric part: sum_q w sigma_kl dphi_ik dphi_jl per component.
          Eigen::MatrixXd Gs = Eigen::MatrixXd::Zero(M, M);
          for (int a = 0; a < M; ++a)
            for (int b = 0; b < M; ++b)
              Gs(a, b) = g.row(a).dot((st.sigma * g.row(b).transpose()).transpose());
          for (int a = 0; a < M; ++a)
            for (int b = 0; b < M; ++b) {
              Ke(2 * a, 2 * b) += wv * Gs(a, b);
              Ke(2 * a + 1, 2 * b + 1) += wv * Gs(a, b);
            }
        }
      }
    }

    if (fint)
      for (int i = 0; i < n2; ++i) (*fint)[dofs[size_t(i)]] += fe[i];
    if (k_trips)
      for (int i = 0; i < n2; ++i)
        for (int j = 0; j < n2; ++j) k_trips->emplace_back(dofs[size_t(i)], dofs[size_t(j)], Ke(i, j));
  }
}

Eigen::VectorXd XfemProblem::external_force(const Eigen::VectorXd& u_ref, double load) const {
  const PolyMesh& mesh = *space_.mesh;
  Eigen::VectorXd f = Eigen::VectorXd::Zero(space_.n_dofs);
  if (tractions_.empty()) return f;

  // Owner element of each boundary edge, keyed by the ordered node pair.
  std::map<std::array<int, 2>, int> owner;
  for (int e = 0; e < mesh.n_elems(); ++e) {
    const auto& ring = mesh.elems[size_t(e)];
    const size_t n = ring.size();
    for (size_t i = 0; i < n; ++i) owner[{ring[i], ring[(i + 1) % n]}] = e;
  }

  std::vector<double> gp, gw;
  gauss_legendre(4, gp, gw);

  ShapeEval sh;
  for (const auto& bc : tractions_) {
    const auto it = mesh.edge_sets.find(bc.edge_set);
    if (it == mesh.edge_sets.end()) throw std::runtime_error("unknown edge set " + bc.edge_set);
    const Vec2 t_full = load * bc.traction;
    for (const auto& edge : it->second) {
      auto own = owner.find({edge[0], edge[1]});
      if (own == owner.end()) own = owner.find({edge[1], edge[0]});
      if (own == owner.end()) throw std::runtime_error("traction edge not on any element");
      const int e = own->second;
      const Vec2& a = mesh.nodes[size_t(edge[0])];
      const Vec2& b = mesh.nodes[size_t(edge[1])];
      for (size_t q = 0; q < gp.size(); ++q) {
        const double s = 0.5 * (gp[q] + 1.0);
        const Vec2 X = a + s * (b - a);
        Vec2 disp;
        Eigen::Matrix2d dudX;
        evaluate_deformation(space_, e, X, u_ref, correction(e), disp, dudX);
        // Current edge length density against the reference parameter.
        const Vec2 dx = (Eigen::Matrix2d::Identity() + dudX) * (b - a);
        const double wl = 0.5 * gw[q] * dx.norm();
        evaluate_shapes(space_, e, X, correction(e), sh);
        for (int m = 0; m < sh.n_modes; ++m) {
          f[sh.gdof[size_t(m)]] += wl * sh.phi[m] * t_full.x();
          f[sh.gdof[size_t(m)] + 1] += wl * sh.phi[m] * t_full.y();
        }
      }
    }
  }
  return f;
}

std::vector<std::optional<double>> XfemProblem::dirichlet_values() const {
  const PolyMesh& mesh = *space_.mesh;
  std::vector<std::optional<double>> bc(size_t(space_.n_dofs));
  for (const auto& d : dirichlet_) {
    const auto it = mesh.node_sets.find(d.node_set);
    if (it == mesh.node_sets.end()) throw std::runtime_error("unknown node set " + d.node_set);
    for (int j : it->second) {
      const int base = space_.node_base[size_t(j)];
      if (d.ux) bc[size_t(base)] = *d.ux;
      if (d.uy) bc[size_t(base) + 1] = *d.uy;
      // Enriched dofs on constrained nodes are pinned.
      if (space_.node_pairs(j) == 2) {
        bc[size_t(base) + 2] = 0.0;
        bc[size_t(base) + 3] = 0.0;
      }
    }
  }
  return bc;
}

SolveResult XfemProblem::solve(const SolveParams& params, std::ostream* log,
                               const StepCallback& on_step) {
  const int nd = space_.n_dofs;
  const auto bc = dirichlet_values();
  std::vector<char> fixed(size_t(nd), 0);
  std::vector<int> free_ix(size_t(nd), -1);
  int nf = 0;
  for (int i = 0; i < nd; ++i) {
    if (bc[size_t(i)])
      fixed[size_t(i)] = 1;
    else
      free_ix[size_t(i)] = nf++;
  }

  SolveResult out;
  out.u = Eigen::VectorXd::Zero(nd);
  Eigen::VectorXd u = out.u;

  const auto set_prescribed = [&](Eigen::VectorXd& v, double load) {
    for (int i = 0; i < nd; ++i)
      if (bc[size_t(i)]) v[i] = load * *bc[size_t(i)];
  };

  const auto free_norm = [&](const Eigen::VectorXd& v) {
    double s = 0.0;
    for (int i = 0; i < nd; ++i)
      if (!fixed[size_t(i)]) s += v[i] * v[i];
    return std::sqrt(s);
  };

  double load_done = 0.0;
  const double base_increment = 1.0 / params.n_steps;
  double increment = base_increment;
  int bisections = 0;
  int consec_ok = 0;

  while (load_done < 1.0 - 1e-12) {
    const double load = std::min(1.0, load_done + increment);
    Eigen::VectorXd u_trial = u;
    set_prescribed(u_trial, load);
    const Eigen::VectorXd fext = external_force(u, load);
    const double fext_norm = free_norm(fext);

    bool ok = false;
    int iters = 0;
    double res_rel = 0.0;
    double res_prev = 0.0, res0 = 0.0;
    int growth = 0;
    int backtracks = 0;
    Eigen::VectorXd applied;  // last Newton update added to u_trial

    for (int it = 0; it < params.max_iters; ++it) {
      Eigen::VectorXd fint;
      std::vector<Eigen::Triplet<double>> trips;
      try {
        assemble(u_trial, &fint, &trips);
      } catch (const InvertedElement&) {
        // A full Newton step can invert a heavily deformed cut element even
        // when an invertible path exists; retract half of the last update.
        if (applied.size() == 0 || ++backtracks > 8) break;
        applied *= 0.5;
        u_trial -= applied;
        res_prev = std::numeric_limits<double>::infinity();
        if (log) (*log) << "load " << load << " iter " << it << " backtrack\n";
        continue;
      }
      const Eigen::VectorXd R = fint - fext;
      const double res = free_norm(R);
      if (it == 0) res0 = res;
      const double scale = fext_norm > 1e-300 ? fext_norm : (res0 > 1e-300 ? res0 : 1.0);
      res_rel = res / scale;
      if (log)
        (*log) << "load " << load << " iter " << it << " res " << res << " rel " << res_rel
               << "\n";
      if (res_rel <= params.tol) {
        ok = true;
        iters = it;
        break;
      }
      if (it > 0 && res > res_prev) {
        if (++growth >= 3) break;
      } else {
        growth = 0;
      }
      res_prev = res;

      // Condense to free dofs and solve.
      std::vector<Eigen::Triplet<double>> ft;
      ft.reserve(trips.size());
      for (const auto& t : trips) {
        if (fixed[size_t(t.row())] || fixed[size_t(t.col())]) continue;
        ft.emplace_back(free_ix[size_t(t.row())], free_ix[size_t(t.col())], t.value());
      }
      Eigen::VectorXd rhs(nf);
      for (int i = 0; i < nd; ++i)
        if (!fixed[size_t(i)]) rhs[free_ix[size_t(i)]] = -R[i];
      Eigen::SparseMatrix<double> K(nf, nf);
      K.setFromTriplets(ft.begin(), ft.end());
      Eigen::VectorXd du;
      Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(K);
      if (ldlt.info() == Eigen::Success) {
        du = ldlt.solve(rhs);
      } else {
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(K);
        if (lu.info() != Eigen::Success) break;
        du = lu.solve(rhs);
      }
      applied = Eigen::VectorXd::Zero(nd);
      for (int i = 0; i < nd; ++i)
        if (!fixed[size_t(i)]) applied[i] = du[free_ix[size_t(i)]];
      u_trial += applied;
      iters = it + 1;
    }

    if (ok) {
      u = u_trial;
      load_done = load;
      out.steps.push_back({load, iters, res_rel});
      out.total_iters += iters;
      if (on_step) on_step(out.steps.back(), u);
      // Recover the step size after two clean sub-steps.
      if (increment < base_increment && ++consec_ok >= 2) {
        increment = std::min(base_increment, 2.0 * increment);
        consec_ok = 0;
      }
    } else {
      consec_ok = 0;
      if (++bisections > params.max_bisect) {
        out.u = u;
        out.converged = false;
        return out;
      }
      increment *= 0.5;
      if (log) (*log) << "bisect to increment " << increment << "\n";
    }
  }

  out.u = u;
  out.converged = true;
  return out;
}

}  // namespace polyxfem
