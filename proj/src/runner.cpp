#include "polyxfem/runner.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

#include "json.hpp"
#include "polyxfem/fracture.hpp"
#include "polyxfem/patch_test.hpp"
#include "polyxfem/vtk.hpp"

namespace polyxfem {

namespace {

namespace fs = std::filesystem;

bool in_box(const Vec2& p, const SetSpec& s) {
  return p.x() >= s.lo.x() && p.x() <= s.hi.x() && p.y() >= s.lo.y() && p.y() <= s.hi.y();
}

void build_sets(const RunConfig& cfg, PolyMesh& mesh, std::vector<std::string>& errs) {
  for (const auto& s : cfg.node_sets) {
    auto& ids = mesh.node_sets[s.name];
    for (int j = 0; j < mesh.n_nodes(); ++j)
      if (in_box(mesh.nodes[size_t(j)], s)) ids.push_back(j);
    if (ids.empty()) errs.push_back("node set '" + s.name + "' selected no nodes");
  }
  const auto bedges = mesh.boundary_edges();
  for (const auto& s : cfg.edge_sets) {
    auto& ids = mesh.edge_sets[s.name];
    for (const auto& e : bedges)
      if (in_box(mesh.nodes[size_t(e[0])], s) && in_box(mesh.nodes[size_t(e[1])], s))
        ids.push_back(e);
    if (ids.empty()) errs.push_back("edge set '" + s.name + "' selected no edges");
  }
}

VtkFields sample_fields(const XfemProblem& prob, const Eigen::VectorXd& u) {
  const XfemSpace& sp = prob.space();
  const PolyMesh& mesh = *sp.mesh;
  VtkFields f;
  f.displacement.resize(size_t(mesh.n_nodes()));
  for (int j = 0; j < mesh.n_nodes(); ++j)
    f.displacement[size_t(j)] = Vec2(u[sp.node_base[size_t(j)]], u[sp.node_base[size_t(j)] + 1]);

  const int ne = mesh.n_elems();
  f.cell_sigma.assign(size_t(ne), Eigen::Matrix2d::Zero());
  f.cell_sigma_zz.assign(size_t(ne), 0.0);
  f.cell_von_mises.assign(size_t(ne), 0.0);
  f.cell_volume_ratio.assign(size_t(ne), 1.0);
  for (int e = 0; e < ne; ++e) {
    const QuadratureScheme& qs = prob.scheme(e);
    Eigen::Matrix2d sig = Eigen::Matrix2d::Zero();
    double szz = 0, jv = 0, wsum = 0;
    for (size_t q = 0; q < qs.size(); ++q) {
      Vec2 d;
      Eigen::Matrix2d G;
      evaluate_deformation(sp, e, qs.points[q], u, prob.correction(e), d, G);
      const StressState st =
          prob.material().evaluate(Eigen::Matrix2d(Eigen::Matrix2d::Identity() + G));
      const double w = qs.weights[q];
      sig += w * st.sigma;
      szz += w * st.sigma_zz;
      jv += w * st.J;
      wsum += w;
    }
    if (wsum > 0) {
      f.cell_sigma[size_t(e)] = sig / wsum;
      f.cell_sigma_zz[size_t(e)] = szz / wsum;
      f.cell_volume_ratio[size_t(e)] = jv / wsum;
      StressState mean;
      mean.sigma = f.cell_sigma[size_t(e)];
      mean.sigma_zz = f.cell_sigma_zz[size_t(e)];
      f.cell_von_mises[size_t(e)] = von_mises(mean);
    }
  }
  return f;
}

std::string step_name(int step) {
  std::ostringstream ss;
  ss << "step_" << std::setw(3) << std::setfill('0') << step << ".vtk";
  return ss.str();
}

}  // namespace

RunOutcome mesh_only(const RunConfig& cfg, const std::string& out_dir) {
  RunOutcome out;
  out.out_dir = out_dir;
  out.errors = validate_config(cfg);
  if (!out.errors.empty()) {
    out.exit_code = 1;
    return out;
  }
  try {
    out.mesh = generate_mesh(cfg.domain, cfg.mesh);
    out.mesh.audit();
  } catch (const std::exception& e) {
    out.errors.push_back(std::string("mesh generation: ") + e.what());
    out.exit_code = 1;
    return out;
  }
  fs::create_directories(out_dir);
  write_polymesh(out.mesh, out_dir + "/mesh.polymesh");
  write_vtk(out.mesh, out_dir + "/mesh.vtk");
  return out;
}

RunOutcome run_config(const RunConfig& cfg, const std::string& out_dir, std::ostream* console) {
  const auto t0 = std::chrono::steady_clock::now();
  RunOutcome out;
  out.out_dir = out_dir;
  out.errors = validate_config(cfg);
  if (!out.errors.empty()) {
    out.exit_code = 1;
    return out;
  }

  try {
    out.mesh = generate_mesh(cfg.domain, cfg.mesh);
    out.mesh.audit();
  } catch (const std::exception& e) {
    out.errors.push_back(std::string("mesh generation: ") + e.what());
    out.exit_code = 1;
    return out;
  }
  build_sets(cfg, out.mesh, out.errors);
  if (!out.errors.empty()) {
    out.exit_code = 1;
    return out;
  }

  CrackGeometry crack;
  if (!cfg.crack.empty()) {
    Vec2 lo, hi;
    cfg.domain.bbox(lo, hi);
    crack = make_crack(cfg.crack, cfg.domain);
    try {
      nudge_crack_off_mesh(crack, out.mesh, 1e-6 * (hi - lo).norm());
    } catch (const std::exception& e) {
      out.errors.push_back(std::string("crack placement: ") + e.what());
      out.exit_code = 1;
      return out;
    }
  }

  XfemSpace space = build_space(out.mesh, std::move(crack), cfg.xfem);
  XfemProblem prob(std::move(space), cfg.material);
  for (const auto& d : cfg.dirichlet) prob.add_dirichlet(d);
  for (const auto& t : cfg.tractions) prob.add_traction(t);
  out.n_dofs = prob.space().n_dofs;

  const int n_tips = int(prob.space().crack.tips.size());
  for (int t = 0; t < n_tips; ++t) {
    int holder = -1;
    for (int e = 0; e < out.mesh.n_elems(); ++e)
      if (prob.space().plan.elem_has_tip[size_t(e)] &&
          point_in_polygon(prob.space().crack.tips[size_t(t)].pos, out.mesh.element_polygon(e))) {
        holder = e;
        break;
      }
    out.tip_h.push_back(holder >= 0 ? std::sqrt(out.mesh.element_area(holder)) : 0.0);
  }

  fs::create_directories(out_dir);
  write_polymesh(out.mesh, out_dir + "/mesh.polymesh");
  write_vtk(out.mesh, out_dir + "/mesh.vtk");

  std::ofstream newton_log(out_dir + "/newton.log");
  std::ofstream j_csv, sif_csv, tearing_csv;
  if (!cfg.j_radius_factors.empty() && n_tips > 0) {
    j_csv.open(out_dir + "/j.csv");
    j_csv << "step,load,tip,r_factor,r_outer,J\n";
  }
  if (cfg.sif && n_tips > 0) {
    sif_csv.open(out_dir + "/sif.csv");
    sif_csv << "step,load,tip,KI,KII\n";
  }
  if (cfg.tearing && n_tips > 0) {
    tearing_csv.open(out_dir + "/tearing.csv");
    tearing_csv << "step,load,lambda,W,b,c,J,k_lake,k_lindley,k_yeoh,G_lake,G_lindley,G_yeoh\n";
  }

  Vec2 dlo, dhi;
  cfg.domain.bbox(dlo, dhi);
  const double height = dhi.y() - dlo.y();
  std::vector<int> top_nodes;
  for (int j = 0; j < out.mesh.n_nodes(); ++j)
    if (out.mesh.nodes[size_t(j)].y() > dhi.y() - 1e-9 * height) top_nodes.push_back(j);

  auto on_step = [&](const StepRecord& rec, const Eigen::VectorXd& u) {
    RunOutcome::StepData sd;
    sd.load = rec.load;
    sd.iters = rec.iters;
    const int step = int(out.steps.size());

    double rise = 0;
    for (int j : top_nodes) rise += u[prob.space().node_base[size_t(j)] + 1];
    if (!top_nodes.empty() && height > 0) sd.lambda = 1.0 + rise / double(top_nodes.size()) / height;

    for (int t = 0; t < n_tips; ++t) {
      for (double fct : cfg.j_radius_factors) {
        JIntegralParams jp;
        jp.r_outer = fct * out.tip_h[size_t(t)];
        const double J = j_integral(prob, u, t, jp);
        sd.J.push_back(J);
        j_csv << step << "," << rec.load << "," << t << "," << fct << "," << jp.r_outer << ","
              << J << "\n";
      }
      if (cfg.sif) {
        JIntegralParams jp;
        jp.r_outer = (cfg.j_radius_factors.empty() ? 3.0 : cfg.j_radius_factors.front()) *
                     out.tip_h[size_t(t)];
        double KI = 0, KII = 0;
        stress_intensity_factors(prob, u, t, jp, KI, KII);
        sd.KI.push_back(KI);
        sd.KII.push_back(KII);
        sif_csv << step << "," << rec.load << "," << t << "," << KI << "," << KII << "\n";
      }
    }

    if (cfg.tearing && n_tips > 0 && !sd.J.empty()) {
      sd.b = max_half_opening(prob, u);
      const double lam = sd.lambda;
      const bool eq = cfg.tearing->equibiaxial;
      const double W = cfg.material.energy(cfg.material.farfield_F(lam, eq));
      const double c = cfg.tearing->c;
      double Jmean = 0;
      const size_t per_tip = cfg.j_radius_factors.size();
      for (int t = 0; t < n_tips; ++t) Jmean += sd.J[size_t(t) * per_tip];
      Jmean /= double(n_tips);
      const double kl = tearing_k_surface(lam);
      const double kd = tearing_k_empirical(lam);
      const double ky = tearing_k_blunt(cfg.material, lam, sd.b, W, c);
      tearing_csv << step << "," << rec.load << "," << lam << "," << W << "," << sd.b << "," << c
                  << "," << Jmean << "," << kl << "," << kd << "," << ky << ","
                  << 2 * kl * W * c << "," << 2 * kd * W * c << "," << 2 * ky * W * c << "\n";
    }

    if (cfg.vtk && (step % cfg.vtk_every == 0 || rec.load >= 1.0 - 1e-12)) {
      const VtkFields f = sample_fields(prob, u);
      write_vtk(out.mesh, out_dir + "/" + step_name(step), &f);
    }
    if (console)
      (*console) << "step " << step << " load " << rec.load << " iters " << rec.iters
                 << " lambda " << sd.lambda << "\n";
    out.steps.push_back(std::move(sd));
  };

  SolveResult res = prob.solve(cfg.solve, &newton_log, on_step);
  out.converged = res.converged;
  out.total_iters = res.total_iters;
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  nlohmann::json summary;
  summary["name"] = cfg.name;
  summary["config_version"] = cfg.config_version;
  summary["n_elems"] = out.mesh.n_elems();
  summary["n_nodes"] = out.mesh.n_nodes();
  summary["n_dofs"] = out.n_dofs;
  summary["n_heaviside_nodes"] = prob.space().plan.n_heaviside;
  summary["n_tip_nodes"] = prob.space().plan.n_tip;
  summary["tip_h"] = out.tip_h;
  summary["converged"] = out.converged;
  summary["total_iters"] = out.total_iters;
  summary["wall_seconds"] = out.wall_seconds;
  summary["steps"] = nlohmann::json::array();
  for (const auto& s : res.steps)
    summary["steps"].push_back({{"load", s.load}, {"iters", s.iters}, {"res_rel", s.res_rel}});
  if (!out.steps.empty()) {
    const auto& last = out.steps.back();
    nlohmann::json fin;
    fin["load"] = last.load;
    fin["lambda"] = last.lambda;
    if (!last.J.empty()) fin["J"] = last.J;
    if (!last.KI.empty()) {
      fin["KI"] = last.KI;
      fin["KII"] = last.KII;
    }
    if (cfg.tearing) fin["b"] = last.b;
    summary["final"] = fin;
  }
  std::ofstream(out_dir + "/summary.json") << summary.dump(2) << "\n";

  if (!out.converged) {
    out.errors.push_back("solver did not converge; partial artifacts written");
    out.exit_code = 2;
  }
  return out;
}

void patch_test_table(const std::vector<int>& sizes, std::ostream& os) {
  Domain dom;
  dom.outer = {Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)};
  Eigen::Matrix2d A;
  A << 0.8, 0.25, -0.4, 1.1;
  os << "seeds,elems,L2_corrected,H1_corrected,L2_raw,H1_raw\n";
  for (int n : sizes) {
    MeshSpec spec;
    spec.n_seeds = n;
    spec.rng_seed = 7 + std::uint64_t(n);
    const PolyMesh mesh = generate_mesh(dom, spec);
    const PatchTestResult corr = run_patch_test(mesh, A, true);
    const PatchTestResult raw = run_patch_test(mesh, A, false);
    os << n << "," << corr.n_elems << "," << corr.l2_err << "," << corr.h1_err << ","
       << raw.l2_err << "," << raw.h1_err << "\n";
  }
}

}  // namespace polyxfem
