#include "polyxfem/gates.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <future>
#include <iomanip>
#include <limits>
#include <map>
#include <random>
#include <sstream>

#include "polyxfem/config.hpp"
#include "polyxfem/fracture.hpp"
#include "polyxfem/mvc.hpp"
#include "polyxfem/patch_test.hpp"
#include "polyxfem/runner.hpp"

namespace polyxfem {

namespace {

using Clock = std::chrono::steady_clock;
using Eigen::Matrix2d;
using Eigen::Matrix3d;

struct Timer {
  Clock::time_point t0 = Clock::now();
  double s() const { return std::chrono::duration<double>(Clock::now() - t0).count(); }
};

std::string out_root() {
  const char* env = std::getenv("POLYXFEM_OUT");
  return env && *env ? env : "out";
}

std::string pct(double x) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << 100.0 * x << "%";
  return os.str();
}

std::string sci(double x) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(2) << x;
  return os.str();
}

// ---------------------------------------------------------------------------
// 1. Patch test: corrected gradients reproduce a linear field to round-off on
// centroidal Voronoi meshes; raw gradients sit in the expected error band.

GateResult gate_patch_test() {
  Timer tm;
  Matrix2d A;
  A << 0.8, 0.25, -0.4, 1.1;
  Domain dom;
  dom.outer = {Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)};

  bool pass = true;
  std::ostringstream det;
  for (int n : {10, 50, 250}) {
    MeshSpec spec;
    spec.n_seeds = n;
    spec.lloyd_iters = 30;
    spec.rng_seed = 7 + unsigned(n);
    const PolyMesh mesh = generate_mesh(dom, spec);
    const PatchTestResult corr = run_patch_test(mesh, A, true);
    const PatchTestResult raw = run_patch_test(mesh, A, false);
    const bool ok = corr.l2_err <= 1e-12 && corr.h1_err <= 1e-11 && raw.l2_err >= 1e-5 &&
                    raw.l2_err <= 1e-3;
    pass = pass && ok;
    det << (n == 10 ? "" : "; ") << corr.n_elems << " elems L2c=" << sci(corr.l2_err)
        << " H1c=" << sci(corr.h1_err) << " L2raw=" << sci(raw.l2_err);
  }
  pass = pass && tm.s() < 10.0;
  return {1, "patch test to machine precision with corrected gradients", pass, det.str(), tm.s()};
}

// ---------------------------------------------------------------------------
// 2. Shape function properties on random star-shaped 3-10-gons.

Polygon random_star_polygon(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> nv(3, 10);
  std::uniform_real_distribution<double> jit(0.15, 0.85), rad(0.5, 1.4);
  const int n = nv(rng);
  Polygon p;
  for (int i = 0; i < n; ++i) {
    const double a = 2.0 * M_PI * (double(i) + jit(rng)) / double(n);
    p.push_back(rad(rng) * Vec2(std::cos(a), std::sin(a)));
  }
  return p;  // strictly increasing angles: simple and CCW
}

GateResult gate_basis() {
  Timer tm;
  std::mt19937_64 rng(2024);
  double w_pu = 0, w_kron = 0, w_lin = 0, w_grad = 0;
  int pts = 0;
  Eigen::VectorXd N, Np, Nm;
  Eigen::Matrix<double, Eigen::Dynamic, 2> dN;
  while (pts < 1000) {
    const Polygon poly = random_star_polygon(rng);
    const size_t n = poly.size();
    for (size_t i = 0; i < n; ++i) {
      mean_value_shape(poly, poly[i], N);
      for (size_t j = 0; j < n; ++j)
        w_kron = std::max(w_kron, std::abs(N[long(j)] - (i == j ? 1.0 : 0.0)));
    }
    Vec2 lo, hi;
    polygon_bbox(poly, lo, hi);
    std::uniform_real_distribution<double> ux(lo.x(), hi.x()), uy(lo.y(), hi.y());
    for (int trial = 0; trial < 200 && pts < 1000; ++trial) {
      const Vec2 x(ux(rng), uy(rng));
      if (!point_in_polygon(x, poly)) continue;
      bool clear = true;
      for (size_t i = 0; i < n && clear; ++i)
        clear = segment_distance(x, poly[i], poly[(i + 1) % n]) > 2e-3;
      if (!clear) continue;

      mean_value_shape_grad(poly, x, N, dN);
      w_pu = std::max(w_pu, std::abs(N.sum() - 1.0));
      Vec2 rec = Vec2::Zero();
      for (size_t i = 0; i < n; ++i) rec += N[long(i)] * poly[i];
      w_lin = std::max(w_lin, (rec - x).norm());

      const double h = 1e-6;
      for (int k = 0; k < 2; ++k) {
        Vec2 xp = x, xm = x;
        xp[k] += h;
        xm[k] -= h;
        mean_value_shape(poly, xp, Np);
        mean_value_shape(poly, xm, Nm);
        const Eigen::VectorXd fd = (Np - Nm) / (2.0 * h);
        w_grad = std::max(w_grad, (dN.col(k) - fd).norm() / std::max(1.0, dN.col(k).norm()));
      }
      ++pts;
    }
  }
  const bool pass =
      w_pu <= 1e-10 && w_kron <= 1e-10 && w_lin <= 1e-10 && w_grad <= 1e-6 && tm.s() < 5.0;
  std::ostringstream det;
  det << pts << " pts: PU=" << sci(w_pu) << " kronecker=" << sci(w_kron) << " linear=" << sci(w_lin)
      << " grad_fd=" << sci(w_grad);
  return {2, "partition of unity, Kronecker delta, completeness, gradients", pass, det.str(),
          tm.s()};
}

// ---------------------------------------------------------------------------
// 3. Material oracles: FD tangents, stress-free identity, objectivity,
// plane-stress incompressibility.

Matrix2d rand_F(std::mt19937_64& rng, double spread = 0.4) {
  std::uniform_real_distribution<double> u(-spread, spread);
  Matrix2d F;
  do {
    F << 1.0 + u(rng), u(rng), u(rng), 1.0 + u(rng);
  } while (F.determinant() < 0.3);
  return F;
}

Matrix2d rand_sym(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  const double a = u(rng), b = u(rng), c = u(rng);
  return (Matrix2d() << a, c, c, b).finished();
}

// Contract a minor-symmetric Voigt modulus with a symmetric dC.
Matrix2d voigt_contract(const Matrix3d& V, const Matrix2d& dC) {
  Matrix2d R;
  R(0, 0) = V(0, 0) * dC(0, 0) + V(0, 1) * dC(1, 1) + 2.0 * V(0, 2) * dC(0, 1);
  R(1, 1) = V(1, 0) * dC(0, 0) + V(1, 1) * dC(1, 1) + 2.0 * V(1, 2) * dC(0, 1);
  R(0, 1) = R(1, 0) = V(2, 0) * dC(0, 0) + V(2, 1) * dC(1, 1) + 2.0 * V(2, 2) * dC(0, 1);
  return R;
}

// In-plane 2nd Piola stress of the compressible plane-strain model from the
// energy, independent of the push-forward used in evaluate().
Matrix2d nh_plane_strain_S(const Material& mat, const Matrix2d& C) {
  const double lnJ = 0.5 * std::log(C.determinant());
  const Matrix2d Ci = C.inverse();
  return mat.mu * (Matrix2d::Identity() - Ci) + mat.lambda * lnJ * Ci;
}

GateResult gate_material() {
  Timer tm;
  const Material mats[] = {Material::neo_hookean_compressible(5e4, 0.3),
                           Material::neo_hookean_ps(0.4225e6),
                           Material::mooney_rivlin_ps(3.6969e5, -0.5281e5),
                           Material::linear(5e4, 0.45)};
  std::mt19937_64 rng(77);
  double w_tan = 0, w_id = 0, w_obj = 0, w_thick = 0;
  const double h = 1e-6;
  for (const Material& mat : mats) {
    const double scale = mat.incompressible_plane_stress()
                             ? std::abs(mat.mu1) + std::abs(mat.mu2)
                             : mat.mu + std::abs(mat.lambda);
    const StressState id = mat.evaluate(Matrix2d::Identity());
    w_id = std::max(w_id, id.sigma.norm() / scale);

    for (int trial = 0; trial < 100; ++trial) {
      const Matrix2d F = rand_F(rng, mat.is_linear() ? 0.002 : 0.4);
      const StressState st = mat.evaluate(F);

      const double th = std::uniform_real_distribution<double>(-M_PI, M_PI)(rng);
      Matrix2d Q;
      Q << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
      if (!mat.is_linear()) {
        const StressState rot = mat.evaluate(Q * F);
        w_obj = std::max(w_obj, (rot.sigma - Q * st.sigma * Q.transpose()).norm() /
                                    (1.0 + st.sigma.norm()));
      }
      if (mat.incompressible_plane_stress())
        w_thick = std::max(w_thick, std::abs(F.determinant() * st.thickness_ratio - 1.0));

      if (mat.is_linear()) {
        // sigma is linear in the strain: FD columns reproduce the modulus.
        const Matrix2d dirs[3] = {(Matrix2d() << 1, 0, 0, 0).finished(),
                                  (Matrix2d() << 0, 0, 0, 1).finished(),
                                  (Matrix2d() << 0, 0.5, 0.5, 0).finished()};
        for (int b = 0; b < 3; ++b) {
          const Matrix2d sp = mat.evaluate(F + h * dirs[b]).sigma;
          const Matrix2d sm = mat.evaluate(F - h * dirs[b]).sigma;
          const Matrix2d col = (sp - sm) / (2.0 * h);
          const Eigen::Vector3d fd(col(0, 0), col(1, 1), col(0, 1));
          w_tan = std::max(w_tan, (fd - st.tangent.col(b)).norm() / st.tangent.norm());
        }
      } else if (mat.incompressible_plane_stress()) {
        const Matrix2d C = F.transpose() * F;
        const Matrix3d CE = plane_stress_material_tangent(mat, C);
        const Matrix2d dC = rand_sym(rng);
        const Matrix2d dS =
            (plane_stress_S(mat, C + h * dC) - plane_stress_S(mat, C - h * dC)) / (2.0 * h);
        const Matrix2d pred = 0.5 * voigt_contract(CE, dC);
        w_tan = std::max(w_tan, (dS - pred).norm() / scale);
      } else {
        // Pull the coded spatial tangent back and compare with 2 dS/dC of the
        // energy-derived plane-strain S.
        const Matrix2d C = F.transpose() * F;
        Matrix3d CE;
        const Matrix2d dirs[3] = {(Matrix2d() << 1, 0, 0, 0).finished(),
                                  (Matrix2d() << 0, 0, 0, 1).finished(),
                                  (Matrix2d() << 0, 0.5, 0.5, 0).finished()};
        for (int b = 0; b < 3; ++b) {
          const Matrix2d dS = (nh_plane_strain_S(mat, C + h * dirs[b]) -
                               nh_plane_strain_S(mat, C - h * dirs[b])) /
                              (2.0 * h);
          CE(0, b) = 2.0 * dS(0, 0);
          CE(1, b) = 2.0 * dS(1, 1);
          CE(2, b) = 2.0 * dS(0, 1);
        }
        const Matrix3d spatial = push_forward_tangent(F, CE) / F.determinant();
        w_tan = std::max(w_tan, (spatial - st.tangent).norm() / (1.0 + st.tangent.norm()));
      }
    }
  }
  const bool pass = w_tan <= 1e-4 && w_id <= 1e-14 && w_obj <= 1e-10 && w_thick <= 1e-12 &&
                    tm.s() < 5.0;
  std::ostringstream det;
  det << "tangent_fd=" << sci(w_tan) << " sigma(I)=" << sci(w_id) << " objectivity=" << sci(w_obj)
      << " thickness=" << sci(w_thick);
  return {3, "material tangents, stress-free identity, objectivity", pass, det.str(), tm.s()};
}

// ---------------------------------------------------------------------------
// 4. Enriched kinematics: reduction to plain shape functions with zero
// enriched dofs; F against finite differences of the deformed map.

struct CrackedGrid {
  PolyMesh mesh;
  XfemSpace space;

  explicit CrackedGrid(int n) {
    Domain dom;
    dom.outer = {Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)};
    MeshSpec spec;
    spec.grid_cell = 1.0 / n;
    mesh = generate_mesh(dom, spec);
    const double y = (0.5 + std::floor(0.5 * n)) / n;
    CrackGeometry crack = make_crack({Vec2(-0.1, y), Vec2(0.5 + 0.5 / n, y)}, dom);
    space = build_space(mesh, std::move(crack), XfemParams{});
  }
};

GateResult gate_kinematics() {
  Timer tm;
  CrackedGrid cg(8);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> un(-0.2, 0.2);

  // Standard-only displacement: every enriched slot stays zero.
  Eigen::VectorXd u = Eigen::VectorXd::Zero(cg.space.n_dofs);
  for (int j = 0; j < cg.mesh.n_nodes(); ++j) {
    u[cg.space.node_base[size_t(j)]] = un(rng);
    u[cg.space.node_base[size_t(j)] + 1] = un(rng);
  }

  double w_red = 0;
  Eigen::VectorXd N;
  Eigen::Matrix<double, Eigen::Dynamic, 2> dN;
  int reduced = 0;
  for (int e = 0; e < cg.mesh.n_elems(); ++e) {
    if (!cg.space.elem_enriched[size_t(e)] && e % 7 != 0) continue;
    const Polygon poly = cg.mesh.element_polygon(e);
    Vec2 lo, hi;
    polygon_bbox(poly, lo, hi);
    std::uniform_real_distribution<double> uu(0.25, 0.75);
    for (int trial = 0; trial < 12; ++trial) {
      const Vec2 X(lo.x() + uu(rng) * (hi.x() - lo.x()), lo.y() + uu(rng) * (hi.y() - lo.y()));
      if (!point_in_polygon(X, poly)) continue;
      if (cg.space.crack.distance(X) < 1e-3) continue;
      Vec2 d;
      Matrix2d g;
      evaluate_deformation(cg.space, e, X, u, nullptr, d, g);
      mean_value_shape_grad(poly, X, N, dN);
      Vec2 dm = Vec2::Zero();
      Matrix2d gm = Matrix2d::Zero();
      const auto& ring = cg.mesh.elems[size_t(e)];
      for (size_t i = 0; i < ring.size(); ++i) {
        const Vec2 ui(u[cg.space.node_base[size_t(ring[i])]],
                      u[cg.space.node_base[size_t(ring[i])] + 1]);
        dm += N[long(i)] * ui;
        gm += ui * dN.row(long(i));
      }
      w_red = std::max(w_red, (d - dm).norm() + (g - gm).norm());
      ++reduced;
    }
  }

  // Full random vector: the coded gradient against the differenced map.
  for (int i = 0; i < cg.space.n_dofs; ++i) u[i] = un(rng);
  double w_fd = 0;
  int fd_pts = 0;
  const double h = 1e-7;
  for (int e = 0; e < cg.mesh.n_elems(); ++e) {
    if (!cg.space.elem_enriched[size_t(e)]) continue;
    const Polygon poly = cg.mesh.element_polygon(e);
    const size_t n = poly.size();
    Vec2 lo, hi;
    polygon_bbox(poly, lo, hi);
    std::uniform_real_distribution<double> uu(0.2, 0.8);
    for (int trial = 0; trial < 40; ++trial) {
      const Vec2 X(lo.x() + uu(rng) * (hi.x() - lo.x()), lo.y() + uu(rng) * (hi.y() - lo.y()));
      if (!point_in_polygon(X, poly)) continue;
      bool clear = cg.space.crack.distance(X) > 1e-3;
      for (const auto& t : cg.space.crack.tips) clear = clear && (X - t.pos).norm() > 5e-3;
      for (size_t i = 0; i < n && clear; ++i)
        clear = segment_distance(X, poly[i], poly[(i + 1) % n]) > 1e-3;
      if (!clear) continue;

      Vec2 d0;
      Matrix2d g;
      evaluate_deformation(cg.space, e, X, u, nullptr, d0, g);
      Matrix2d fd;
      for (int k = 0; k < 2; ++k) {
        Vec2 Xp = X, Xm = X;
        Xp[k] += h;
        Xm[k] -= h;
        Vec2 dp, dm;
        Matrix2d tmp;
        evaluate_deformation(cg.space, e, Xp, u, nullptr, dp, tmp);
        evaluate_deformation(cg.space, e, Xm, u, nullptr, dm, tmp);
        fd.col(k) = (dp - dm) / (2.0 * h);
      }
      const Matrix2d F = Matrix2d::Identity() + g;
      const Matrix2d Ffd = Matrix2d::Identity() + fd;
      w_fd = std::max(w_fd, (F - Ffd).norm() / (1.0 + F.norm()));
      ++fd_pts;
    }
  }

  const bool pass = w_red <= 1e-12 && w_fd <= 1e-5 && reduced > 30 && fd_pts > 20 &&
                    tm.s() < 10.0;
  std::ostringstream det;
  det << "reduction=" << sci(w_red) << " (" << reduced << " pts) F_fd=" << sci(w_fd) << " ("
      << fd_pts << " pts on enriched elems)";
  return {4, "enriched kinematics reduce to standard; F matches the map", pass, det.str(), tm.s()};
}

// ---------------------------------------------------------------------------
// 5. Global tangent on the smallest fully enriched patch.

GateResult gate_global_tangent() {
  Timer tm;
  double worst = 0;
  int n_dofs = 0;
  for (const bool incompressible : {false, true}) {
    CrackedGrid cg(2);  // 4 elements: one cut, one holding the tip
    const Material mat = incompressible ? Material::mooney_rivlin_ps(1.4, 0.3)
                                        : Material::neo_hookean_compressible(2.0, 0.3);
    XfemProblem prob(cg.space, mat);
    n_dofs = cg.space.n_dofs;

    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> un(-0.03, 0.03);
    Eigen::VectorXd u(cg.space.n_dofs);
    for (int i = 0; i < cg.space.n_dofs; ++i) u[i] = un(rng);

    Eigen::VectorXd f0;
    std::vector<Eigen::Triplet<double>> trips;
    prob.assemble(u, &f0, &trips);
    Eigen::SparseMatrix<double> K(cg.space.n_dofs, cg.space.n_dofs);
    K.setFromTriplets(trips.begin(), trips.end());

    const double h = 1e-6;
    for (int trial = 0; trial < 8; ++trial) {
      Eigen::VectorXd v(cg.space.n_dofs);
      for (int i = 0; i < cg.space.n_dofs; ++i) v[i] = un(rng);
      v.normalize();
      Eigen::VectorXd fp, fm;
      prob.assemble(u + h * v, &fp, nullptr);
      prob.assemble(u - h * v, &fm, nullptr);
      const Eigen::VectorXd fd = (fp - fm) / (2.0 * h);
      worst = std::max(worst, (fd - K * v).norm() / K.norm());
    }
  }
  const bool pass = worst <= 1e-4 && tm.s() < 10.0;
  std::ostringstream det;
  det << "directional fd=" << sci(worst) << " on " << n_dofs << " dofs, both model families";
  return {5, "assembled tangent matches differenced internal force", pass, det.str(), tm.s()};
}

// ---------------------------------------------------------------------------
// Benchmark waves: configs from the bench directory, run in parallel, results
// compared load-by-load (bisection may refine steps, so rows match on load).

struct BenchRun {
  std::string name;
  RunConfig cfg;
  RunOutcome out;
};

std::vector<BenchRun> run_wave(const std::vector<std::string>& names, std::ostream* progress) {
  std::vector<BenchRun> runs(names.size());
  std::vector<std::future<RunOutcome>> futs;
  for (size_t i = 0; i < names.size(); ++i) {
    runs[i].name = names[i];
    runs[i].cfg = load_config(bench_dir() + "/" + names[i] + ".json");
    const RunConfig cfg = runs[i].cfg;
    const std::string dir = out_root() + "/gates/" + names[i];
    futs.push_back(std::async(std::launch::async,
                              [cfg, dir] { return run_config(cfg, dir, nullptr); }));
  }
  for (size_t i = 0; i < names.size(); ++i) {
    runs[i].out = futs[i].get();
    if (progress)
      (*progress) << "  " << runs[i].name << ": " << runs[i].out.mesh.n_elems() << " elems, "
                  << (runs[i].out.converged ? "converged" : "FAILED") << " in "
                  << std::fixed << std::setprecision(1) << runs[i].out.wall_seconds << "s\n";
  }
  return runs;
}

long load_key(double load) { return std::lround(load * 1e6); }

// Mean over tips of the J column at one radius index.
double j_at(const RunOutcome::StepData& s, size_t n_factors, size_t idx) {
  const size_t tips = s.J.size() / n_factors;
  double sum = 0;
  for (size_t t = 0; t < tips; ++t) sum += s.J[t * n_factors + idx];
  return sum / double(tips);
}

std::map<long, double> j_by_load(const BenchRun& r, size_t idx) {
  std::map<long, double> m;
  const size_t nf = r.cfg.j_radius_factors.size();
  for (const auto& s : r.out.steps) m[load_key(s.load)] = j_at(s, nf, idx);
  return m;
}

GateResult gate_edge_crack(const std::vector<BenchRun>& runs, double elapsed) {
  const BenchRun& quad = runs[0];
  bool pass = true;
  std::ostringstream det;
  for (const auto& r : runs) {
    pass = pass && r.out.converged;
    if (!r.out.converged) det << r.name << " DID NOT CONVERGE; ";
  }
  // The first configured radius of every mesh realizes one common physical
  // extraction radius, so J is compared at equal loads and equal r.
  const std::map<long, double> jq = j_by_load(quad, 0);
  for (size_t i = 1; i < runs.size() && pass; ++i) {
    const std::map<long, double> jp = j_by_load(runs[i], 0);
    double dmin = std::numeric_limits<double>::infinity(), dmax = 0;
    size_t matched = 0;
    for (const auto& [k, j] : jp) {
      const auto it = jq.find(k);
      if (it == jq.end()) continue;
      const double dev = std::abs(j / it->second - 1.0);
      dmin = std::min(dmin, dev);
      dmax = std::max(dmax, dev);
      ++matched;
    }
    const bool coarse = runs[i].name.find("coarse") != std::string::npos;
    const bool ok = matched >= 3 * jp.size() / 4 &&
                    (coarse ? dmin > 0.10 : dmax <= 0.05);
    pass = pass && ok;
    det << runs[i].name << " " << runs[i].out.mesh.n_elems() << "e dev " << pct(dmin) << ".."
        << pct(dmax) << " (" << matched << " loads" << (coarse ? ", >10% required" : ", <=5%")
        << "); ";
  }
  pass = pass && elapsed < 600.0;
  return {6, "edge crack J: refined polygonal meshes track the quad reference", pass, det.str(),
          elapsed};
}

// J deviation from a tearing-energy estimate, per recorded step.
std::vector<double> tearing_devs(const BenchRun& r, bool yeoh) {
  std::vector<double> devs;
  const size_t nf = r.cfg.j_radius_factors.size();
  const double c = r.cfg.tearing->c;
  const bool eq = r.cfg.tearing->equibiaxial;
  for (const auto& s : r.out.steps) {
    const double W = r.cfg.material.energy(r.cfg.material.farfield_F(s.lambda, eq));
    const double k = yeoh ? tearing_k_blunt(r.cfg.material, s.lambda, s.b, W, c)
                          : tearing_k_empirical(s.lambda);
    devs.push_back(std::abs(j_at(s, nf, 0) / (2.0 * k * W * c) - 1.0));
  }
  return devs;
}

bool tail_decreases(const std::vector<double>& devs, size_t n) {
  if (devs.size() < n) return false;
  for (size_t i = devs.size() - n; i + 1 < devs.size(); ++i)
    if (devs[i + 1] > devs[i] + 1e-12) return false;
  return true;
}

GateResult gate_tearing(const std::vector<BenchRun>& runs, double elapsed) {
  const BenchRun& uni = runs[0];
  const BenchRun& uni_mr = runs[1];
  const BenchRun& equi = runs[2];
  const BenchRun& equi_mr = runs[3];
  const BenchRun& equi_low = runs[4];
  bool pass = true;
  std::ostringstream det;
  for (const auto& r : runs) {
    pass = pass && r.out.converged;
    if (!r.out.converged) det << r.name << " DID NOT CONVERGE; ";
  }
  if (pass) {
    const std::vector<double> du = tearing_devs(uni, false);
    const std::vector<double> de = tearing_devs(equi_low, true);
    const bool uni_ok = tail_decreases(du, 10) && du.back() <= 0.15;
    const bool equi_ok = tail_decreases(de, 10) && de.back() <= 0.15;

    // Material contrast at equal loads; the equibiaxial pair drives the
    // second invariant hardest and shows the visible separation.
    const std::map<long, double> jn = j_by_load(equi, 0), jm = j_by_load(equi_mr, 0);
    double sep = 0;
    const long kf = load_key(equi.out.steps.back().load);
    if (jm.count(kf)) sep = std::abs(jm.at(kf) / jn.at(kf) - 1.0);
    const std::map<long, double> ju = j_by_load(uni, 0), jum = j_by_load(uni_mr, 0);
    double sep_uni = 0;
    const long ku = load_key(uni.out.steps.back().load);
    if (jum.count(ku)) sep_uni = std::abs(jum.at(ku) / ju.at(ku) - 1.0);

    pass = uni_ok && equi_ok && sep >= 0.05;
    det << "uniaxial dev->" << pct(du.back()) << (uni_ok ? " decreasing" : " NOT decreasing")
        << "; equibiaxial dev->" << pct(de.back()) << (equi_ok ? " decreasing" : " NOT decreasing")
        << "; MR/NH separation " << pct(sep) << " equibiaxial (uniaxial " << pct(sep_uni) << ")";
  }
  pass = pass && elapsed < 900.0;
  return {7, "center crack J approaches tearing-energy estimates; models separate", pass,
          det.str(), elapsed};
}

GateResult gate_inclined_crack(const std::vector<BenchRun>& runs, double elapsed) {
  const BenchRun& poly = runs[0];
  const BenchRun& quad = runs[1];
  bool pass = poly.out.converged && quad.out.converged;
  std::ostringstream det;
  if (pass) {
    std::map<long, const RunOutcome::StepData*> qs;
    for (const auto& s : quad.out.steps) qs[load_key(s.load)] = &s;
    bool mono = true;
    double ki_dev = 0, kii_num = 0, kii_den = 0;
    size_t matched = 0;
    double prev = -std::numeric_limits<double>::infinity();
    for (const auto& s : poly.out.steps) {
      mono = mono && s.KI[0] > prev;
      prev = s.KI[0];
      const auto it = qs.find(load_key(s.load));
      if (it == qs.end()) continue;
      ++matched;
      ki_dev = std::max(ki_dev, std::abs(s.KI[0] / it->second->KI[0] - 1.0));
      kii_num = std::max(kii_num, std::abs(s.KII[0] - it->second->KII[0]));
      kii_den = std::max(kii_den, std::abs(it->second->KII[0]));
    }
    const double kii_dev = kii_num / kii_den;
    pass = mono && matched >= 3 * poly.out.steps.size() / 4 && ki_dev <= 0.05 && kii_dev <= 0.15;
    det << poly.out.mesh.n_elems() << "e vs " << quad.out.mesh.n_elems() << "e: KI "
        << (mono ? "monotone" : "NOT monotone") << ", dev " << pct(ki_dev) << " (<=5%), KII "
        << pct(kii_dev) << " of peak (<=15%), " << matched << " loads";
  } else {
    det << "poly converged=" << poly.out.converged << " quad converged=" << quad.out.converged;
  }
  pass = pass && elapsed < 900.0;
  return {8, "mixed-mode intensity factors match the fine quad reference", pass, det.str(),
          elapsed};
}

GateResult gate_domain_independence(const BenchRun& fine) {
  // Fine edge-crack run, final state: radii 2h, 3h, 5h sit at configured
  // indices 1..3 after the shared comparison radius.
  Timer tm;
  bool pass = fine.out.converged && !fine.out.steps.empty();
  std::ostringstream det;
  if (pass) {
    const auto& s = fine.out.steps.back();
    const size_t nf = fine.cfg.j_radius_factors.size();
    double jmin = std::numeric_limits<double>::infinity(), jmax = 0;
    for (size_t idx = 1; idx < nf; ++idx) {
      const double j = j_at(s, nf, idx);
      jmin = std::min(jmin, j);
      jmax = std::max(jmax, j);
    }
    const double spread = (jmax - jmin) / jmin;
    pass = spread <= 0.05;
    det << "final-state J over radii {2h,3h,5h}: spread " << pct(spread) << " (<=5%)";
  }
  return {9, "J is independent of the extraction radius", pass, det.str(), tm.s()};
}

GateResult gate_small_strain(const std::vector<BenchRun>& runs, double elapsed) {
  const BenchRun& r = runs[0];
  bool pass = r.out.converged && !r.out.steps.empty();
  std::ostringstream det;
  if (pass) {
    const auto& s = r.out.steps.back();
    double E = 0, nu = 0;
    engineering_from_lame({r.cfg.material.lambda, r.cfg.material.mu}, E, nu);
    const double j_k = s.KI[0] * s.KI[0] * (1.0 - nu * nu) / E;
    const double j = j_at(s, r.cfg.j_radius_factors.size(), 0);
    const double dev = std::abs(j / j_k - 1.0);
    pass = dev <= 0.05;
    det << "strain " << pct(s.lambda - 1.0) << ": J=" << sci(j) << " vs KI^2(1-nu^2)/E="
        << sci(j_k) << ", dev " << pct(dev) << " (<=5%)";
  }
  pass = pass && elapsed < 600.0;
  return {10, "J agrees with the mode-I intensity conversion at small strain", pass, det.str(),
          elapsed};
}

}  // namespace

std::string bench_dir() {
  const char* env = std::getenv("POLYXFEM_BENCH_DIR");
  if (env && *env) return env;
#ifdef POLYXFEM_BENCH_DIR_DEFAULT
  return POLYXFEM_BENCH_DIR_DEFAULT;
#else
  return "bench";
#endif
}

std::vector<GateResult> run_all_gates(std::ostream* progress) {
  std::vector<GateResult> results;
  const auto note = [&](const GateResult& g) {
    if (progress)
      (*progress) << "criterion " << g.id << ": " << (g.pass ? "PASS" : "FAIL") << " (" << std::fixed
                  << std::setprecision(1) << g.seconds << "s)\n";
    results.push_back(g);
  };

  note(gate_patch_test());
  note(gate_basis());
  note(gate_material());
  note(gate_kinematics());
  note(gate_global_tangent());

  if (progress) (*progress) << "edge-crack wave (4 meshes)...\n";
  const auto edge = run_wave({"edge_crack_quad", "edge_crack_poly_coarse", "edge_crack_poly_mid",
                              "edge_crack_poly_fine"},
                             progress);
  note(gate_edge_crack(edge));

  if (progress) (*progress) << "tearing wave (5 runs)...\n";
  const auto tear = run_wave({"center_crack_uniaxial", "center_crack_uniaxial_mr",
                              "center_crack_equibiaxial", "center_crack_equibiaxial_mr",
                              "center_crack_equibiaxial_low"},
                             progress);
  note(gate_tearing(tear));

  if (progress) (*progress) << "inclined-crack wave (2 meshes)...\n";
  const auto incl = run_wave({"inclined_crack_poly", "inclined_crack_quad"}, progress);
  note(gate_inclined_crack(incl));

  note(gate_domain_independence(edge.back()));

  if (progress) (*progress) << "small-strain run...\n";
  const auto small = run_wave({"edge_crack_small_strain"}, progress);
  note(gate_small_strain(small));

  return results;
}

}  // namespace polyxfem
