#include "polyxfem/fracture.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace polyxfem {

namespace {

// Runs fn(elem, X, weight, grad_q) over every quadrature point in the plateau
// transition band r_inner < r < r_outer, where the radial weight ramps
// linearly from one to zero. Unenriched band elements get a dense dedicated
// rule because the tip fields decay like 1/sqrt(r).
template <class Fn>
void for_transition_band(const XfemProblem& prob, int tip, const JIntegralParams& params, Fn&& fn) {
  if (!(params.r_outer > 0) || !(params.inner_frac > 0) || !(params.inner_frac < 1))
    throw std::invalid_argument("j_integral: need r_outer > 0 and inner_frac in (0,1)");
  const XfemSpace& sp = prob.space();
  const CrackTip& t = sp.crack.tips.at(size_t(tip));
  const double r2 = params.r_outer;
  const double r1 = params.inner_frac * r2;

  for (int e = 0; e < sp.mesh->n_elems(); ++e) {
    const Polygon poly = sp.mesh->element_polygon(e);
    double rmin = std::numeric_limits<double>::max(), rmax = 0;
    for (size_t k = 0; k < poly.size(); ++k) {
      const Vec2& a = poly[k];
      const Vec2& b = poly[(k + 1) % poly.size()];
      rmin = std::min(rmin, segment_distance(t.pos, a, b));
      rmax = std::max(rmax, (a - t.pos).norm());
    }
    if (rmin >= r2 || rmax <= r1) continue;

    QuadratureScheme dense;
    const bool enriched = sp.elem_enriched[size_t(e)] != 0;
    if (!enriched) dense = triangulate_quadrature(poly, 8);
    const QuadratureScheme& qs = enriched ? prob.scheme(e) : dense;

    for (size_t q = 0; q < qs.size(); ++q) {
      const Vec2& X = qs.points[q];
      const Vec2 rel = X - t.pos;
      const double r = rel.norm();
      if (r <= r1 || r >= r2) continue;
      const Vec2 gq = (-1.0 / ((r2 - r1) * r)) * rel;
      fn(e, X, qs.weights[q], gq);
    }
  }
}

}  // namespace

double j_integral(const XfemProblem& prob, const Eigen::VectorXd& u, int tip,
                  const JIntegralParams& params) {
  const XfemSpace& sp = prob.space();
  const Vec2 e1 = sp.crack.tips.at(size_t(tip)).tangent;
  const bool small_strain = prob.material().is_linear();

  double J = 0;
  for_transition_band(prob, tip, params, [&](int e, const Vec2& X, double w, const Vec2& gq) {
    Vec2 d;
    Eigen::Matrix2d G;
    evaluate_deformation(sp, e, X, u, prob.correction(e), d, G);
    const Eigen::Matrix2d F = Eigen::Matrix2d::Identity() + G;
    const StressState st = prob.material().evaluate(F);
    // Nominal stress referred to the undeformed configuration; the small
    // strain model keeps its engineering stress.
    const Eigen::Matrix2d P =
        small_strain ? st.sigma : Eigen::Matrix2d(st.J * st.sigma * F.inverse().transpose());
    const Vec2 a = G * e1;
    J += w * ((P * gq).dot(a) - st.W * e1.dot(gq));
  });
  return J;
}

void tip_field(int mode, double r, double theta, double shear_mu, double kappa, Vec2& u,
               Eigen::Matrix2d& grad, Eigen::Matrix2d& sigma) {
  const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
  const double c3 = std::cos(1.5 * theta), s3 = std::sin(1.5 * theta);
  const double ct = std::cos(theta), snt = std::sin(theta);
  const double f = 1.0 / std::sqrt(2.0 * std::numbers::pi * r);
  const double g = 0.5 / shear_mu * std::sqrt(r / (2.0 * std::numbers::pi));

  Vec2 du_dr, du_dth;
  if (mode == 0) {
    u = g * Vec2(c * (kappa - ct), s * (kappa - ct));
    du_dr = (0.5 / r) * u;
    du_dth = g * Vec2(-0.5 * s * (kappa - ct) + c * snt, 0.5 * c * (kappa - ct) + s * snt);
    sigma << f * c * (1.0 - s * s3), f * s * c * c3, f * s * c * c3, f * c * (1.0 + s * s3);
  } else {
    u = g * Vec2(s * (kappa + 2.0 + ct), -c * (kappa - 2.0 + ct));
    du_dr = (0.5 / r) * u;
    du_dth = g * Vec2(0.5 * c * (kappa + 2.0 + ct) - s * snt, 0.5 * s * (kappa - 2.0 + ct) + c * snt);
    sigma << -f * s * (2.0 + c * c3), f * c * (1.0 - s * s3), f * c * (1.0 - s * s3),
        f * s * c * c3;
  }
  grad.col(0) = du_dr * ct - du_dth * (snt / r);
  grad.col(1) = du_dr * snt + du_dth * (ct / r);
}

void stress_intensity_factors(const XfemProblem& prob, const Eigen::VectorXd& u, int tip,
                              const JIntegralParams& params, double& KI, double& KII) {
  const Material& mat = prob.material();
  if (!mat.is_linear())
    throw std::invalid_argument("stress_intensity_factors: small strain model required");
  const XfemSpace& sp = prob.space();
  const CrackTip& t = sp.crack.tips.at(size_t(tip));
  double E, nu;
  engineering_from_lame({mat.lambda, mat.mu}, E, nu);
  const double kappa = 3.0 - 4.0 * nu;
  const double estar = E / (1.0 - nu * nu);
  Eigen::Matrix2d Q;
  Q.col(0) = t.tangent;
  Q.col(1) = t.normal;

  double inter[2] = {0, 0};
  for_transition_band(prob, tip, params, [&](int e, const Vec2& X, double w, const Vec2& gq) {
    Vec2 d;
    Eigen::Matrix2d G;
    evaluate_deformation(sp, e, X, u, prob.correction(e), d, G);
    const StressState st = mat.evaluate(Eigen::Matrix2d(Eigen::Matrix2d::Identity() + G));
    const Vec2 a = G * t.tangent;
    double r, th;
    sp.crack.tip_polar(tip, X, r, th);
    for (int m = 0; m < 2; ++m) {
      Vec2 ua;
      Eigen::Matrix2d ga_loc, sa_loc;
      tip_field(m, r, th, mat.mu, kappa, ua, ga_loc, sa_loc);
      const Eigen::Matrix2d ga = Q * ga_loc * Q.transpose();
      const Eigen::Matrix2d sa = Q * sa_loc * Q.transpose();
      const Eigen::Matrix2d ea = 0.5 * (ga + ga.transpose());
      const Vec2 aa = ga * t.tangent;
      const double w_int = (st.sigma.array() * ea.array()).sum();
      inter[m] += w * ((st.sigma * gq).dot(aa) + (sa * gq).dot(a) - w_int * t.tangent.dot(gq));
    }
  });
  KI = 0.5 * estar * inter[0];
  KII = 0.5 * estar * inter[1];
}

double max_half_opening(const XfemProblem& prob, const Eigen::VectorXd& u, int n_samples) {
  const XfemSpace& sp = prob.space();
  const PolyMesh& mesh = *sp.mesh;
  const std::vector<Vec2>& pts = sp.crack.pts;

  double dlen = 0;
  for (size_t k = 0; k + 1 < pts.size(); ++k) dlen += (pts[k + 1] - pts[k]).norm();
  const double eps = 1e-7 * dlen;

  std::vector<int> cut_elems;
  for (int e = 0; e < mesh.n_elems(); ++e)
    if (sp.plan.elem_has_crack[size_t(e)]) cut_elems.push_back(e);

  auto displacement_at = [&](const Vec2& X, Vec2& d) {
    for (int e : cut_elems) {
      if (!point_in_polygon(X, mesh.element_polygon(e))) continue;
      Eigen::Matrix2d G;
      evaluate_deformation(sp, e, X, u, prob.correction(e), d, G);
      return true;
    }
    return false;
  };

  double b = 0;
  for (int i = 1; i < n_samples; ++i) {
    double s = dlen * double(i) / double(n_samples);
    Vec2 X{0, 0}, n{0, 1};
    for (size_t k = 0; k + 1 < pts.size(); ++k) {
      const Vec2 seg = pts[k + 1] - pts[k];
      const double len = seg.norm();
      if (s <= len || k + 2 == pts.size()) {
        const Vec2 tdir = seg / len;
        X = pts[k] + std::min(s, len) * tdir;
        n = Vec2(-tdir.y(), tdir.x());
        break;
      }
      s -= len;
    }
    Vec2 dp, dm;
    if (!displacement_at(X + eps * n, dp) || !displacement_at(X - eps * n, dm)) continue;
    b = std::max(b, 0.5 * (dp - dm).norm());
  }
  return b;
}

double tearing_k_surface(double lam) { return std::numbers::pi / std::sqrt(lam); }

double tearing_k_empirical(double lam) { return (2.95 - 0.08 * (1.0 - lam)) / std::sqrt(lam); }

double tearing_k_blunt(const Material& mat, double lam, double b, double W, double c) {
  // Nominal equibiaxial tip stress 2 (lam - lam^-5)(dW/dI1 + lam^2 dW/dI2).
  const double sig_y =
      2.0 * (lam - std::pow(lam, -5.0)) * (mat.dW_dI1() + lam * lam * mat.dW_dI2());
  return sig_y * std::numbers::pi * b / (4.0 * W * c);
}

}  // namespace polyxfem
