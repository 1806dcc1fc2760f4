#include "polyxfem/xfem.hpp"

namespace polyxfem {

XfemSpace build_space(const PolyMesh& mesh, CrackGeometry crack, const XfemParams& params) {
  XfemSpace sp;
  sp.mesh = &mesh;
  sp.crack = std::move(crack);
  sp.params = params;
  sp.plan = classify_enrichment(mesh, sp.crack, params.min_side_ratio);

  const int nn = mesh.n_nodes();
  sp.node_base.assign(size_t(nn), 0);
  sp.node_h.assign(size_t(nn), 0.0);
  sp.node_a.assign(size_t(nn), 0.0);
  int next = 0;
  for (int j = 0; j < nn; ++j) {
    sp.node_base[size_t(j)] = next;
    next += 2 * sp.node_pairs(j);
    if (sp.plan.node_kind[size_t(j)] == NodeEnrich::heaviside)
      sp.node_h[size_t(j)] = sp.crack.heaviside(mesh.nodes[size_t(j)]);
    else if (sp.plan.node_kind[size_t(j)] == NodeEnrich::tip)
      sp.node_a[size_t(j)] = sp.crack.branch(sp.plan.node_tip[size_t(j)], mesh.nodes[size_t(j)]);
  }
  sp.n_dofs = next;

  sp.elem_enriched.assign(size_t(mesh.n_elems()), 0);
  for (int e = 0; e < mesh.n_elems(); ++e) {
    bool enr = sp.plan.elem_has_crack[size_t(e)] || sp.plan.elem_has_tip[size_t(e)];
    for (int j : mesh.elems[size_t(e)])
      enr = enr || sp.plan.node_kind[size_t(j)] != NodeEnrich::none;
    sp.elem_enriched[size_t(e)] = enr ? 1 : 0;
  }
  return sp;
}

void evaluate_shapes(const XfemSpace& space, int elem, const Vec2& X,
                     const std::vector<Vec2>* correction, ShapeEval& out) {
  const auto& ring = space.mesh->elems[size_t(elem)];
  const int n = int(ring.size());
  const Polygon poly = space.mesh->element_polygon(elem);

  Eigen::VectorXd N;
  Eigen::Matrix<double, Eigen::Dynamic, 2> dN;
  mean_value_shape_grad(poly, X, N, dN);

  int n_modes = n;
  for (int i = 0; i < n; ++i)
    if (space.plan.node_kind[size_t(ring[size_t(i)])] != NodeEnrich::none) ++n_modes;
  out.gdof.resize(size_t(n_modes));
  out.phi.resize(n_modes);
  out.dphi.resize(n_modes, 2);
  out.n_modes = n_modes;

  for (int i = 0; i < n; ++i) {
    const int j = ring[size_t(i)];
    out.gdof[size_t(i)] = space.node_base[size_t(j)];
    out.phi[i] = N[i];
    Vec2 g = dN.row(i).transpose();
    if (correction) g += (*correction)[size_t(i)];
    out.dphi.row(i) = g.transpose();
  }

  // Enrichment state shared by every tip mode in the element: ramp over the
  // element's tip-enriched nodes keeps blending elements consistent.
  double H = 0.0;
  bool have_h = false;
  double A = 0.0, R = 0.0;
  Vec2 dA = Vec2::Zero(), dR = Vec2::Zero();
  int tip = -1;
  for (int i = 0; i < n; ++i) {
    const int j = ring[size_t(i)];
    if (space.plan.node_kind[size_t(j)] == NodeEnrich::tip) {
      tip = space.plan.node_tip[size_t(j)];
      R += N[i];
      dR += dN.row(i).transpose();
    }
  }
  if (tip >= 0) {
    A = space.crack.branch(tip, X);
    dA = space.crack.branch_grad(tip, X);
  }

  int m = n;
  for (int i = 0; i < n; ++i) {
    const int j = ring[size_t(i)];
    const NodeEnrich kind = space.plan.node_kind[size_t(j)];
    if (kind == NodeEnrich::none) continue;
    out.gdof[size_t(m)] = space.node_base[size_t(j)] + 2;
    const Vec2 gN = dN.row(i).transpose();
    if (kind == NodeEnrich::heaviside) {
      if (!have_h) {
        H = space.crack.heaviside(X);
        have_h = true;
      }
      const double shifted = H - space.node_h[size_t(j)];
      out.phi[m] = N[i] * shifted;
      out.dphi.row(m) = (gN * shifted).transpose();
    } else {
      const double shifted = A - space.node_a[size_t(j)];
      out.phi[m] = N[i] * shifted * R;
      out.dphi.row(m) =
          (gN * shifted * R + N[i] * R * dA + N[i] * shifted * dR).transpose();
    }
    ++m;
  }
}

void evaluate_deformation(const XfemSpace& space, int elem, const Vec2& X,
                          const Eigen::VectorXd& u, const std::vector<Vec2>* correction,
                          Vec2& disp, Eigen::Matrix2d& dudX) {
  ShapeEval sh;
  evaluate_shapes(space, elem, X, correction, sh);
  disp = Vec2::Zero();
  dudX = Eigen::Matrix2d::Zero();
  for (int m = 0; m < sh.n_modes; ++m) {
    const Vec2 um(u[sh.gdof[size_t(m)]], u[sh.gdof[size_t(m)] + 1]);
    disp += sh.phi[m] * um;
    dudX += um * sh.dphi.row(m);
  }
}

QuadratureScheme element_scheme(const XfemSpace& space, int elem) {
  const Polygon poly = space.mesh->element_polygon(elem);
  const bool cracked =
      space.plan.elem_has_crack[size_t(elem)] || space.plan.elem_has_tip[size_t(elem)];
  if (!cracked)
    return triangulate_quadrature(
        poly, space.elem_enriched[size_t(elem)] ? space.params.quad_order_enriched
                                                : space.params.quad_order_std);

  const int order = space.params.quad_order_enriched;
  const double vtx_tol = 1e-9 * polygon_diameter(poly);
  QuadratureScheme s;
  for (const Polygon& piece : split_by_crack(poly, space.crack)) {
    int tv = -1;
    for (size_t i = 0; i < piece.size() && tv < 0; ++i)
      for (const auto& t : space.crack.tips)
        if ((piece[i] - t.pos).norm() < vtx_tol) {
          tv = int(i);
          break;
        }
    if (tv < 0) {
      const QuadratureScheme ps = triangulate_quadrature(piece, order);
      s.points.insert(s.points.end(), ps.points.begin(), ps.points.end());
      s.weights.insert(s.weights.end(), ps.weights.begin(), ps.weights.end());
      continue;
    }
    // Fan about the tip with the tip at the collapsed corner of the product
    // rule, which clusters points toward the sqrt singularity.
    const size_t np = piece.size();
    for (size_t k = 1; k + 1 < np; ++k) {
      const Vec2& vi = piece[(size_t(tv) + k) % np];
      const Vec2& vj = piece[(size_t(tv) + k + 1) % np];
      const Tri tri{vj, piece[size_t(tv)], vi};
      if (tri.area() <= 0.0) continue;
      const QuadratureScheme ts = tri_scheme(tri, order);
      s.points.insert(s.points.end(), ts.points.begin(), ts.points.end());
      s.weights.insert(s.weights.end(), ts.weights.begin(), ts.weights.end());
    }
  }
  return s;
}

}  // namespace polyxfem
