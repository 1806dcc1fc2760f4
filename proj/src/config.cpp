#include "polyxfem/config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace polyxfem {

namespace {

using nlohmann::json;

Vec2 to_vec2(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw std::runtime_error(std::string(what) + ": expected [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

Polygon to_polygon(const json& j, const char* what) {
  Polygon p;
  for (const auto& v : j) p.push_back(to_vec2(v, what));
  if (p.size() < 3) throw std::runtime_error(std::string(what) + ": needs at least 3 vertices");
  return p;
}

json from_vec2(const Vec2& v) { return json::array({v.x(), v.y()}); }

json from_polygon(const Polygon& p) {
  json j = json::array();
  for (const auto& v : p) j.push_back(from_vec2(v));
  return j;
}

Material parse_material(const json& j) {
  const std::string model = j.at("model").get<std::string>();
  if (model == "neo_hookean")
    return Material::neo_hookean_compressible(j.at("E").get<double>(), j.at("nu").get<double>());
  if (model == "neo_hookean_incompressible")
    return Material::neo_hookean_ps(j.at("mu").get<double>());
  if (model == "mooney_rivlin_incompressible")
    return Material::mooney_rivlin_ps(j.at("mu1").get<double>(), j.at("mu2").get<double>());
  if (model == "linear_elastic")
    return Material::linear(j.at("E").get<double>(), j.at("nu").get<double>());
  throw std::runtime_error("material.model: unknown model '" + model + "'");
}

json serialize_material(const Material& m) {
  json j;
  j["model"] = m.name();
  if (m.incompressible_plane_stress()) {
    if (m.kind == Material::Kind::neo_hookean_incompressible) {
      j["mu"] = m.mu1;
    } else {
      j["mu1"] = m.mu1;
      j["mu2"] = m.mu2;
    }
  } else {
    double E, nu;
    engineering_from_lame({m.lambda, m.mu}, E, nu);
    j["E"] = E;
    j["nu"] = nu;
  }
  return j;
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("config syntax: ") + e.what());
  }

  RunConfig cfg;
  try {
    cfg.config_version = j.at("config_version").get<int>();
    cfg.name = j.value("name", std::string("run"));

    const json& g = j.at("geometry");
    cfg.domain.outer = to_polygon(g.at("domain"), "geometry.domain");
    for (const auto& h : g.value("holes", json::array()))
      cfg.domain.holes.push_back(to_polygon(h, "geometry.holes"));
    for (const auto& p : g.value("crack", json::array()))
      cfg.crack.push_back(to_vec2(p, "geometry.crack"));

    const json& m = j.at("mesh");
    cfg.mesh.n_seeds = m.value("n_seeds", 0);
    cfg.mesh.lloyd_iters = m.value("lloyd_iters", 100);
    cfg.mesh.rng_seed = m.value("rng_seed", 1ull);
    cfg.mesh.grid_cell = m.value("grid_cell", 0.0);
    if (m.contains("refine")) {
      RefineZone rz;
      const json& r = m.at("refine");
      rz.lo = to_vec2(r.at("lo"), "mesh.refine.lo");
      rz.hi = to_vec2(r.at("hi"), "mesh.refine.hi");
      rz.cell_size = r.at("cell").get<double>();
      rz.align = r.contains("align") ? to_vec2(r.at("align"), "mesh.refine.align")
                                     : Vec2(0.5 * (rz.lo + rz.hi));
      cfg.mesh.refine = rz;
    }

    cfg.material = parse_material(j.at("material"));

    if (j.contains("xfem")) {
      const json& x = j.at("xfem");
      cfg.xfem.quad_order_std = x.value("quad_order_std", cfg.xfem.quad_order_std);
      cfg.xfem.quad_order_enriched = x.value("quad_order_enriched", cfg.xfem.quad_order_enriched);
      cfg.xfem.corrected_gradients = x.value("corrected_gradients", cfg.xfem.corrected_gradients);
      cfg.xfem.min_side_ratio = x.value("min_side_ratio", cfg.xfem.min_side_ratio);
    }
    if (j.contains("solver")) {
      const json& s = j.at("solver");
      cfg.solve.n_steps = s.value("n_steps", cfg.solve.n_steps);
      cfg.solve.max_iters = s.value("max_iters", cfg.solve.max_iters);
      cfg.solve.tol = s.value("tol", cfg.solve.tol);
      cfg.solve.max_bisect = s.value("max_bisect", cfg.solve.max_bisect);
      cfg.solve.edge_gauss = s.value("edge_gauss", cfg.solve.edge_gauss);
    }

    if (j.contains("sets")) {
      for (const auto& n : j.at("sets").value("nodes", json::array())) {
        SetSpec s;
        s.name = n.at("name").get<std::string>();
        s.lo = to_vec2(n.at("box").at(0), "sets.nodes.box");
        s.hi = to_vec2(n.at("box").at(1), "sets.nodes.box");
        cfg.node_sets.push_back(s);
      }
      for (const auto& n : j.at("sets").value("edges", json::array())) {
        SetSpec s;
        s.name = n.at("name").get<std::string>();
        s.lo = to_vec2(n.at("box").at(0), "sets.edges.box");
        s.hi = to_vec2(n.at("box").at(1), "sets.edges.box");
        cfg.edge_sets.push_back(s);
      }
    }
    if (j.contains("bcs")) {
      for (const auto& d : j.at("bcs").value("dirichlet", json::array())) {
        DirichletBC bc;
        bc.node_set = d.at("set").get<std::string>();
        if (d.contains("ux")) bc.ux = d.at("ux").get<double>();
        if (d.contains("uy")) bc.uy = d.at("uy").get<double>();
        cfg.dirichlet.push_back(bc);
      }
      for (const auto& t : j.at("bcs").value("tractions", json::array())) {
        TractionBC bc;
        bc.edge_set = t.at("set").get<std::string>();
        bc.traction = to_vec2(t.at("t"), "bcs.tractions.t");
        cfg.tractions.push_back(bc);
      }
    }

    if (j.contains("fracture")) {
      const json& f = j.at("fracture");
      for (const auto& v : f.value("j_radius_factors", json::array()))
        cfg.j_radius_factors.push_back(v.get<double>());
      cfg.sif = f.value("sif", false);
      if (f.contains("tearing")) {
        TearingSpec t;
        const std::string loading = f.at("tearing").value("loading", std::string("uniaxial"));
        if (loading != "uniaxial" && loading != "equibiaxial")
          throw std::runtime_error("fracture.tearing.loading: 'uniaxial' or 'equibiaxial'");
        t.equibiaxial = loading == "equibiaxial";
        t.c = f.at("tearing").at("c").get<double>();
        cfg.tearing = t;
      }
    }

    if (j.contains("output")) {
      cfg.vtk = j.at("output").value("vtk", true);
      cfg.vtk_every = j.at("output").value("vtk_every", 1);
    }
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("config schema: ") + e.what());
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& cfg) {
  json j;
  j["config_version"] = cfg.config_version;
  j["name"] = cfg.name;

  json g;
  g["domain"] = from_polygon(cfg.domain.outer);
  g["holes"] = json::array();
  for (const auto& h : cfg.domain.holes) g["holes"].push_back(from_polygon(h));
  g["crack"] = json::array();
  for (const auto& p : cfg.crack) g["crack"].push_back(from_vec2(p));
  j["geometry"] = g;

  json m;
  m["n_seeds"] = cfg.mesh.n_seeds;
  m["lloyd_iters"] = cfg.mesh.lloyd_iters;
  m["rng_seed"] = cfg.mesh.rng_seed;
  m["grid_cell"] = cfg.mesh.grid_cell;
  if (cfg.mesh.refine) {
    json r;
    r["lo"] = from_vec2(cfg.mesh.refine->lo);
    r["hi"] = from_vec2(cfg.mesh.refine->hi);
    r["cell"] = cfg.mesh.refine->cell_size;
    r["align"] = from_vec2(cfg.mesh.refine->align);
    m["refine"] = r;
  }
  j["mesh"] = m;

  j["material"] = serialize_material(cfg.material);
  j["xfem"] = {{"quad_order_std", cfg.xfem.quad_order_std},
               {"quad_order_enriched", cfg.xfem.quad_order_enriched},
               {"corrected_gradients", cfg.xfem.corrected_gradients},
               {"min_side_ratio", cfg.xfem.min_side_ratio}};
  j["solver"] = {{"n_steps", cfg.solve.n_steps},
                 {"max_iters", cfg.solve.max_iters},
                 {"tol", cfg.solve.tol},
                 {"max_bisect", cfg.solve.max_bisect},
                 {"edge_gauss", cfg.solve.edge_gauss}};

  json sets;
  sets["nodes"] = json::array();
  for (const auto& s : cfg.node_sets)
    sets["nodes"].push_back(
        {{"name", s.name}, {"box", json::array({from_vec2(s.lo), from_vec2(s.hi)})}});
  sets["edges"] = json::array();
  for (const auto& s : cfg.edge_sets)
    sets["edges"].push_back(
        {{"name", s.name}, {"box", json::array({from_vec2(s.lo), from_vec2(s.hi)})}});
  j["sets"] = sets;

  json bcs;
  bcs["dirichlet"] = json::array();
  for (const auto& d : cfg.dirichlet) {
    json b{{"set", d.node_set}};
    if (d.ux) b["ux"] = *d.ux;
    if (d.uy) b["uy"] = *d.uy;
    bcs["dirichlet"].push_back(b);
  }
  bcs["tractions"] = json::array();
  for (const auto& t : cfg.tractions)
    bcs["tractions"].push_back({{"set", t.edge_set}, {"t", from_vec2(t.traction)}});
  j["bcs"] = bcs;

  json f;
  f["j_radius_factors"] = cfg.j_radius_factors;
  f["sif"] = cfg.sif;
  if (cfg.tearing)
    f["tearing"] = {{"loading", cfg.tearing->equibiaxial ? "equibiaxial" : "uniaxial"},
                    {"c", cfg.tearing->c}};
  j["fracture"] = f;

  j["output"] = {{"vtk", cfg.vtk}, {"vtk_every", cfg.vtk_every}};
  return j.dump(2) + "\n";
}

std::vector<std::string> validate_config(const RunConfig& cfg) {
  std::vector<std::string> errs;
  if (cfg.config_version != 1) errs.push_back("config_version: must be 1");
  if (cfg.domain.outer.size() < 3) errs.push_back("geometry.domain: needs at least 3 vertices");
  if (polygon_area(cfg.domain.outer) <= 0)
    errs.push_back("geometry.domain: boundary must be counterclockwise");
  for (const auto& h : cfg.domain.holes)
    if (polygon_area(h) <= 0) errs.push_back("geometry.holes: rings must be counterclockwise");
  if (cfg.crack.size() == 1) errs.push_back("geometry.crack: a polyline needs 2+ points");

  if (cfg.mesh.n_seeds <= 0 && cfg.mesh.grid_cell <= 0)
    errs.push_back("mesh: one of n_seeds or grid_cell must be positive");
  if (cfg.mesh.n_seeds > 0 && cfg.mesh.grid_cell > 0)
    errs.push_back("mesh: n_seeds and grid_cell are mutually exclusive");
  if (cfg.mesh.refine && cfg.mesh.refine->cell_size <= 0)
    errs.push_back("mesh.refine.cell: must be positive");

  // Refining away from the tips defeats the window's purpose; polyline
  // endpoints strictly inside the domain become tips and must lie in it.
  if (!cfg.crack.empty() && cfg.mesh.refine) {
    Vec2 dlo, dhi;
    cfg.domain.bbox(dlo, dhi);
    const Vec2 pad = 1e-9 * (dhi - dlo).norm() * Vec2(1, 1);
    const Vec2 lo = cfg.mesh.refine->lo - pad, hi = cfg.mesh.refine->hi + pad;
    for (const Vec2& p : {cfg.crack.front(), cfg.crack.back()}) {
      if (!cfg.domain.contains(p)) continue;
      if (p.x() < lo.x() || p.y() < lo.y() || p.x() > hi.x() || p.y() > hi.y()) {
        errs.push_back("geometry.crack: tip outside the refinement window");
        break;
      }
    }
  }

  if (cfg.solve.n_steps < 1) errs.push_back("solver.n_steps: must be >= 1");
  if (cfg.solve.tol <= 0) errs.push_back("solver.tol: must be positive");
  if (cfg.vtk_every < 1) errs.push_back("output.vtk_every: must be >= 1");

  for (const auto& d : cfg.dirichlet) {
    bool found = false;
    for (const auto& s : cfg.node_sets) found |= s.name == d.node_set;
    if (!found) errs.push_back("bcs.dirichlet: unknown node set '" + d.node_set + "'");
    if (!d.ux && !d.uy) errs.push_back("bcs.dirichlet: set '" + d.node_set + "' pins nothing");
  }
  for (const auto& t : cfg.tractions) {
    bool found = false;
    for (const auto& s : cfg.edge_sets) found |= s.name == t.edge_set;
    if (!found) errs.push_back("bcs.tractions: unknown edge set '" + t.edge_set + "'");
  }
  if (cfg.dirichlet.empty()) errs.push_back("bcs: at least one dirichlet block is required");

  if (cfg.sif && !cfg.material.is_linear())
    errs.push_back("fracture.sif: mode separation needs the linear_elastic material");
  if ((cfg.sif || !cfg.j_radius_factors.empty() || cfg.tearing) && cfg.crack.empty())
    errs.push_back("fracture: requested without a crack");
  for (double f : cfg.j_radius_factors)
    if (f <= 0) errs.push_back("fracture.j_radius_factors: factors must be positive");
  if (cfg.tearing && cfg.tearing->c <= 0) errs.push_back("fracture.tearing.c: must be positive");
  if (cfg.tearing && cfg.material.is_linear())
    errs.push_back("fracture.tearing: needs a hyperelastic material");
  return errs;
}

}  // namespace polyxfem
