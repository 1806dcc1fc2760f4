#include <cstdlib>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "polyxfem/gates.hpp"
#include "polyxfem/runner.hpp"

namespace {

std::string out_root() {
  const char* env = std::getenv("POLYXFEM_OUT");
  return env && *env ? env : "out";
}

int finish(const polyxfem::RunOutcome& out) {
  for (const auto& e : out.errors) std::cerr << "error: " << e << "\n";
  if (out.exit_code == 0) std::cout << "artifacts: " << out.out_dir << "\n";
  return out.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polygonal XFEM fracture solver"};
  app.require_subcommand(1);

  std::string cfg_path;
  auto* run = app.add_subcommand("run", "Execute a configured analysis");
  run->add_option("config", cfg_path, "JSON run configuration")->required();

  std::string mesh_cfg_path;
  auto* mesh = app.add_subcommand("mesh-only", "Generate and write the mesh, no solve");
  mesh->add_option("config", mesh_cfg_path, "JSON run configuration")->required();

  std::vector<int> sizes{16, 64, 256};
  std::string table_path;
  auto* patch = app.add_subcommand("patch-test", "Linear-field reproduction sweep");
  patch->add_option("--elems", sizes, "Voronoi seed counts")->delimiter(',');
  patch->add_option("--out", table_path, "CSV destination (default stdout)");

  auto* bench = app.add_subcommand("bench", "Run the full verification gate suite");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const polyxfem::RunConfig cfg = polyxfem::load_config(cfg_path);
      return finish(polyxfem::run_config(cfg, out_root() + "/" + cfg.name, &std::cout));
    }
    if (*mesh) {
      const polyxfem::RunConfig cfg = polyxfem::load_config(mesh_cfg_path);
      return finish(polyxfem::mesh_only(cfg, out_root() + "/" + cfg.name));
    }
    if (*patch) {
      if (table_path.empty()) {
        polyxfem::patch_test_table(sizes, std::cout);
      } else {
        std::ofstream os(table_path);
        polyxfem::patch_test_table(sizes, os);
        std::cout << "table: " << table_path << "\n";
      }
      return 0;
    }
    if (*bench) {
      int failed = 0;
      for (const auto& g : polyxfem::run_all_gates(&std::cout)) {
        std::cout << "criterion " << g.id << ": " << (g.pass ? "PASS" : "FAIL") << "  " << g.name
                  << "\n      " << g.detail << "\n";
        failed += !g.pass;
      }
      return failed ? 2 : 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
