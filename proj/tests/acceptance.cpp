// Runs every acceptance gate and prints one verdict line per criterion.
// Benchmark artifacts land under POLYXFEM_OUT (default "out")/gates.
#include <cstdio>

#include "polyxfem/gates.hpp"

int main() {
  const auto results = polyxfem::run_all_gates(nullptr);
  int failed = 0;
  for (const auto& g : results) {
    std::printf("criterion %2d: %s  %s [%.1fs]\n      %s\n", g.id, g.pass ? "PASS" : "FAIL",
                g.name.c_str(), g.seconds, g.detail.c_str());
    failed += !g.pass;
  }
  if (failed) std::printf("%d of %zu criteria failed\n", failed, results.size());
  return failed ? 1 : 0;
}
