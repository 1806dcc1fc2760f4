#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace polyxfem {

// One acceptance check: an invariant of the method (1-5) or a benchmark
// reproduction (6-10), with the measured numbers in `detail`.
struct GateResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0;
};

// Directory holding the benchmark configurations: POLYXFEM_BENCH_DIR when
// set, else the location baked in at build time.
std::string bench_dir();

// Runs every acceptance check in order; benchmark solves execute in parallel.
// `progress` receives one line per completed solve. Artifacts land under
// POLYXFEM_OUT (default "out") in gates/<run name>.
std::vector<GateResult> run_all_gates(std::ostream* progress = nullptr);

}  // namespace polyxfem
