#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "harmavg/config.hpp"
#include "harmavg/iteration.hpp"
#include "harmavg/problem.hpp"

namespace harmavg {

enum ExitCode : int {
  kExitOk = 0,
  kExitError = 1,
  kExitMaxIter = 2,
  kExitStalled = 3,
  kExitAssertion = 4,
};

struct CommandOptions {
  bool quiet = false;
  std::ostream* out = nullptr;  // summaries; defaults to std::cout
  std::ostream* err = nullptr;  // errors; defaults to std::cerr
};

/// Iterates the configured problem and writes the field CSV, report JSON
/// and optional PGM image. 0 converged, 2 max_iter, 3 stalled, 1 on
/// config or IO errors.
int cmd_solve(const RunConfig& cfg, const CommandOptions& opts = {});

/// Suites: lemma1, eq8, barrier, hull, fixedpoint. 0 pass, 4 assertion
/// failure, 1 config error. The hull suite on a domain that is not
/// strongly convex is informational and never fails.
int cmd_verify(const RunConfig& cfg, const std::string& suite,
               const CommandOptions& opts = {});

/// Sweep spec `key=v1,v2,...` with key one of grid.nodes, radius.c,
/// quadrature.samples_per_axis, quadrature.samples. Writes a CSV table to
/// output.study (standard output when unset). 1 on empty or bad sweeps.
int cmd_study(const RunConfig& cfg, const std::string& sweep,
              const CommandOptions& opts = {});

struct Sweep {
  std::string key;
  std::vector<std::string> values;
};

/// Throws ConfigError on malformed or empty sweeps.
Sweep parse_sweep(const std::string& spec);

/// Report document with keys iterations, verdict, sup_diff_history,
/// oracle_error_history, barrier_margin_history, wall_time_seconds,
/// config and a few derived entries, serialized with two-space indent.
std::string report_json(const IterationReport& report, const RunConfig& cfg,
                        Convexity convexity);

/// P2 image, 255 levels, min-max normalized over non-exterior nodes,
/// exterior 0. 2D fields map axis 1 to rows (top row = largest y); 1D
/// fields give one row; 3D fields write the middle axis-2 slice.
void write_pgm(const GridField& field, std::ostream& out);

struct SuiteCheck {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  bool pass = false;
};

struct SuiteResult {
  std::string suite;
  bool pass = false;
  bool informational = false;
  std::vector<SuiteCheck> checks;
  std::string note;
};

/// Runs one invariant suite on a built problem. Throws ConfigError for
/// unknown suites or suites that do not apply to the configuration.
SuiteResult run_suite(const Problem& problem, const std::string& suite);

std::string suite_json(const SuiteResult& result, const RunConfig& cfg);

}  // namespace harmavg
