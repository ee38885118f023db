#pragma once

#include <optional>
#include <string>
#include <vector>

#include "harmavg/averaging.hpp"

namespace harmavg {

struct StopRule {
  double tol = 1e-6;
  int max_iter = 10000;
  /// Steps without a new minimum of the successive difference before the
  /// run is declared stalled.
  int stall_window = 50;

  void validate() const;
};

enum class Verdict { converged, max_iter, stalled };

std::string to_string(Verdict v);

/// Optional per-step diagnostics. The barrier margin needs the oracle.
struct Monitors {
  /// Reference solution sampled on the lattice (boundary nodes pinned).
  std::optional<GridField> oracle;
  /// K * h sampled on the lattice; margin = min(K h - |f_n - u|).
  std::optional<GridField> scaled_barrier;
};

struct IterationReport {
  int iterations = 0;
  Verdict verdict = Verdict::max_iter;
  /// Entry k: sup_diff(f_{k+1}, f_k).
  std::vector<double> sup_diff_history;
  /// Entry k: sup_norm(f_k - u); empty without an oracle.
  std::vector<double> oracle_error_history;
  /// Entry k: min over nodes of K h - |f_k - u|; empty without a barrier.
  std::vector<double> barrier_margin_history;
  /// sup_norm(final - u), NaN without an oracle.
  double final_oracle_error = 0.0;
  double wall_time_seconds = 0.0;

  /// Infimum of the recorded oracle errors (NaN when none were recorded).
  double oracle_error_infimum() const;
};

struct IterationResult {
  GridField field;
  IterationReport report;
};

/// Runs f_{n+1} = sigma(f_n) from f0 (whose boundary nodes are overwritten
/// with the pinned values). Stops when sup_diff(f_{n+1}, f_n) <= tol and
/// returns f_n, so a field that is already a fixed point within tol comes
/// back unchanged after one step. Otherwise returns the latest iterate with
/// verdict max_iter or stalled.
IterationResult run(const GridField& f0, const StencilSet& stencils,
                    const BoundaryValues& boundary, const StopRule& stop,
                    const Monitors& monitors = {});

/// sup_diff(sigma(f), f): zero exactly for a discrete median function.
double fixed_point_residual(const GridField& f, const StencilSet& stencils,
                            const BoundaryValues& boundary);

}  // namespace harmavg
