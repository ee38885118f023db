#include "harmavg/iteration.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace harmavg {

void StopRule::validate() const {
  if (!(tol > 0.0)) throw std::invalid_argument("stop tol must be > 0");
  if (max_iter < 1) throw std::invalid_argument("stop max_iter must be >= 1");
  if (stall_window < 1) {
    throw std::invalid_argument("stop stall_window must be >= 1");
  }
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::converged: return "converged";
    case Verdict::max_iter: return "max_iter";
    case Verdict::stalled: return "stalled";
  }
  return "unknown";
}

double IterationReport::oracle_error_infimum() const {
  if (oracle_error_history.empty()) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return *std::min_element(oracle_error_history.begin(),
                           oracle_error_history.end());
}

namespace {

double barrier_margin(const GridField& f, const GridField& u,
                      const GridField& kh) {
  const NodeMask& mask = f.lattice().mask();
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t idx : mask.interior()) {
    m = std::min(m, kh[idx] - std::abs(f[idx] - u[idx]));
  }
  for (std::size_t idx : mask.boundary()) {
    m = std::min(m, kh[idx] - std::abs(f[idx] - u[idx]));
  }
  return m;
}

}  // namespace

IterationResult run(const GridField& f0, const StencilSet& stencils,
                    const BoundaryValues& boundary, const StopRule& stop,
                    const Monitors& monitors) {
  stop.validate();
  if (monitors.scaled_barrier && !monitors.oracle) {
    throw std::invalid_argument("barrier monitor requires an oracle");
  }
  const auto start = std::chrono::steady_clock::now();

  GridField current = f0;
  boundary.apply(current);
  IterationReport report;
  double best_diff = std::numeric_limits<double>::infinity();
  int best_step = 0;

  for (int step = 0; step < stop.max_iter; ++step) {
    if (monitors.oracle) {
      report.oracle_error_history.push_back(sup_diff(current, *monitors.oracle));
      if (monitors.scaled_barrier) {
        report.barrier_margin_history.push_back(
            barrier_margin(current, *monitors.oracle, *monitors.scaled_barrier));
      }
    }
    GridField next = apply_sigma(current, stencils, boundary);
    const double diff = sup_diff(next, current);
    report.sup_diff_history.push_back(diff);
    report.iterations = step + 1;

    if (diff <= stop.tol) {
      report.verdict = Verdict::converged;
      break;
    }
    current = std::move(next);
    if (diff < best_diff) {
      best_diff = diff;
      best_step = step;
    } else if (step - best_step >= stop.stall_window) {
      report.verdict = Verdict::stalled;
      break;
    }
    report.verdict = Verdict::max_iter;
  }

  report.final_oracle_error = monitors.oracle
                                  ? sup_diff(current, *monitors.oracle)
                                  : std::numeric_limits<double>::quiet_NaN();
  report.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return {std::move(current), std::move(report)};
}

double fixed_point_residual(const GridField& f, const StencilSet& stencils,
                            const BoundaryValues& boundary) {
  return sup_diff(apply_sigma(f, stencils, boundary), f);
}

}  // namespace harmavg
