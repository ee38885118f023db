#pragma once

#include <memory>
#include <optional>

#include "harmavg/averaging.hpp"
#include "harmavg/config.hpp"
#include "harmavg/oracles.hpp"

namespace harmavg {

Domain make_domain(const RunConfig& cfg);
GridSpec make_grid(const RunConfig& cfg, const Domain& domain);
OracleSolution make_oracle(const RunConfig& cfg, const Domain& domain);
/// boundary.expression if given, otherwise the oracle.
BoundaryData make_boundary_data(const RunConfig& cfg, const Domain& domain);

/// Everything a run needs, built once from a config.
struct Problem {
  RunConfig config;
  std::shared_ptr<const Lattice> lattice;
  std::shared_ptr<const StencilSet> stencils;
  BoundaryValues boundary;
  std::optional<OracleSolution> oracle;
  /// Oracle sampled on the lattice with boundary nodes pinned.
  std::optional<GridField> oracle_field;
  /// Initial field with boundary nodes pinned.
  GridField init;
};

/// Throws ConfigError for parameter problems detected while building.
Problem build_problem(const RunConfig& cfg);

/// u + height (1 - |x - c|^2 / w^2)^3 inside the bump, u elsewhere.
double bump(const RunConfig::InitConfig& init, const Point& x, int dim);

}  // namespace harmavg
