#include "harmavg/problem.hpp"

#include <cmath>
#include <random>

#include "harmavg/expression.hpp"

namespace harmavg {

Domain make_domain(const RunConfig& cfg) {
  const auto& d = cfg.domain;
  const std::string& k = d.kind;
  if (k == "interval") {
    if (cfg.echo.count("domain.dimension") && d.dimension != 1) {
      throw ConfigError("interval domains are one-dimensional");
    }
    return Domain::interval(d.lo, d.hi);
  }
  if (k == "ball") return Domain::ball(d.dimension, d.center, d.radius);
  if (k == "ellipse") return Domain::ellipse(d.dimension, d.center, d.semi_axes);
  if (k == "superellipse") {
    if (d.dimension != 2) throw ConfigError("superellipse domains are two-dimensional");
    return Domain::superellipse(d.center, d.semi_axes[0], d.semi_axes[1], d.exponent);
  }
  if (k == "box") return Domain::box(d.dimension, d.center, d.half_widths);
  throw ConfigError("unknown domain kind '" + k + "'");
}

GridSpec make_grid(const RunConfig& cfg, const Domain& domain) {
  std::array<int, kMaxDim> nodes{1, 1, 1};
  for (int a = 0; a < domain.dim(); ++a) nodes[a] = cfg.grid.nodes[a];
  if (cfg.grid.min) return GridSpec(domain.dim(), *cfg.grid.min, *cfg.grid.max, nodes);
  return GridSpec::fit(domain, nodes);
}

OracleSolution make_oracle(const RunConfig& cfg, const Domain& domain) {
  const std::string& k = cfg.oracle.kind;
  if (k == "harmonic_poly") {
    if (domain.dim() != 2) throw ConfigError("harmonic_poly oracle is two-dimensional");
    return OracleSolution::harmonic(cfg.oracle.degree, domain.center());
  }
  if (k == "poisson_integral") {
    const Expression g = Expression::parse(cfg.boundary_expression);
    const Point c = domain.center();
    const double R = domain.kind() == DomainKind::ball ? domain.radii()[0] : 1.0;
    return OracleSolution::poisson(domain, [g, c, R](double theta) {
      return g({c[0] + R * std::cos(theta), c[1] + R * std::sin(theta), 0.0});
    });
  }
  if (k == "linear_1d") {
    if (cfg.boundary_expression.empty()) {
      throw ConfigError("linear_1d oracle needs boundary.expression");
    }
    const Expression g = Expression::parse(cfg.boundary_expression);
    const double a = g(domain.bounding_min());
    const double b = g(domain.bounding_max());
    return OracleSolution::linear_1d(domain, a, b);
  }
  if (k == "fundamental_shifted") {
    return OracleSolution::fundamental_shifted(domain, cfg.oracle.pole);
  }
  throw ConfigError("no oracle configured");
}

BoundaryData make_boundary_data(const RunConfig& cfg, const Domain& domain) {
  if (!cfg.boundary_expression.empty()) {
    Expression g = Expression::parse(cfg.boundary_expression);
    return [g](const Point& p) { return g(p); };
  }
  OracleSolution u = make_oracle(cfg, domain);
  return [u](const Point& p) { return u(p); };
}

double bump(const RunConfig::InitConfig& init, const Point& x, int dim) {
  const double r = distance(x, init.bump_center, dim);
  const double w = init.bump_width;
  if (r >= w) return 0.0;
  const double s = 1.0 - (r * r) / (w * w);
  return init.bump_height * s * s * s;
}

Problem build_problem(const RunConfig& cfg) {
  validate(cfg);
  try {
    Domain domain = make_domain(cfg);
    GridSpec grid = make_grid(cfg, domain);
    auto lattice = Lattice::make(domain, grid);
    auto stencils = std::make_shared<const StencilSet>(lattice, cfg.radius, cfg.quadrature);
    BoundaryValues boundary(*lattice, make_boundary_data(cfg, domain));

    std::optional<OracleSolution> oracle;
    std::optional<GridField> oracle_field;
    if (cfg.oracle.kind != "none") {
      oracle = make_oracle(cfg, domain);
      oracle_field = oracle->sample(lattice);
      boundary.apply(*oracle_field);
    }

    const int n = domain.dim();
    GridField init(lattice);
    const std::string& k = cfg.init.kind;
    if (k == "oracle") {
      init = *oracle_field;
    } else if (k == "oracle_plus_bump") {
      init = *oracle_field;
      const NodeMask& mask = lattice->mask();
      for (std::size_t idx : mask.interior()) {
        init[idx] += bump(cfg.init, mask.position(idx), n);
      }
    } else if (k == "expression") {
      const Expression e = Expression::parse(cfg.init.expression);
      init = GridField::sample(lattice, [&e](const Point& p) { return e(p); });
    } else if (k == "random") {
      std::mt19937_64 rng(cfg.init.seed);
      std::uniform_real_distribution<double> u(-1.0, 1.0);
      for (std::size_t idx : lattice->mask().interior()) init[idx] = u(rng);
    }
    boundary.apply(init);

    return Problem{cfg, lattice, stencils, std::move(boundary), std::move(oracle),
                   std::move(oracle_field), std::move(init)};
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  } catch (const std::runtime_error& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace harmavg
