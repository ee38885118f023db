#include "harmavg/averaging.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <set>
#include <stdexcept>

#include "cell_locate.hpp"

namespace harmavg {

void RadiusSpec::validate() const {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw std::invalid_argument("radius fraction must lie in (0, 1]");
  }
  if (kind == Kind::capped_fraction && !(cap > 0.0 && std::isfinite(cap))) {
    throw std::invalid_argument("radius cap must be positive");
  }
}

double RadiusSpec::radius(double rho) const {
  const double r = fraction * std::max(rho, 0.0);
  return kind == Kind::capped_fraction ? std::min(r, cap) : r;
}

void QuadratureSpec::validate() const {
  if (kind == Kind::product_midpoint && samples_per_axis < 2) {
    throw std::invalid_argument("product quadrature needs >= 2 samples per axis");
  }
  if (kind == Kind::monte_carlo && samples < 100) {
    throw std::invalid_argument("Monte Carlo quadrature needs >= 100 samples");
  }
}

double ball_volume(int n, double r) {
  if (r < 0.0) throw std::invalid_argument("ball radius must be >= 0");
  switch (n) {
    case 1: return 2.0 * r;
    case 2: return std::numbers::pi * r * r;
    case 3: return 4.0 * std::numbers::pi / 3.0 * r * r * r;
    default: throw std::invalid_argument("ball dimension must be 1, 2 or 3");
  }
}

QuadratureTemplate::QuadratureTemplate(int dim, const QuadratureSpec& spec)
    : dim_(dim), weight_(0.0) {
  spec.validate();
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("bad dimension");
  if (spec.kind == QuadratureSpec::Kind::product_midpoint) {
    const int m = spec.samples_per_axis;
    const double step = 2.0 / m;
    std::array<int, kMaxDim> ijk{0, 0, 0};
    std::size_t total = 1;
    for (int a = 0; a < dim; ++a) total *= static_cast<std::size_t>(m);
    for (std::size_t k = 0; k < total; ++k) {
      std::size_t rem = k;
      Point p{};
      double r2 = 0.0;
      for (int a = 0; a < dim; ++a) {
        ijk[a] = static_cast<int>(rem % m);
        rem /= m;
        p[a] = -1.0 + (ijk[a] + 0.5) * step;
        r2 += p[a] * p[a];
      }
      if (r2 < 1.0) offsets_.push_back(p);
    }
    const double cell = std::pow(step, dim);
    const double unit = ball_volume(dim, 1.0);
    volume_defect_ = std::abs(offsets_.size() * cell - unit) / unit;
  } else {
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    while (offsets_.size() < static_cast<std::size_t>(spec.samples)) {
      Point p{};
      double r2 = 0.0;
      for (int a = 0; a < dim; ++a) {
        p[a] = u(rng);
        r2 += p[a] * p[a];
      }
      if (r2 < 1.0) offsets_.push_back(p);
    }
  }
  if (offsets_.size() < (std::size_t{1} << dim)) {
    throw std::invalid_argument("quadrature keeps fewer than 2^n points in the ball");
  }
  weight_ = 1.0 / static_cast<double>(offsets_.size());
  double moment = 0.0;
  for (const Point& p : offsets_) {
    for (int a = 0; a < dim; ++a) moment += weight_ * p[a] * p[a];
  }
  moment_defect_ = std::abs(moment - static_cast<double>(dim) / (dim + 2));
}

BallStencil build_stencil(const Lattice& lattice, const RadiusSpec& radius,
                          const QuadratureTemplate& quad, std::size_t node) {
  const NodeMask& mask = lattice.mask();
  if (node >= mask.size() || !mask.is_interior(node)) {
    throw std::invalid_argument("stencil node must be interior");
  }
  BallStencil st;
  st.node = node;
  st.center = mask.position(node);
  st.radius = radius.radius(mask.distance(node)) * kRadiusShrink;
  const int dim = lattice.dim();
  st.points.reserve(quad.size());
  for (const Point& off : quad.offsets()) {
    Point p{};
    for (int a = 0; a < dim; ++a) p[a] = st.center[a] + st.radius * off[a];
    st.points.push_back(p);
  }
  st.weights.assign(quad.size(), quad.weight());
  return st;
}

StencilSet::StencilSet(std::shared_ptr<const Lattice> lattice,
                       RadiusSpec radius, QuadratureSpec quad)
    : lattice_(std::move(lattice)), radius_(radius), quad_spec_(quad),
      quad_(lattice_->dim(), quad) {
  radius_.validate();
  const NodeMask& mask = lattice_->mask();
  const GridSpec& grid = lattice_->grid();
  const int dim = grid.dim();
  nodes_ = mask.interior();
  const std::size_t n = nodes_.size();
  radii_.resize(n);
  slot_.assign(mask.size(), NodeMask::npos);
  for (std::size_t s = 0; s < n; ++s) {
    slot_[nodes_[s]] = s;
    radii_[s] = radius_.radius(mask.distance(nodes_[s])) * kRadiusShrink;
  }

  struct LocalCut {
    std::uint32_t quad_index;
    InterpWeights w;
  };
  std::vector<std::vector<LocalCut>> cuts(n);
  const auto offsets = quad_.offsets();

#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(n); ++k) {
    const auto s = static_cast<std::size_t>(k);
    const Point& c = mask.position(nodes_[s]);
    const double r = radii_[s];
    for (std::size_t q = 0; q < offsets.size(); ++q) {
      Point p{};
      for (int a = 0; a < dim; ++a) p[a] = c[a] + r * offsets[q][a];
      const auto loc = detail::locate(grid, p);
      if (lattice_->cell_full(loc.origin)) continue;
      cuts[s].push_back({static_cast<std::uint32_t>(q),
                         interpolation_weights(*lattice_, p)});
    }
  }

  cut_begin_.resize(n + 1);
  for (std::size_t s = 0; s < n; ++s) {
    cut_begin_[s] = cut_points_.size();
    for (const LocalCut& lc : cuts[s]) {
      cut_points_.push_back({lc.quad_index,
                             static_cast<std::uint32_t>(cut_nodes_.size()),
                             static_cast<std::uint32_t>(lc.w.count)});
      for (int i = 0; i < lc.w.count; ++i) {
        cut_nodes_.push_back(lc.w.node[i]);
        cut_weights_.push_back(lc.w.weight[i]);
      }
    }
  }
  cut_begin_[n] = cut_points_.size();
}

BallStencil StencilSet::stencil(std::size_t s) const {
  return build_stencil(*lattice_, radius_, quad_, nodes_[s]);
}

BoundaryValues::BoundaryValues(const Lattice& lattice, const BoundaryData& data) {
  const NodeMask& mask = lattice.mask();
  values_.reserve(mask.boundary().size());
  for (std::size_t idx : mask.boundary()) {
    const double v = data(mask.position(idx));
    if (!std::isfinite(v)) {
      throw std::invalid_argument("boundary data must be finite");
    }
    values_.push_back(v);
  }
}

BoundaryValues BoundaryValues::from_field(const GridField& field) {
  BoundaryValues b;
  const NodeMask& mask = field.lattice().mask();
  b.values_.reserve(mask.boundary().size());
  for (std::size_t idx : mask.boundary()) b.values_.push_back(field[idx]);
  return b;
}

void BoundaryValues::apply(GridField& field) const {
  const auto& nodes = field.lattice().mask().boundary();
  if (nodes.size() != values_.size()) {
    throw std::invalid_argument("boundary values do not match the lattice");
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) field[nodes[i]] = values_[i];
}

namespace {

void check_inputs(const GridField& f, const StencilSet& stencils) {
  const Lattice& a = f.lattice();
  const Lattice& b = stencils.lattice();
  if (&a != &b && !(a.grid() == b.grid() &&
                    a.mask().interior() == b.mask().interior())) {
    throw std::invalid_argument("field and stencils use different lattices");
  }
}

// Mirrors detail::locate / corner_weight operation for operation so that the
// kernel and apply_sigma_reference produce identical values.
template <int Dim>
double kernel_average(const double* v, const StencilSet& st, std::size_t s,
                      std::span<const Point> offsets, double weight) {
  const Lattice& lattice = st.lattice();
  const GridSpec& grid = lattice.grid();
  double lo[Dim], inv[Dim];
  int last[Dim];
  std::size_t stride[Dim];
  for (int a = 0; a < Dim; ++a) {
    lo[a] = grid.lo()[a];
    inv[a] = grid.inv_spacing(a);
    last[a] = grid.nodes(a) - 2;
    stride[a] = grid.stride(a);
  }
  const Point& c = st.center(s);
  const double r = st.radius(s);
  const auto cuts = st.cut_points(s);
  std::size_t next_cut = 0;
  double acc = 0.0;
  for (std::size_t q = 0; q < offsets.size(); ++q) {
    double frac[Dim];
    std::size_t origin = 0;
    for (int a = 0; a < Dim; ++a) {
      const double f = (c[a] + r * offsets[q][a] - lo[a]) * inv[a];
      const int i = std::clamp(static_cast<int>(f), 0, last[a]);
      frac[a] = std::clamp(f - i, 0.0, 1.0);
      origin += stride[a] * static_cast<std::size_t>(i);
    }
    double val = 0.0;
    if (lattice.cell_full(origin)) {
      if constexpr (Dim == 1) {
        val += (1.0 - frac[0]) * v[origin];
        val += frac[0] * v[origin + 1];
      } else if constexpr (Dim == 2) {
        const double u0 = 1.0 - frac[0], u1 = 1.0 - frac[1];
        const std::size_t up = origin + stride[1];
        val += u0 * u1 * v[origin];
        val += frac[0] * u1 * v[origin + 1];
        val += u0 * frac[1] * v[up];
        val += frac[0] * frac[1] * v[up + 1];
      } else {
        for (int corner = 0; corner < (1 << Dim); ++corner) {
          double w = 1.0;
          std::size_t idx = origin;
          for (int a = 0; a < Dim; ++a) {
            if (corner & (1 << a)) {
              w *= frac[a];
              idx += stride[a];
            } else {
              w *= 1.0 - frac[a];
            }
          }
          val += w * v[idx];
        }
      }
    } else {
      const auto& cut = cuts[next_cut++];
      for (std::uint32_t i = 0; i < cut.count; ++i) {
        val += st.cut_weight(cut.begin + i) * v[st.cut_node(cut.begin + i)];
      }
    }
    acc += weight * val;
  }
  return acc;
}

}  // namespace

GridField apply_sigma(const GridField& f, const StencilSet& stencils,
                      const BoundaryValues& boundary) {
  check_inputs(f, stencils);
  GridField out(f.lattice_ptr());
  boundary.apply(out);
  const auto offsets = stencils.quadrature().offsets();
  const double weight = stencils.quadrature().weight();
  const int dim = stencils.lattice().dim();
  const auto n = static_cast<std::ptrdiff_t>(stencils.size());
  const double* v = f.values().data();

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    const auto s = static_cast<std::size_t>(k);
    double value = 0.0;
    switch (dim) {
      case 1: value = kernel_average<1>(v, stencils, s, offsets, weight); break;
      case 2: value = kernel_average<2>(v, stencils, s, offsets, weight); break;
      default: value = kernel_average<3>(v, stencils, s, offsets, weight); break;
    }
    out[stencils.node(s)] = value;
  }
  return out;
}

GridField apply_sigma_reference(const GridField& f, const StencilSet& stencils,
                                const BoundaryValues& boundary) {
  check_inputs(f, stencils);
  GridField out(f.lattice_ptr());
  boundary.apply(out);
  for (std::size_t s = 0; s < stencils.size(); ++s) {
    const BallStencil st = stencils.stencil(s);
    double acc = 0.0;
    for (std::size_t q = 0; q < st.points.size(); ++q) {
      acc += st.weights[q] * eval(f, st.points[q]);
    }
    out[st.node] = acc;
  }
  return out;
}

std::vector<double> sigma_lipschitz_probe(const GridField& f,
                                          const StencilSet& stencils,
                                          const BoundaryValues& boundary,
                                          std::span<const NodePair> pairs) {
  const Lattice& lattice = stencils.lattice();
  const int dim = lattice.dim();
  for (const NodePair& pr : pairs) {
    const std::size_t sx = stencils.slot(pr.x);
    const std::size_t sy = stencils.slot(pr.y);
    if (sx == NodeMask::npos || sy == NodeMask::npos) {
      throw std::invalid_argument("probe pairs must join interior nodes");
    }
    const double d = distance(stencils.center(sx), stencils.center(sy), dim);
    if (!(d > 0.0) || !(d < 0.5 * stencils.radius(sx))) {
      throw std::invalid_argument("probe pair violates 0 < d(x,y) < delta_x / 2");
    }
  }
  std::vector<double> ratios(pairs.size(), 0.0);
  const double norm = sup_norm(f);
  if (norm == 0.0) return ratios;
  const GridField g = apply_sigma(f, stencils, boundary);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const std::size_t sx = stencils.slot(pairs[i].x);
    const std::size_t sy = stencils.slot(pairs[i].y);
    const double dx = stencils.radius(sx);
    const double dy = stencils.radius(sy);
    const double d = distance(stencils.center(sx), stencils.center(sy), dim);
    ratios[i] = std::abs(g[pairs[i].x] - g[pairs[i].y]) * dx /
                (norm * (std::abs(dx - dy) + d));
  }
  return ratios;
}

std::vector<NodePair> sample_adjacent_pairs(const StencilSet& stencils,
                                            std::size_t count,
                                            std::uint64_t seed) {
  const Lattice& lattice = stencils.lattice();
  const GridSpec& grid = lattice.grid();
  const int dim = grid.dim();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, stencils.size() - 1);
  std::uniform_int_distribution<int> axis_pick(0, 2 * dim - 1);
  std::set<std::pair<std::size_t, std::size_t>> seen;
  std::vector<NodePair> pairs;
  const std::size_t max_attempts = 1000 * count + 1000;
  for (std::size_t attempt = 0; attempt < max_attempts && pairs.size() < count;
       ++attempt) {
    const std::size_t s = pick(rng);
    const int dir = axis_pick(rng);
    const int axis = dir / 2;
    const int step = dir % 2 == 0 ? -1 : 1;
    auto ijk = grid.multi_index(stencils.node(s));
    ijk[axis] += step;
    if (ijk[axis] < 0 || ijk[axis] >= grid.nodes(axis)) continue;
    const std::size_t y = grid.index(ijk);
    if (!lattice.mask().is_interior(y)) continue;
    if (!(grid.spacing(axis) < 0.5 * stencils.radius(s))) continue;
    if (!seen.insert({stencils.node(s), y}).second) continue;
    pairs.push_back({stencils.node(s), y});
  }
  if (pairs.size() < count) {
    throw std::runtime_error("not enough adjacent pairs satisfy d < delta_x / 2");
  }
  return pairs;
}

}  // namespace harmavg
