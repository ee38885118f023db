#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "harmavg/field.hpp"

namespace harmavg {

/// Admissible radius function built from the distance to the boundary:
/// delta(x) = c * rho(x), optionally capped.
struct RadiusSpec {
  enum class Kind { distance_fraction, capped_fraction };
  Kind kind = Kind::distance_fraction;
  double fraction = 0.5;
  double cap = 0.0;

  void validate() const;
  double radius(double rho) const;
};

struct QuadratureSpec {
  enum class Kind { product_midpoint, monte_carlo };
  Kind kind = Kind::product_midpoint;
  int samples_per_axis = 16;
  int samples = 1000;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Volume of the n-ball of radius r.
double ball_volume(int n, double r);

/// Equal-weight quadrature points in the open unit ball, shared by every
/// stencil and scaled per node.
class QuadratureTemplate {
 public:
  QuadratureTemplate(int dim, const QuadratureSpec& spec);

  int dim() const { return dim_; }
  std::span<const Point> offsets() const { return offsets_; }
  std::size_t size() const { return offsets_.size(); }
  double weight() const { return weight_; }
  /// |kept volume - w_n| / w_n for the product rule; 0 for Monte Carlo.
  double volume_defect() const { return volume_defect_; }
  /// |sum w |o|^2 - n/(n+2)|: error of the rule on |z|^2 over the unit ball.
  double second_moment_defect() const { return moment_defect_; }

 private:
  int dim_;
  std::vector<Point> offsets_;
  double weight_;
  double volume_defect_ = 0.0;
  double moment_defect_ = 0.0;
};

/// Radius shrink applied to delta(x) so every point is strictly inside.
inline constexpr double kRadiusShrink = 1.0 - 1e-9;

/// Ball average at one interior node.
struct BallStencil {
  std::size_t node = 0;
  Point center{};
  double radius = 0.0;

  /// Materialized quadrature points and their (equal) weights.
  std::vector<Point> points;
  std::vector<double> weights;
};

BallStencil build_stencil(const Lattice& lattice, const RadiusSpec& radius,
                          const QuadratureTemplate& quad, std::size_t node);

/// Precomputed ball averages for every interior node.
///
/// Points landing in cells with all corners interior are interpolated on the
/// fly; the weights of points in boundary cells are stored here once.
class StencilSet {
 public:
  StencilSet(std::shared_ptr<const Lattice> lattice, RadiusSpec radius,
             QuadratureSpec quad);

  const Lattice& lattice() const { return *lattice_; }
  const std::shared_ptr<const Lattice>& lattice_ptr() const { return lattice_; }
  const RadiusSpec& radius_spec() const { return radius_; }
  const QuadratureSpec& quadrature_spec() const { return quad_spec_; }
  const QuadratureTemplate& quadrature() const { return quad_; }

  /// One entry per interior node, in mask order.
  std::size_t size() const { return nodes_.size(); }
  std::size_t node(std::size_t s) const { return nodes_[s]; }
  double radius(std::size_t s) const { return radii_[s]; }
  const Point& center(std::size_t s) const {
    return lattice_->mask().position(nodes_[s]);
  }
  /// Stencil index of a node, or NodeMask::npos.
  std::size_t slot(std::size_t node) const { return slot_[node]; }

  BallStencil stencil(std::size_t s) const;

  struct CutPoint {
    std::uint32_t quad_index;
    std::uint32_t begin;  // into cut_nodes / cut_weights
    std::uint32_t count;
  };
  std::span<const CutPoint> cut_points(std::size_t s) const {
    return {cut_points_.data() + cut_begin_[s],
            cut_points_.data() + cut_begin_[s + 1]};
  }
  std::size_t cut_node(std::size_t i) const { return cut_nodes_[i]; }
  double cut_weight(std::size_t i) const { return cut_weights_[i]; }
  std::size_t total_cut_points() const { return cut_points_.size(); }

 private:
  std::shared_ptr<const Lattice> lattice_;
  RadiusSpec radius_;
  QuadratureSpec quad_spec_;
  QuadratureTemplate quad_;
  std::vector<std::size_t> nodes_;
  std::vector<double> radii_;
  std::vector<std::size_t> slot_;
  std::vector<std::size_t> cut_begin_;
  std::vector<CutPoint> cut_points_;
  std::vector<std::size_t> cut_nodes_;
  std::vector<double> cut_weights_;
};

/// Values pinned at the boundary nodes, in mask().boundary() order.
class BoundaryValues {
 public:
  /// Evaluates the data at each boundary node's projected point.
  BoundaryValues(const Lattice& lattice, const BoundaryData& data);
  /// Takes whatever the field currently holds at its boundary nodes.
  static BoundaryValues from_field(const GridField& field);

  std::span<const double> values() const { return values_; }
  void apply(GridField& field) const;

 private:
  BoundaryValues() = default;
  std::vector<double> values_;
};

/// One application of the averaging operator: ball average at interior
/// nodes, pinned value at boundary nodes. Parallel over nodes.
GridField apply_sigma(const GridField& f, const StencilSet& stencils,
                      const BoundaryValues& boundary);

/// Serial reference: evaluates every materialized quadrature point through
/// eval(). Kept for cross-checking the kernel.
GridField apply_sigma_reference(const GridField& f, const StencilSet& stencils,
                                const BoundaryValues& boundary);

/// Pair of interior nodes with distance below half the first node's radius.
struct NodePair {
  std::size_t x;
  std::size_t y;
};

/// Ratio |s(f)(x) - s(f)(y)| delta_x / (|f|_inf (|delta_x - delta_y| + d)) for
/// each pair, s = one averaging step. Pairs violating d < delta_x / 2 or
/// with d == 0 throw std::invalid_argument; a zero field gives ratios 0.
std::vector<double> sigma_lipschitz_probe(const GridField& f,
                                          const StencilSet& stencils,
                                          const BoundaryValues& boundary,
                                          std::span<const NodePair> pairs);

/// Lattice-adjacent interior pairs satisfying the probe precondition, drawn
/// deterministically from `seed`.
std::vector<NodePair> sample_adjacent_pairs(const StencilSet& stencils,
                                            std::size_t count,
                                            std::uint64_t seed);

}  // namespace harmavg
