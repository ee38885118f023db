#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace harmavg {

inline constexpr int kMaxDim = 3;

// Coordinates beyond the domain dimension are kept at zero.
using Point = std::array<double, kMaxDim>;

double distance(const Point& a, const Point& b, int dim);

enum class DomainKind { interval, ball, ellipse, superellipse, box };
enum class Convexity { strongly_convex, convex_only, nonconvex };

std::string to_string(DomainKind kind);
std::string to_string(Convexity c);

/// Closed-form bounded open domain in R^n, n in {1, 2, 3}.
///
/// `radii` holds the radius (ball), semi-axes (ellipse, superellipse) or
/// half-widths (box, interval). Superellipses are planar:
/// |x/a|^p + |y/b|^p < 1 with p > 2; p == 2 is built as an ellipse.
class Domain {
 public:
  static Domain interval(double lo, double hi);
  static Domain ball(int dim, const Point& center, double radius);
  static Domain ellipse(int dim, const Point& center, const Point& semi_axes);
  static Domain superellipse(const Point& center, double a, double b,
                             double exponent);
  static Domain box(int dim, const Point& center, const Point& half_widths);

  DomainKind kind() const { return kind_; }
  int dim() const { return dim_; }
  const Point& center() const { return center_; }
  const Point& radii() const { return radii_; }
  double exponent() const { return exponent_; }

  /// Positive inside, negative outside, zero on the boundary. Exact for
  /// interval, ball and box; ellipse and superellipse use a bracketed
  /// one-dimensional solve whose sign is taken from the implicit equation.
  double signed_distance(const Point& x) const;

  /// Open-ball containment: radius must stay below the distance to the
  /// boundary by a relative margin of 1e-12, so a ball touching the
  /// boundary is rejected.
  bool contains_ball(const Point& center, double radius) const;

  Convexity classify() const;

  /// Boundary point used to pin data at a node outside or on the domain:
  /// along the ray from the center for ball/ellipse/superellipse, nearest
  /// face point for box/interval.
  Point project_to_boundary(const Point& x) const;

  /// Tight axis-aligned bounding box of the closure.
  Point bounding_min() const;
  Point bounding_max() const;

  /// Value of the implicit defining function; negative inside.
  double implicit(const Point& x) const;

 private:
  Domain(DomainKind kind, int dim, const Point& center, const Point& radii,
         double exponent);

  double ellipse_distance(const Point& x) const;
  double superellipse_distance(const Point& x) const;

  DomainKind kind_;
  int dim_;
  Point center_;
  Point radii_;
  double exponent_;
};

/// Regular lattice over an axis-aligned box. Axis 0 varies fastest in the
/// flat node index.
class GridSpec {
 public:
  GridSpec(int dim, const Point& lo, const Point& hi,
           const std::array<int, kMaxDim>& nodes);

  /// Lattice over the tight bounding box of `domain`.
  static GridSpec fit(const Domain& domain,
                      const std::array<int, kMaxDim>& nodes);

  int dim() const { return dim_; }
  const Point& lo() const { return lo_; }
  const Point& hi() const { return hi_; }
  int nodes(int axis) const { return nodes_[axis]; }
  const std::array<int, kMaxDim>& nodes() const { return nodes_; }
  double spacing(int axis) const { return spacing_[axis]; }
  double inv_spacing(int axis) const { return inv_spacing_[axis]; }
  double min_spacing() const;
  std::size_t size() const { return size_; }
  std::size_t stride(int axis) const { return stride_[axis]; }

  std::size_t index(const std::array<int, kMaxDim>& ijk) const;
  std::array<int, kMaxDim> multi_index(std::size_t idx) const;
  Point coords(std::size_t idx) const;

  bool operator==(const GridSpec& other) const;

 private:
  int dim_;
  Point lo_;
  Point hi_;
  std::array<int, kMaxDim> nodes_;
  Point spacing_;
  Point inv_spacing_;
  std::array<std::size_t, kMaxDim> stride_;
  std::size_t size_;
};

enum class NodeLabel : std::uint8_t { exterior = 0, boundary = 1, interior = 2 };

/// Per-node discretization of the domain.
///
/// Interior nodes have signed distance > 0. Boundary nodes are the
/// non-interior nodes that touch an interior node within the 3^n lattice
/// neighbourhood; each one carries its projection onto the boundary, which
/// is where its pinned value lives and where interpolation places it.
class NodeMask {
 public:
  NodeLabel label(std::size_t idx) const { return labels_[idx]; }
  bool is_interior(std::size_t idx) const {
    return labels_[idx] == NodeLabel::interior;
  }
  bool is_exterior(std::size_t idx) const {
    return labels_[idx] == NodeLabel::exterior;
  }
  const std::vector<std::size_t>& interior() const { return interior_; }
  const std::vector<std::size_t>& boundary() const { return boundary_; }
  std::size_t size() const { return labels_.size(); }

  /// Signed distance at every node.
  double distance(std::size_t idx) const { return distance_[idx]; }

  /// Position used for interpolation: the lattice point for interior nodes,
  /// the projected boundary point for boundary nodes.
  const Point& position(std::size_t idx) const { return position_[idx]; }

  /// Position in `boundary()` of a boundary node, or npos.
  std::size_t boundary_slot(std::size_t idx) const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  friend NodeMask build_mask(const Domain& domain, const GridSpec& grid);

  std::vector<NodeLabel> labels_;
  std::vector<double> distance_;
  std::vector<Point> position_;
  std::vector<std::size_t> interior_;
  std::vector<std::size_t> boundary_;
  std::vector<std::size_t> boundary_slot_;
};

/// Throws std::runtime_error when no node is interior (grid too coarse) and
/// std::invalid_argument when the grid does not cover the domain closure.
NodeMask build_mask(const Domain& domain, const GridSpec& grid);

}  // namespace harmavg
