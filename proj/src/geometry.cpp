#include "harmavg/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace harmavg {

namespace {

constexpr int kMaxBisect = 100;

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

// Root of sum_i (n_i / (s + r_i))^2 - 1 by bisection; r.back() == 1.
// Bracket follows Eberly's distance-to-ellipsoid construction.
template <int N>
double ellipse_root(const std::array<double, N>& r,
                    const std::array<double, N>& z, double g) {
  std::array<double, N> n{};
  double len2 = 0.0;
  for (int i = 0; i < N; ++i) {
    n[i] = r[i] * z[i];
    len2 += n[i] * n[i];
  }
  double s0 = z[N - 1] - 1.0;
  double s1 = g < 0.0 ? 0.0 : std::sqrt(len2) - 1.0;
  double s = 0.0;
  for (int it = 0; it < kMaxBisect; ++it) {
    s = 0.5 * (s0 + s1);
    if (s == s0 || s == s1) break;
    double val = -1.0;
    for (int i = 0; i < N; ++i) {
      const double ratio = n[i] / (s + r[i]);
      val += ratio * ratio;
    }
    if (val > 0.0) {
      s0 = s;
    } else if (val < 0.0) {
      s1 = s;
    } else {
      break;
    }
  }
  return s;
}

// Unsigned distance from y (first quadrant) to the ellipse with e0 >= e1.
double ellipse_distance_2(double e0, double e1, double y0, double y1) {
  if (y1 > 0.0) {
    if (y0 > 0.0) {
      const double z0 = y0 / e0;
      const double z1 = y1 / e1;
      const double g = z0 * z0 + z1 * z1 - 1.0;
      if (g == 0.0) return 0.0;
      if (e0 == e1) return std::abs(std::hypot(y0, y1) - e0);
      const double r0 = (e0 / e1) * (e0 / e1);
      const double s = ellipse_root<2>({r0, 1.0}, {z0, z1}, g);
      const double x0 = r0 * y0 / (s + r0);
      double x1 = y1 / (s + 1.0);
      // Near the major axis s + 1 is tiny and the division loses digits.
      // The ellipse equation is better conditioned once x1^2 > e1^2 (s + 1).
      if (x1 * x1 > e1 * e1 * (s + 1.0)) x1 = e1 * std::sqrt(std::max(0.0, 1.0 - (x0 / e0) * (x0 / e0)));
      return std::hypot(x0 - y0, x1 - y1);
    }
    return std::abs(y1 - e1);
  }
  const double numer0 = e0 * y0;
  const double denom0 = e0 * e0 - e1 * e1;
  if (numer0 < denom0) {
    const double xde0 = numer0 / denom0;
    const double x0 = e0 * xde0;
    const double x1 = e1 * std::sqrt(1.0 - xde0 * xde0);
    return std::hypot(x0 - y0, x1);
  }
  return std::abs(y0 - e0);
}

// Unsigned distance from y (first octant) to the ellipsoid e0 >= e1 >= e2.
double ellipse_distance_3(double e0, double e1, double e2, double y0,
                          double y1, double y2) {
  if (y2 > 0.0) {
    if (y1 > 0.0) {
      if (y0 > 0.0) {
        const double z0 = y0 / e0;
        const double z1 = y1 / e1;
        const double z2 = y2 / e2;
        const double g = z0 * z0 + z1 * z1 + z2 * z2 - 1.0;
        if (g == 0.0) return 0.0;
        // Equal semi-axes make a surface of revolution: solve in the
        // meridian plane.
        if (e1 == e2) return ellipse_distance_2(e0, e1, y0, std::hypot(y1, y2));
        if (e0 == e1) return ellipse_distance_2(e0, e2, std::hypot(y0, y1), y2);
        const double r0 = (e0 / e2) * (e0 / e2);
        const double r1 = (e1 / e2) * (e1 / e2);
        const double s = ellipse_root<3>({r0, r1, 1.0}, {z0, z1, z2}, g);
        const double x0 = r0 * y0 / (s + r0);
        const double x1 = r1 * y1 / (s + r1);
        double x2 = y2 / (s + 1.0);
        if (x2 * x2 > e2 * e2 * (s + 1.0)) {
          x2 = e2 * std::sqrt(std::max(0.0, 1.0 - (x0 / e0) * (x0 / e0) - (x1 / e1) * (x1 / e1)));
        }
        return std::sqrt((x0 - y0) * (x0 - y0) + (x1 - y1) * (x1 - y1) +
                         (x2 - y2) * (x2 - y2));
      }
      return ellipse_distance_2(e1, e2, y1, y2);
    }
    if (y0 > 0.0) return ellipse_distance_2(e0, e2, y0, y2);
    return std::abs(y2 - e2);
  }
  const double denom0 = e0 * e0 - e2 * e2;
  const double denom1 = e1 * e1 - e2 * e2;
  const double numer0 = e0 * y0;
  const double numer1 = e1 * y1;
  if (numer0 < denom0 && numer1 < denom1) {
    const double xde0 = numer0 / denom0;
    const double xde1 = numer1 / denom1;
    const double discr = 1.0 - xde0 * xde0 - xde1 * xde1;
    if (discr > 0.0) {
      const double x0 = e0 * xde0;
      const double x1 = e1 * xde1;
      const double x2 = e2 * std::sqrt(discr);
      return std::sqrt((x0 - y0) * (x0 - y0) + (x1 - y1) * (x1 - y1) +
                       x2 * x2);
    }
  }
  return ellipse_distance_2(e0, e1, y0, y1);
}

}  // namespace

double distance(const Point& a, const Point& b, int dim) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

std::string to_string(DomainKind kind) {
  switch (kind) {
    case DomainKind::interval: return "interval";
    case DomainKind::ball: return "ball";
    case DomainKind::ellipse: return "ellipse";
    case DomainKind::superellipse: return "superellipse";
    case DomainKind::box: return "box";
  }
  return "unknown";
}

std::string to_string(Convexity c) {
  switch (c) {
    case Convexity::strongly_convex: return "strongly_convex";
    case Convexity::convex_only: return "convex_only";
    case Convexity::nonconvex: return "nonconvex";
  }
  return "unknown";
}

Domain::Domain(DomainKind kind, int dim, const Point& center,
               const Point& radii, double exponent)
    : kind_(kind), dim_(dim), center_(center), radii_(radii),
      exponent_(exponent) {
  require(dim >= 1 && dim <= kMaxDim, "domain dimension must be 1, 2 or 3");
  for (int i = 0; i < dim; ++i) {
    require(std::isfinite(center[i]), "domain center must be finite");
    require(std::isfinite(radii[i]) && radii[i] > 0.0,
            "domain radii must be positive");
  }
  for (int i = dim; i < kMaxDim; ++i) {
    center_[i] = 0.0;
    radii_[i] = 0.0;
  }
}

Domain Domain::interval(double lo, double hi) {
  require(std::isfinite(lo) && std::isfinite(hi) && lo < hi,
          "interval requires lo < hi");
  return Domain(DomainKind::interval, 1, {0.5 * (lo + hi), 0.0, 0.0},
                {0.5 * (hi - lo), 0.0, 0.0}, 0.0);
}

Domain Domain::ball(int dim, const Point& center, double radius) {
  return Domain(DomainKind::ball, dim, center, {radius, radius, radius}, 2.0);
}

Domain Domain::ellipse(int dim, const Point& center, const Point& semi_axes) {
  require(dim >= 2, "ellipse requires dimension 2 or 3");
  return Domain(DomainKind::ellipse, dim, center, semi_axes, 2.0);
}

Domain Domain::superellipse(const Point& center, double a, double b,
                            double exponent) {
  require(std::isfinite(exponent) && exponent >= 2.0,
          "superellipse exponent must be >= 2");
  if (exponent == 2.0) return ellipse(2, center, {a, b, 0.0});
  return Domain(DomainKind::superellipse, 2, center, {a, b, 0.0}, exponent);
}

Domain Domain::box(int dim, const Point& center, const Point& half_widths) {
  return Domain(DomainKind::box, dim, center, half_widths, 0.0);
}

double Domain::implicit(const Point& x) const {
  switch (kind_) {
    case DomainKind::interval:
    case DomainKind::box: {
      double m = 0.0;
      for (int i = 0; i < dim_; ++i) {
        m = std::max(m, std::abs(x[i] - center_[i]) / radii_[i]);
      }
      return m - 1.0;
    }
    case DomainKind::ball:
    case DomainKind::ellipse: {
      double s = 0.0;
      for (int i = 0; i < dim_; ++i) {
        const double t = (x[i] - center_[i]) / radii_[i];
        s += t * t;
      }
      return s - 1.0;
    }
    case DomainKind::superellipse: {
      double s = 0.0;
      for (int i = 0; i < dim_; ++i) {
        s += std::pow(std::abs(x[i] - center_[i]) / radii_[i], exponent_);
      }
      return s - 1.0;
    }
  }
  return 0.0;
}

double Domain::signed_distance(const Point& x) const {
  switch (kind_) {
    case DomainKind::interval:
    case DomainKind::box: {
      double inside = std::numeric_limits<double>::infinity();
      double outside2 = 0.0;
      for (int i = 0; i < dim_; ++i) {
        const double slack = radii_[i] - std::abs(x[i] - center_[i]);
        inside = std::min(inside, slack);
        if (slack < 0.0) outside2 += slack * slack;
      }
      return outside2 > 0.0 ? -std::sqrt(outside2) : inside;
    }
    case DomainKind::ball:
      return radii_[0] - distance(x, center_, dim_);
    case DomainKind::ellipse: {
      const double d = ellipse_distance(x);
      return implicit(x) < 0.0 ? d : -d;
    }
    case DomainKind::superellipse: {
      const double d = superellipse_distance(x);
      return implicit(x) < 0.0 ? d : -d;
    }
  }
  return 0.0;
}

double Domain::ellipse_distance(const Point& x) const {
  // Sort axes in decreasing length and fold the point into the first orthant.
  std::array<int, kMaxDim> order{0, 1, 2};
  std::sort(order.begin(), order.begin() + dim_,
            [&](int a, int b) { return radii_[a] > radii_[b]; });
  std::array<double, kMaxDim> e{}, y{};
  for (int i = 0; i < dim_; ++i) {
    e[i] = radii_[order[i]];
    y[i] = std::abs(x[order[i]] - center_[order[i]]);
  }
  if (dim_ == 2) return ellipse_distance_2(e[0], e[1], y[0], y[1]);
  return ellipse_distance_3(e[0], e[1], e[2], y[0], y[1], y[2]);
}

double Domain::superellipse_distance(const Point& x) const {
  const double a = radii_[0];
  const double b = radii_[1];
  const double px = std::abs(x[0] - center_[0]);
  const double py = std::abs(x[1] - center_[1]);
  const double q = 2.0 / exponent_;
  constexpr double kQuarter = std::numbers::pi / 2.0;
  auto dist2 = [&](double theta) {
    // Complementary angles beyond pi/4 keep both axis endpoints exact;
    // cos(pi/2) would otherwise leave 6e-17 that pow() amplifies.
    const double c = theta <= 0.5 * kQuarter ? std::cos(theta) : std::sin(kQuarter - theta);
    const double s = theta <= 0.5 * kQuarter ? std::sin(theta) : std::cos(kQuarter - theta);
    const double gx = a * std::pow(c, q);
    const double gy = b * std::pow(s, q);
    return (gx - px) * (gx - px) + (gy - py) * (gy - py);
  };
  constexpr int kScan = 512;
  int best = 0;
  double best_val = dist2(0.0);
  for (int k = 1; k <= kScan; ++k) {
    const double v = dist2(kQuarter * k / kScan);
    if (v < best_val) {
      best_val = v;
      best = k;
    }
  }
  // Golden-section refinement inside the bracketing scan cell pair.
  double lo = kQuarter * std::max(best - 1, 0) / kScan;
  double hi = kQuarter * std::min(best + 1, kScan) / kScan;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = dist2(c);
  double fd = dist2(d);
  for (int it = 0; it < kMaxBisect && hi - lo > 0.0; ++it) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = dist2(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = dist2(d);
    }
  }
  best_val = std::min({best_val, fc, fd});
  return std::sqrt(best_val);
}

bool Domain::contains_ball(const Point& center, double radius) const {
  if (radius < 0.0) throw std::invalid_argument("radius must be >= 0");
  const double rho = signed_distance(center);
  return rho > 0.0 && radius <= rho * (1.0 - 1e-12);
}

Convexity Domain::classify() const {
  switch (kind_) {
    case DomainKind::interval:
    case DomainKind::ball:
    case DomainKind::ellipse:
    case DomainKind::superellipse:
      return Convexity::strongly_convex;
    case DomainKind::box:
      return dim_ == 1 ? Convexity::strongly_convex : Convexity::convex_only;
  }
  return Convexity::nonconvex;
}

Point Domain::project_to_boundary(const Point& x) const {
  Point p = x;
  switch (kind_) {
    case DomainKind::interval:
    case DomainKind::box: {
      bool outside = false;
      for (int i = 0; i < dim_; ++i) {
        const double lo = center_[i] - radii_[i];
        const double hi = center_[i] + radii_[i];
        if (p[i] < lo || p[i] > hi) outside = true;
        p[i] = std::clamp(p[i], lo, hi);
      }
      if (!outside) {
        int axis = 0;
        double slack = std::numeric_limits<double>::infinity();
        for (int i = 0; i < dim_; ++i) {
          const double s = radii_[i] - std::abs(x[i] - center_[i]);
          if (s < slack) {
            slack = s;
            axis = i;
          }
        }
        p[axis] = x[axis] >= center_[axis] ? center_[axis] + radii_[axis]
                                           : center_[axis] - radii_[axis];
      }
      return p;
    }
    case DomainKind::ball:
    case DomainKind::ellipse:
    case DomainKind::superellipse: {
      const double level = implicit(x) + 1.0;
      if (level == 0.0) {
        p[0] = center_[0] + radii_[0];
        return p;
      }
      const double exponent = kind_ == DomainKind::superellipse ? exponent_ : 2.0;
      const double scale = std::pow(level, -1.0 / exponent);
      for (int i = 0; i < dim_; ++i) {
        p[i] = center_[i] + scale * (x[i] - center_[i]);
      }
      return p;
    }
  }
  return p;
}

Point Domain::bounding_min() const {
  Point p{};
  for (int i = 0; i < dim_; ++i) p[i] = center_[i] - radii_[i];
  return p;
}

Point Domain::bounding_max() const {
  Point p{};
  for (int i = 0; i < dim_; ++i) p[i] = center_[i] + radii_[i];
  return p;
}

GridSpec::GridSpec(int dim, const Point& lo, const Point& hi,
                   const std::array<int, kMaxDim>& nodes)
    : dim_(dim), lo_(lo), hi_(hi), nodes_(nodes), spacing_{}, inv_spacing_{},
      stride_{},
      size_(1) {
  require(dim >= 1 && dim <= kMaxDim, "grid dimension must be 1, 2 or 3");
  for (int i = 0; i < kMaxDim; ++i) {
    if (i >= dim) {
      lo_[i] = hi_[i] = 0.0;
      nodes_[i] = 1;
      spacing_[i] = 0.0;
      inv_spacing_[i] = 0.0;
    } else {
      require(std::isfinite(lo[i]) && std::isfinite(hi[i]) && lo[i] < hi[i],
              "grid box requires min < max on every axis");
      require(nodes[i] >= 3, "grid requires at least 3 nodes per axis");
      spacing_[i] = (hi[i] - lo[i]) / (nodes[i] - 1);
      inv_spacing_[i] = 1.0 / spacing_[i];
    }
    stride_[i] = size_;
    size_ *= static_cast<std::size_t>(nodes_[i]);
  }
}

GridSpec GridSpec::fit(const Domain& domain,
                       const std::array<int, kMaxDim>& nodes) {
  return GridSpec(domain.dim(), domain.bounding_min(), domain.bounding_max(),
                  nodes);
}

double GridSpec::min_spacing() const {
  return *std::min_element(spacing_.begin(), spacing_.begin() + dim_);
}

std::size_t GridSpec::index(const std::array<int, kMaxDim>& ijk) const {
  std::size_t idx = 0;
  for (int i = 0; i < dim_; ++i) idx += stride_[i] * ijk[i];
  return idx;
}

std::array<int, kMaxDim> GridSpec::multi_index(std::size_t idx) const {
  std::array<int, kMaxDim> ijk{0, 0, 0};
  for (int i = 0; i < dim_; ++i) {
    ijk[i] = static_cast<int>(idx % nodes_[i]);
    idx /= nodes_[i];
  }
  return ijk;
}

Point GridSpec::coords(std::size_t idx) const {
  const auto ijk = multi_index(idx);
  Point p{};
  for (int i = 0; i < dim_; ++i) {
    // Pin the last node to hi exactly.
    p[i] = ijk[i] == nodes_[i] - 1 ? hi_[i] : lo_[i] + ijk[i] * spacing_[i];
  }
  return p;
}

bool GridSpec::operator==(const GridSpec& other) const {
  return dim_ == other.dim_ && lo_ == other.lo_ && hi_ == other.hi_ &&
         nodes_ == other.nodes_;
}

std::size_t NodeMask::boundary_slot(std::size_t idx) const {
  return boundary_slot_[idx];
}

NodeMask build_mask(const Domain& domain, const GridSpec& grid) {
  require(domain.dim() == grid.dim(), "domain and grid dimensions differ");
  const Point bmin = domain.bounding_min();
  const Point bmax = domain.bounding_max();
  for (int i = 0; i < grid.dim(); ++i) {
    const double slack = 1e-12 * (grid.hi()[i] - grid.lo()[i]);
    require(grid.lo()[i] <= bmin[i] + slack && grid.hi()[i] >= bmax[i] - slack,
            "grid box must contain the domain closure");
  }

  const std::size_t n = grid.size();
  NodeMask mask;
  mask.labels_.assign(n, NodeLabel::exterior);
  mask.distance_.resize(n);
  mask.position_.resize(n);
  mask.boundary_slot_.assign(n, NodeMask::npos);

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(n); ++k) {
    const auto idx = static_cast<std::size_t>(k);
    mask.position_[idx] = grid.coords(idx);
    mask.distance_[idx] = domain.signed_distance(mask.position_[idx]);
    if (mask.distance_[idx] > 0.0) mask.labels_[idx] = NodeLabel::interior;
  }

  const int dim = grid.dim();
  for (std::size_t idx = 0; idx < n; ++idx) {
    if (mask.labels_[idx] == NodeLabel::interior) {
      mask.interior_.push_back(idx);
      continue;
    }
    const auto ijk = grid.multi_index(idx);
    bool touches = false;
    std::array<int, kMaxDim> off{};
    const int span = dim == 1 ? 3 : dim == 2 ? 9 : 27;
    for (int s = 0; s < span && !touches; ++s) {
      int rem = s;
      std::array<int, kMaxDim> nb = ijk;
      bool in_range = true;
      for (int a = 0; a < dim; ++a) {
        off[a] = rem % 3 - 1;
        rem /= 3;
        nb[a] += off[a];
        if (nb[a] < 0 || nb[a] >= grid.nodes(a)) in_range = false;
      }
      if (in_range && mask.labels_[grid.index(nb)] == NodeLabel::interior) {
        touches = true;
      }
    }
    if (touches) {
      mask.labels_[idx] = NodeLabel::boundary;
      mask.boundary_slot_[idx] = mask.boundary_.size();
      mask.boundary_.push_back(idx);
      mask.position_[idx] = domain.project_to_boundary(mask.position_[idx]);
    }
  }
  if (mask.interior_.empty()) {
    throw std::runtime_error("grid too coarse: no interior node");
  }
  return mask;
}

}  // namespace harmavg
