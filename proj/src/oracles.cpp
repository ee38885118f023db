#include "harmavg/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace harmavg {

namespace {

constexpr int kPoissonNodes = 4096;
constexpr double kBarrierFloor = 1e-12;
constexpr double kBoundaryMismatch = 1e-10;

double radial_distance(const Point& x, const Point& c, int dim) {
  return distance(x, c, dim);
}

}  // namespace

double harmonic_poly(int degree, const Point& x) {
  if (degree < 0 || degree > 4) {
    throw std::invalid_argument("harmonic_poly degree must be in 0..4");
  }
  const std::complex<double> z(x[0], x[1]);
  std::complex<double> p(1.0, 0.0);
  for (int k = 0; k < degree; ++k) p *= z;
  return p.real();
}

namespace {

// Neumaier summation.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace

double poisson_solution(const AngularData& g, const Point& x,
                        const Point& center, double radius) {
  const double dx = (x[0] - center[0]) / radius;
  const double dy = (x[1] - center[1]) / radius;
  const double r2 = dx * dx + dy * dy;
  if (std::sqrt(r2) >= 1.0 - 1e-12) {
    throw std::domain_error("poisson_solution: point on or outside the circle");
  }
  // The kernel integrates to exactly 1, so subtracting the data at the
  // nearest boundary angle leaves an integrand that vanishes at the kernel
  // peak and keeps the fixed rule usable close to the circle.
  const double g0 = r2 > 0.0 ? g(std::atan2(dy, dx)) : 0.0;
  // Trapezoid sums on all nodes and on the even ones, combined to cancel
  // the step^2 error of data with kinks at nodes; smooth data keeps the
  // spectral accuracy of the trapezoid rule.
  // Compensated sums keep the result smooth in x to ~1e-16, which finite
  // difference checks of harmonicity rely on.
  const double step = 2.0 * std::numbers::pi / kPoissonNodes;
  CompensatedSum sum;
  CompensatedSum even;
  for (int k = 0; k < kPoissonNodes; ++k) {
    const double theta = k * step;
    const double ex = dx - std::cos(theta);
    const double ey = dy - std::sin(theta);
    const double v = (1.0 - r2) / (ex * ex + ey * ey) * (g(theta) - g0);
    sum.add(v);
    if (k % 2 == 0) even.add(v);
  }
  const double fine = sum.value() / kPoissonNodes;
  const double coarse = even.value() / (kPoissonNodes / 2);
  return g0 + (4.0 * fine - coarse) / 3.0;
}

double fd_laplacian(const std::function<double(const Point&)>& u,
                    const Point& x, int dim, double step) {
  const double centre = u(x);
  double lap = 0.0;
  for (int a = 0; a < dim; ++a) {
    Point p = x;
    Point m = x;
    p[a] += step;
    m[a] -= step;
    lap += (u(p) - 2.0 * centre + u(m)) / (step * step);
  }
  return lap;
}

OracleSolution OracleSolution::harmonic(int degree, const Point& center) {
  if (degree < 0 || degree > 4) {
    throw std::invalid_argument("harmonic oracle degree must be in 0..4");
  }
  return OracleSolution(
      Kind::harmonic_poly, 2,
      [degree, center](const Point& x) {
        return harmonic_poly(degree, {x[0] - center[0], x[1] - center[1], 0.0});
      },
      "polynomial (entire)");
}

OracleSolution OracleSolution::poisson(const Domain& disk, AngularData g) {
  if (disk.kind() != DomainKind::ball || disk.dim() != 2) {
    throw std::invalid_argument("poisson oracle needs a 2D ball domain");
  }
  const Point c = disk.center();
  const double R = disk.radii()[0];
  return OracleSolution(
      Kind::poisson_integral, 2,
      [g = std::move(g), c, R](const Point& x) {
        const double dx = x[0] - c[0];
        const double dy = x[1] - c[1];
        if (std::hypot(dx, dy) >= R * (1.0 - 1e-12)) {
          return g(std::atan2(dy, dx));
        }
        return poisson_solution(g, x, c, R);
      },
      "harmonic inside; smoothness of the boundary data at the boundary");
}

OracleSolution OracleSolution::linear_1d(const Domain& interval, double a,
                                         double b) {
  if (interval.kind() != DomainKind::interval) {
    throw std::invalid_argument("linear_1d oracle needs an interval domain");
  }
  const double lo = interval.bounding_min()[0];
  const double hi = interval.bounding_max()[0];
  return OracleSolution(
      Kind::linear_1d, 1,
      [a, b, lo, hi](const Point& x) { return a + (b - a) * (x[0] - lo) / (hi - lo); },
      "affine");
}

OracleSolution OracleSolution::fundamental_shifted(const Domain& domain,
                                                   const Point& pole) {
  if (domain.signed_distance(pole) >= 0.0) {
    throw std::invalid_argument("fundamental solution pole must lie outside the domain");
  }
  const int n = domain.dim();
  return OracleSolution(
      Kind::fundamental_shifted, n,
      [n, pole](const Point& x) {
        const double r = radial_distance(x, pole, n);
        if (n == 1) return r;
        if (n == 2) return std::log(r);
        return 1.0 / r;
      },
      "real analytic on the closed domain");
}

GridField OracleSolution::sample(std::shared_ptr<const Lattice> lattice) const {
  if (lattice->grid().dim() != dim_) {
    throw std::invalid_argument("oracle dimension does not match the lattice");
  }
  return GridField::sample(std::move(lattice), fn_);
}

std::string to_string(OracleSolution::Kind kind) {
  switch (kind) {
    case OracleSolution::Kind::harmonic_poly: return "harmonic_poly";
    case OracleSolution::Kind::poisson_integral: return "poisson_integral";
    case OracleSolution::Kind::linear_1d: return "linear_1d";
    case OracleSolution::Kind::fundamental_shifted: return "fundamental_shifted";
  }
  return "unknown";
}

Barrier::Barrier(const Domain& ball) : dim_(ball.dim()), center_(ball.center()) {
  if (ball.kind() == DomainKind::ball) {
    radius_ = ball.radii()[0];
  } else if (ball.kind() == DomainKind::interval) {
    radius_ = 0.5 * (ball.bounding_max()[0] - ball.bounding_min()[0]);
  } else {
    throw std::invalid_argument("barrier is only available in closed form on balls, not on " +
                                to_string(ball.kind()));
  }
}

double Barrier::operator()(const Point& x) const {
  const double d = radial_distance(x, center_, dim_);
  return (radius_ * radius_ - d * d) / (2.0 * dim_);
}

GridField Barrier::sample(std::shared_ptr<const Lattice> lattice) const {
  if (lattice->grid().dim() != dim_) {
    throw std::invalid_argument("barrier dimension does not match the lattice");
  }
  return GridField::sample(std::move(lattice), [this](const Point& x) {
    return std::max(0.0, (*this)(x));
  });
}

double Barrier::descent_budget(const StencilSet& stencils, std::size_t s) const {
  const double r = stencils.radius(s);
  const GridSpec& grid = stencils.lattice().grid();
  double interp = 0.0;
  for (int a = 0; a < dim_; ++a) interp += grid.spacing(a) * grid.spacing(a);
  interp /= 8.0 * dim_;
  return r * r * stencils.quadrature().second_moment_defect() / (2.0 * dim_) + interp;
}

BarrierConstant barrier_constant(const GridField& f0, const GridField& u,
                                 const GridField& h) {
  if (!f0.same_layout(u) || !f0.same_layout(h)) {
    throw std::invalid_argument("barrier_constant: fields on different lattices");
  }
  const NodeMask& mask = f0.lattice().mask();
  for (std::size_t idx : mask.boundary()) {
    if (std::abs(f0[idx] - u[idx]) > kBoundaryMismatch) {
      throw std::invalid_argument("barrier_constant: f0 and u differ at a boundary node");
    }
  }
  BarrierConstant out;
  for (std::size_t idx : mask.interior()) {
    if (h[idx] < kBarrierFloor) {
      out.excluded.push_back(idx);
      continue;
    }
    out.K = std::max(out.K, std::abs(f0[idx] - u[idx]) / h[idx]);
  }
  return out;
}

SandwichReport check_barrier_sandwich(const GridField& f, const GridField& u,
                                      const GridField& h, double K,
                                      double tolerance) {
  if (!f.same_layout(u) || !f.same_layout(h)) {
    throw std::invalid_argument("check_barrier_sandwich: fields on different lattices");
  }
  SandwichReport rep;
  rep.tolerance = tolerance;
  rep.min_margin = std::numeric_limits<double>::infinity();
  const NodeMask& mask = f.lattice().mask();
  auto visit = [&](std::size_t idx) {
    const double m = K * h[idx] - std::abs(f[idx] - u[idx]);
    if (m < rep.min_margin) {
      rep.min_margin = m;
      rep.worst_node = idx;
    }
  };
  for (std::size_t idx : mask.interior()) visit(idx);
  for (std::size_t idx : mask.boundary()) visit(idx);
  rep.pass = rep.min_margin >= -tolerance;
  return rep;
}

}  // namespace harmavg
