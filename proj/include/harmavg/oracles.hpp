#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "harmavg/averaging.hpp"
#include "harmavg/field.hpp"

namespace harmavg {

/// Re((x1 + i x2)^k) for k in 0..4.
double harmonic_poly(int degree, const Point& x);

/// Boundary data on a circle as a function of the polar angle.
using AngularData = std::function<double(double theta)>;

/// Poisson integral of `g` on the disk of radius `radius` about `center`,
/// evaluated on 4096 equispaced angles with Simpson weights (the trapezoid
/// rule with one Richardson step). Data with kinks at multiples of
/// 2 pi / 4096 stays accurate to ~1e-9 up to |x| = 0.95; kinks between
/// nodes cost O(step^2). Throws std::domain_error
/// for points with |x - center| >= radius (1 - 1e-12).
double poisson_solution(const AngularData& g, const Point& x,
                        const Point& center = {}, double radius = 1.0);

/// Five-point (2n+1 point) centered Laplacian with step `step`.
double fd_laplacian(const std::function<double(const Point&)>& u,
                    const Point& x, int dim, double step = 1e-4);

/// Analytic harmonic reference solution u.
class OracleSolution {
 public:
  enum class Kind { harmonic_poly, poisson_integral, linear_1d, fundamental_shifted };

  /// Re((x - c)^k) in the plane, shifted to `center`.
  static OracleSolution harmonic(int degree, const Point& center = {});
  /// Harmonic extension of `g` into a 2D ball domain. On and beyond
  /// |x - center| >= R (1 - 1e-12) the boundary data is used directly.
  static OracleSolution poisson(const Domain& disk, AngularData g);
  /// a + (b - a) (x - lo) / (hi - lo) on an interval.
  static OracleSolution linear_1d(const Domain& interval, double a, double b);
  /// log|x - pole| in 2D, |x - pole|^(2-n) otherwise. The pole must lie
  /// outside the closed domain.
  static OracleSolution fundamental_shifted(const Domain& domain,
                                            const Point& pole);

  double operator()(const Point& x) const { return fn_(x); }
  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  const std::string& smoothness() const { return smoothness_; }

  /// Samples the oracle at node positions (snapped points for boundary nodes).
  GridField sample(std::shared_ptr<const Lattice> lattice) const;

 private:
  OracleSolution(Kind kind, int dim, std::function<double(const Point&)> fn,
                 std::string smoothness)
      : kind_(kind), dim_(dim), fn_(std::move(fn)), smoothness_(std::move(smoothness)) {}

  Kind kind_;
  int dim_;
  std::function<double(const Point&)> fn_;
  std::string smoothness_;
};

std::string to_string(OracleSolution::Kind kind);

/// h(x) = (R^2 - |x - x0|^2) / (2n): Delta h = -1 inside, h = 0 on the
/// boundary. Only ball (and interval) domains are supported.
class Barrier {
 public:
  explicit Barrier(const Domain& ball);

  double operator()(const Point& x) const;
  int dim() const { return dim_; }
  /// h(x) - (average of h over B(x, r)) = r^2 / (2 (n + 2)).
  double descent(double r) const { return r * r / (2.0 * (dim_ + 2)); }
  /// A priori bound on |h - sigma(h) - descent(delta)| at stencil s: the
  /// template's error on |z - x|^2 plus the multilinear interpolation
  /// error for a quadratic with Hessian -I/n.
  double descent_budget(const StencilSet& stencils, std::size_t s) const;

  GridField sample(std::shared_ptr<const Lattice> lattice) const;

 private:
  int dim_;
  Point center_;
  double radius_;
};

struct BarrierConstant {
  double K = 0.0;
  /// Interior nodes skipped because h < 1e-12 there.
  std::vector<std::size_t> excluded;
};

/// K = max over interior nodes of |f0 - u| / h. Throws std::invalid_argument
/// if f0 and u differ by more than 1e-10 at a boundary node.
BarrierConstant barrier_constant(const GridField& f0, const GridField& u,
                                 const GridField& h);

struct SandwichReport {
  double min_margin = 0.0;
  std::size_t worst_node = 0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Margin K h - |f - u| over interior and boundary nodes; passes iff the
/// minimum is >= -tolerance.
SandwichReport check_barrier_sandwich(const GridField& f, const GridField& u,
                                      const GridField& h, double K,
                                      double tolerance);

}  // namespace harmavg
