#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "harmavg/geometry.hpp"

namespace harmavg {

/// Domain, lattice and node mask bundled together; shared by every field on
/// the same discretization.
class Lattice {
 public:
  Lattice(Domain domain, GridSpec grid);

  static std::shared_ptr<const Lattice> make(Domain domain, GridSpec grid) {
    return std::make_shared<const Lattice>(std::move(domain), std::move(grid));
  }

  const Domain& domain() const { return domain_; }
  const GridSpec& grid() const { return grid_; }
  const NodeMask& mask() const { return mask_; }
  int dim() const { return grid_.dim(); }

  /// True when all 2^n corners of the cell whose lowest corner is `origin`
  /// are interior nodes.
  bool cell_full(std::size_t origin) const { return cell_full_[origin] != 0; }

 private:
  Domain domain_;
  GridSpec grid_;
  NodeMask mask_;
  std::vector<unsigned char> cell_full_;
};

/// Convex interpolation weights: nonnegative, summing to one.
struct InterpWeights {
  int count = 0;
  std::array<std::size_t, 8> node{};
  std::array<double, 8> weight{};
};

/// Weights used to evaluate a field at `p`.
///
/// Cells whose corners are all interior use multilinear weights. In a cell
/// touching the boundary the value comes from barycentric weights on the
/// smallest simplex containing `p` whose vertices are the cell's interior
/// corners and nearby boundary nodes placed at their projected boundary
/// points. This keeps affine functions exact inside the hull of those
/// positions. Outside it, in the thin strip between a curved boundary and
/// its chords, the closest simplex is used with its weights clamped. If no
/// simplex can be formed the multilinear weights of exterior corners are
/// redistributed proportionally over the remaining corners.
InterpWeights interpolation_weights(const Lattice& lattice, const Point& p);

/// Continuous data on the domain boundary, evaluated at boundary points.
using BoundaryData = std::function<double(const Point&)>;

/// Scalar values on the non-exterior nodes of a lattice. Exterior nodes hold
/// a quiet NaN that must never be read.
class GridField {
 public:
  /// Zero on interior and boundary nodes.
  explicit GridField(std::shared_ptr<const Lattice> lattice);

  /// Samples `fn` at each node's interpolation position (the projected
  /// boundary point for boundary nodes).
  static GridField sample(std::shared_ptr<const Lattice> lattice,
                          const std::function<double(const Point&)>& fn);

  const Lattice& lattice() const { return *lattice_; }
  const std::shared_ptr<const Lattice>& lattice_ptr() const { return lattice_; }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  double operator[](std::size_t idx) const { return values_[idx]; }
  double& operator[](std::size_t idx) { return values_[idx]; }

  bool same_layout(const GridField& other) const {
    return lattice_ == other.lattice_ ||
           (lattice_->grid() == other.lattice_->grid() &&
            lattice_->mask().interior() == other.lattice_->mask().interior() &&
            lattice_->mask().boundary() == other.lattice_->mask().boundary());
  }

 private:
  std::shared_ptr<const Lattice> lattice_;
  std::vector<double> values_;
};

double exterior_sentinel();

/// Field value at a point of the domain closure. Points within 1e-6 grid
/// spacings outside are accepted and clamped to the lattice box.
double eval(const GridField& field, const Point& x);

double sup_norm(const GridField& field);

/// Throws std::invalid_argument when the fields live on different layouts.
double sup_diff(const GridField& a, const GridField& b);

/// `# axisK: min max n` header lines, then one line per run of axis 0 with
/// comma-separated values, 17 significant digits, exterior as `nan`.
void write_csv(const GridField& field, std::ostream& out);

/// Reads a file written by write_csv back onto `lattice`; the header must
/// match the lattice bit for bit.
GridField read_csv(std::istream& in, std::shared_ptr<const Lattice> lattice);

}  // namespace harmavg
