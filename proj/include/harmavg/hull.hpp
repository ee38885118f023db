#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "harmavg/field.hpp"

namespace harmavg {

/// A graph sample (z, f(z)) in R^(n+1); only the first `ambient` entries
/// are used.
using HullPoint = std::array<double, kMaxDim + 1>;

struct HullWitness {
  HullPoint query{};
  /// Indices into the sample set.
  std::vector<std::size_t> support;
  std::vector<double> coefficients;
  /// max(|sum alpha_i z_i - query|_inf, |sum alpha_i - 1|).
  double residual = 0.0;
};

enum class HullVerdict { contained, refused, insufficient_sampling };

std::string to_string(HullVerdict v);

struct HullResult {
  HullVerdict verdict = HullVerdict::refused;
  /// Filled when contained.
  HullWitness witness;
  /// Filled otherwise: (normal, offset) with normal . z_i + offset <= 0 for
  /// every sample and normal . query + offset = separation > 0.
  HullPoint normal{};
  double offset = 0.0;
  double separation = 0.0;
  /// max_i (normal . z_i + offset); <= 0 up to rounding for a valid certificate.
  double worst_sample_value = 0.0;
};

/// Decides whether `query` is a convex combination of `samples` in
/// R^ambient with a phase-one simplex LP. A witness uses at most
/// ambient + 1 samples. When the LP is infeasible the dual gives a
/// separating hyperplane; if `expect_inside` is set the verdict is
/// insufficient_sampling instead of refused.
HullResult hull_membership(std::span<const HullPoint> samples,
                           const HullPoint& query, int ambient,
                           bool expect_inside = false);

/// Shrinks a witness to at most ambient + 1 support points by moving along
/// affine dependencies; the represented point is unchanged.
HullWitness caratheodory_reduce(std::span<const HullPoint> samples,
                                HullWitness witness, int ambient);

/// Recomputes the residual of `witness` against `samples`.
double witness_residual(std::span<const HullPoint> samples,
                        const HullWitness& witness, int ambient);

/// Graph samples (position, value) at every non-exterior node.
std::vector<HullPoint> graph_samples(const GridField& f);

}  // namespace harmavg
