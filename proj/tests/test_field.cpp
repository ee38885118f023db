#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "harmavg/field.hpp"
#include "harmavg/oracles.hpp"

using namespace harmavg;

namespace {

std::shared_ptr<const Lattice> disk_lattice(int n) {
  const Domain d = Domain::ball(2, {0, 0, 0}, 1.0);
  return Lattice::make(d, GridSpec::fit(d, {n, n, 1}));
}

GridField random_field(const std::shared_ptr<const Lattice>& lat, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return GridField::sample(lat, [&](const Point&) { return u(rng); });
}

Point random_point_inside(const Domain& d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Point lo = d.bounding_min();
  const Point hi = d.bounding_max();
  for (;;) {
    Point p{};
    for (int a = 0; a < d.dim(); ++a) {
      p[a] = lo[a] + (hi[a] - lo[a]) * 0.5 * (u(rng) + 1.0);
    }
    if (d.signed_distance(p) >= 0.0) return p;
  }
}

}  // namespace

TEST_SUITE("field") {

TEST_CASE("constant field evaluates to the constant") {
  const auto lat = disk_lattice(41);
  const GridField f = GridField::sample(lat, [](const Point&) { return 2.5; });
  std::mt19937_64 rng(1);
  for (int k = 0; k < 200; ++k) {
    CHECK(eval(f, random_point_inside(lat->domain(), rng)) == doctest::Approx(2.5).epsilon(1e-15));
  }
}

TEST_CASE("1D linear values are reproduced between nodes") {
  const Domain d = Domain::interval(0, 1);
  const auto lat = Lattice::make(d, GridSpec::fit(d, {5, 1, 1}));
  const GridField f = GridField::sample(lat, [](const Point& x) { return x[0]; });
  CHECK(f[0] == 0.0);
  CHECK(f[4] == 1.0);
  CHECK(eval(f, {0.375, 0, 0}) == doctest::Approx(0.375).epsilon(1e-15));
}

TEST_CASE("2D linear field is reproduced at an interior point") {
  const auto lat = disk_lattice(101);
  const GridField f = GridField::sample(lat, [](const Point& x) { return x[0]; });
  CHECK(std::abs(eval(f, {0.3, 0.4, 0}) - 0.3) <= 1e-12);
}

// Affine data on a few domains. `curvature_radius` is the smallest radius of
// curvature of the boundary (infinite for a box).
struct AffineCase {
  Domain d;
  std::array<int, 3> n;
  double curvature_radius;
};

double affine(const Point& x) { return 0.7 - 1.3 * x[0] + 0.4 * x[1] + 0.9 * x[2]; }
constexpr double kAffineGrad = 1.6310732;  // |(-1.3, 0.4, 0.9)|, rounded up

std::vector<AffineCase> affine_cases() {
  return {
      {Domain::ball(2, {0, 0, 0}, 1.0), {33, 33, 1}, 1.0},
      {Domain::ellipse(2, {0.1, -0.2, 0}, {1.5, 0.7, 0}), {41, 29, 1}, 0.7 * 0.7 / 1.5},
      {Domain::box(2, {0, 0, 0}, {1, 1, 0}), {21, 21, 1}, INFINITY},
      {Domain::ball(3, {0, 0, 0}, 1.0), {15, 15, 15}, 1.0},
  };
}

double max_spacing(const GridSpec& g) {
  double h = 0.0;
  for (int a = 0; a < g.dim(); ++a) h = std::max(h, g.spacing(a));
  return h;
}

// Width of the strip between the boundary and chords joining boundary nodes
// at most three cells apart per axis: sagitta L^2 / (8 rho), L = 3 h sqrt(n).
double chord_strip(const AffineCase& c, const GridSpec& g) {
  const double h = max_spacing(g);
  return 9.0 * h * h * c.d.dim() / (8.0 * c.curvature_radius);
}

TEST_CASE("affine fields are exact on cells without exterior corners") {
  std::mt19937_64 rng(7);
  for (const AffineCase& c : affine_cases()) {
    const auto lat = Lattice::make(c.d, GridSpec::fit(c.d, c.n));
    const GridField f = GridField::sample(lat, affine);
    const double deep = max_spacing(lat->grid()) * std::sqrt(double(c.d.dim()));
    double worst = 0.0;
    int used = 0;
    while (used < 2000) {
      const Point p = random_point_inside(c.d, rng);
      if (c.d.signed_distance(p) <= deep) continue;
      ++used;
      worst = std::max(worst, std::abs(eval(f, p) - affine(p)));
    }
    INFO("dim ", c.d.dim(), " kind ", static_cast<int>(c.d.kind()));
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("affine fields are exact in cut cells outside the chord strip") {
  std::mt19937_64 rng(8);
  for (const AffineCase& c : affine_cases()) {
    const auto lat = Lattice::make(c.d, GridSpec::fit(c.d, c.n));
    const GridField f = GridField::sample(lat, affine);
    const double strip = chord_strip(c, lat->grid());
    double worst = 0.0;
    for (int k = 0; k < 4000; ++k) {
      const Point p = random_point_inside(c.d, rng);
      if (c.d.signed_distance(p) < strip) continue;
      worst = std::max(worst, std::abs(eval(f, p) - affine(p)));
    }
    for (std::size_t idx : lat->mask().boundary()) {
      const Point p = lat->mask().position(idx);
      worst = std::max(worst, std::abs(eval(f, p) - affine(p)));
    }
    INFO("dim ", c.d.dim(), " kind ", static_cast<int>(c.d.kind()));
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("affine error inside the chord strip is bounded by its width") {
  std::mt19937_64 rng(9);
  for (const AffineCase& c : affine_cases()) {
    const auto lat = Lattice::make(c.d, GridSpec::fit(c.d, c.n));
    const GridField f = GridField::sample(lat, affine);
    const double strip = std::isinf(c.curvature_radius) ? 0.0 : chord_strip(c, lat->grid());
    double worst = 0.0;
    for (int k = 0; k < 4000; ++k) {
      const Point p = random_point_inside(c.d, rng);
      worst = std::max(worst, std::abs(eval(f, p) - affine(p)));
    }
    INFO("dim ", c.d.dim(), " kind ", static_cast<int>(c.d.kind()));
    CHECK(worst <= kAffineGrad * strip + 1e-12);
  }
}

TEST_CASE("interpolation weights are convex and avoid exterior nodes") {
  const Domain d = Domain::superellipse({0, 0, 0}, 1.2, 0.8, 3.0);
  const auto lat = Lattice::make(d, GridSpec::fit(d, {31, 23, 1}));
  std::mt19937_64 rng(11);
  for (int k = 0; k < 5000; ++k) {
    const InterpWeights w = interpolation_weights(*lat, random_point_inside(d, rng));
    REQUIRE(w.count > 0);
    double sum = 0.0;
    for (int i = 0; i < w.count; ++i) {
      CHECK(w.weight[i] >= 0.0);
      CHECK_FALSE(lat->mask().is_exterior(w.node[i]));
      sum += w.weight[i];
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("exterior nodes hold the sentinel") {
  const auto lat = disk_lattice(21);
  const GridField f(lat);
  for (std::size_t idx = 0; idx < lat->mask().size(); ++idx) {
    if (lat->mask().is_exterior(idx)) {
      CHECK(std::isnan(f[idx]));
    } else {
      CHECK(f[idx] == 0.0);
    }
  }
}

TEST_CASE("sup_norm examples") {
  const auto lat = disk_lattice(101);
  CHECK(sup_norm(GridField(lat)) == 0.0);
  const GridField q = GridField::sample(lat, [](const Point& x) { return x[0] * x[0] - x[1] * x[1]; });
  CHECK(std::abs(sup_norm(q) - 1.0) <= 0.02);
  GridField s(lat);
  s[lat->mask().interior()[17]] = -3.0;
  CHECK(sup_norm(s) == 3.0);
}

TEST_CASE("sup_diff examples") {
  const auto lat = disk_lattice(101);
  const GridField a = random_field(lat, 1);
  const GridField b = random_field(lat, 2);
  CHECK(sup_diff(a, a) == 0.0);
  CHECK(sup_diff(a, b) == sup_diff(b, a));
  const GridField h = Barrier(lat->domain()).sample(lat);
  CHECK(sup_diff(GridField(lat), h) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("sup_diff rejects fields on different lattices") {
  const GridField a(disk_lattice(21));
  const GridField b(disk_lattice(23));
  CHECK_THROWS_AS(sup_diff(a, b), std::invalid_argument);
}

TEST_CASE("sup_norm is a norm on random fields") {
  const auto lat = disk_lattice(37);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (int t = 0; t < 50; ++t) {
    const GridField f = random_field(lat, 100 + 3 * t);
    const GridField g = random_field(lat, 101 + 3 * t);
    const double c = u(rng);
    GridField cf = f;
    GridField sum = f;
    for (std::size_t idx : lat->mask().interior()) {
      cf[idx] *= c;
      sum[idx] += g[idx];
    }
    for (std::size_t idx : lat->mask().boundary()) {
      cf[idx] *= c;
      sum[idx] += g[idx];
    }
    CHECK(std::abs(sup_norm(cf) - std::abs(c) * sup_norm(f)) <= 1e-12);
    CHECK(sup_norm(sum) <= sup_norm(f) + sup_norm(g) + 1e-12);
    CHECK(sup_norm(f) >= 0.0);
  }
}

TEST_CASE("CSV output round-trips bit for bit") {
  const Domain d = Domain::ellipse(2, {0, 0, 0}, {1.3, 0.6, 0});
  const auto lat = Lattice::make(d, GridSpec::fit(d, {27, 15, 1}));
  const GridField f = random_field(lat, 9);
  std::ostringstream out;
  write_csv(f, out);
  const std::string text = out.str();
  CHECK(text.rfind("# axis0: ", 0) == 0);
  CHECK(text.find("# axis1: ") != std::string::npos);
  CHECK(text.find("nan") != std::string::npos);
  std::istringstream in(text);
  const GridField g = read_csv(in, lat);
  for (std::size_t idx = 0; idx < lat->mask().size(); ++idx) {
    if (lat->mask().is_exterior(idx)) continue;
    CHECK(g[idx] == f[idx]);
  }
}

TEST_CASE("CSV reader rejects a mismatched header") {
  const GridField f = random_field(disk_lattice(21), 3);
  std::ostringstream out;
  write_csv(f, out);
  std::istringstream in(out.str());
  CHECK_THROWS(read_csv(in, disk_lattice(23)));
}

}  // TEST_SUITE
