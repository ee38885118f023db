#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "harmavg/iteration.hpp"
#include "harmavg/oracles.hpp"
#include "support/reference.hpp"

using namespace harmavg;

namespace {

const Domain kDisk = Domain::ball(2, {0, 0, 0}, 1.0);

std::shared_ptr<const Lattice> disk_lattice(int n) {
  return Lattice::make(kDisk, GridSpec::fit(kDisk, {n, n, 1}));
}

Point random_in_disk(std::mt19937_64& rng, double rmax) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (;;) {
    const Point p{rmax * u(rng), rmax * u(rng), 0};
    if (std::hypot(p[0], p[1]) < rmax) return p;
  }
}

// Poisson integral on the unit disk by a plain trapezoid rule on 2^20 points.
double poisson_reference(const AngularData& g, double x, double y) {
  const int n = 1 << 20;
  const double r2 = x * x + y * y;
  double sum = 0.0;
  for (int k = 0; k < n; ++k) {
    const double t = 2.0 * std::numbers::pi * k / n;
    const double dx = x - std::cos(t);
    const double dy = y - std::sin(t);
    sum += (1.0 - r2) / (dx * dx + dy * dy) * g(t);
  }
  return sum / n;
}

double height_bump(const Point& x) {
  const double r2 = (x[0] * x[0] + x[1] * x[1]) / 0.25;
  return r2 < 1.0 ? 0.1 * std::pow(1.0 - r2, 3) : 0.0;
}

RadiusSpec half() {
  RadiusSpec r;
  r.fraction = 0.5;
  return r;
}

}  // namespace

TEST_SUITE("oracles") {

TEST_CASE("harmonic polynomial examples") {
  CHECK(harmonic_poly(0, {0.3, -2.0, 0}) == 1.0);
  CHECK(harmonic_poly(2, {1, 0, 0}) == 1.0);
  CHECK(harmonic_poly(2, {0, 1, 0}) == -1.0);
  CHECK(harmonic_poly(3, {1, 1, 0}) == doctest::Approx(-2.0));
  CHECK_THROWS_AS(harmonic_poly(5, {0, 0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(harmonic_poly(-1, {0, 0, 0}), std::invalid_argument);
}

TEST_CASE("harmonic polynomials agree with the binomial expansion") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int k = 0; k <= 4; ++k) {
    for (int t = 0; t < 200; ++t) {
      const double x = u(rng);
      const double y = u(rng);
      CHECK(std::abs(harmonic_poly(k, {x, y, 0}) - ref::harmonic_poly_expanded(k, x, y)) <= 1e-13);
    }
  }
  const OracleSolution shifted = OracleSolution::harmonic(2, {0.5, -0.25, 0});
  CHECK(shifted({1.5, -0.25, 0}) == doctest::Approx(1.0));
  CHECK(shifted.kind() == OracleSolution::Kind::harmonic_poly);
  CHECK(shifted.dim() == 2);
}

TEST_CASE("Poisson integral examples") {
  const AngularData cos2 = [](double t) { return std::cos(2 * t); };
  CHECK(std::abs(poisson_solution([](double) { return 3.5; }, {0.4, 0.7, 0}) - 3.5) <= 1e-13);
  CHECK(std::abs(poisson_solution(cos2, {0, 0, 0})) <= 1e-14);
  for (double r : {0.1, 0.5, 0.9, 0.95}) {
    CHECK(std::abs(poisson_solution(cos2, {r, 0, 0}) - harmonic_poly(2, {r, 0, 0})) <= 1e-12);
  }
  CHECK_THROWS_AS(poisson_solution(cos2, {1, 0, 0}), std::domain_error);
  CHECK_THROWS_AS(poisson_solution(cos2, {0.6, 0.8, 0}), std::domain_error);
  CHECK_THROWS_AS(poisson_solution(cos2, {1.0 - 1e-13, 0, 0}), std::domain_error);
}

TEST_CASE("Poisson integral of cos k theta matches the harmonic polynomial") {
  std::mt19937_64 rng(2);
  for (int k = 0; k <= 4; ++k) {
    const AngularData g = [k](double t) { return std::cos(k * t); };
    for (int t = 0; t < 50; ++t) {
      const Point p = random_in_disk(rng, 0.95);
      CHECK(std::abs(poisson_solution(g, p) - harmonic_poly(k, p)) <= 1e-8);
    }
  }
}

TEST_CASE("Poisson integral of data with kinks at quadrature nodes") {
  const AngularData g = [](double t) { return std::abs(std::cos(t)); };
  std::mt19937_64 rng(3);
  for (int t = 0; t < 12; ++t) {
    const Point p = random_in_disk(rng, 0.95);
    CHECK(std::abs(poisson_solution(g, p) - poisson_reference(g, p[0], p[1])) <= 1e-8);
  }
  CHECK(std::abs(poisson_solution(g, {0, 0.95, 0}) - poisson_reference(g, 0, 0.95)) <= 1e-8);
}

TEST_CASE("Poisson integral of data with kinks between nodes") {
  // A slope jump J between nodes costs about step^2 J max(P) / (24 pi) with
  // P = (1 + r) / (1 - r) the kernel peak.
  const AngularData g = [](double t) { return std::abs(std::cos(t - 1.0)); };
  const double step = 2.0 * std::numbers::pi / 4096;
  std::mt19937_64 rng(4);
  for (int t = 0; t < 12; ++t) {
    const Point p = random_in_disk(rng, 0.95);
    const double r = std::hypot(p[0], p[1]);
    const double bound = step * step * 2.0 * (1.0 + r) / ((1.0 - r) * 24.0 * std::numbers::pi);
    CHECK(std::abs(poisson_solution(g, p) - poisson_reference(g, p[0], p[1])) <= bound);
  }
}

TEST_CASE("Poisson oracle uses the data on the circle") {
  const OracleSolution u = OracleSolution::poisson(kDisk, [](double t) { return std::sin(t); });
  CHECK(u({0, 1, 0}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(u({0.5, 0, 0}) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(u.kind() == OracleSolution::Kind::poisson_integral);
  CHECK_FALSE(u.smoothness().empty());
  CHECK_THROWS_AS(OracleSolution::poisson(Domain::ball(3, {0, 0, 0}, 1.0), [](double) { return 0.0; }),
                  std::invalid_argument);
}

TEST_CASE("every oracle kind is harmonic by finite differences") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int label = 0;
  auto check_harmonic = [&](const OracleSolution& o, auto&& point) {
    ++label;
    INFO("oracle #", label, " kind ", to_string(o.kind()));
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
      const Point p = point();
      worst = std::max(worst, std::abs(fd_laplacian([&](const Point& x) { return o(x); }, p, o.dim())));
    }
    CHECK(worst <= 1e-6);
  };
  for (int k = 0; k <= 4; ++k) {
    check_harmonic(OracleSolution::harmonic(k, {0.2, 0.1, 0}), [&] { return random_in_disk(rng, 0.99); });
  }
  for (int k = 1; k <= 4; ++k) {
    check_harmonic(OracleSolution::poisson(kDisk, [k](double t) { return std::sin(k * t); }),
                   [&] { return random_in_disk(rng, 0.95); });
  }
  // Near a kink of the data the FD truncation grows like step^2 / (1 - r)^3.
  check_harmonic(OracleSolution::poisson(kDisk, [](double t) { return std::abs(std::cos(t)); }),
                 [&] { return random_in_disk(rng, 0.9); });

  const Domain line = Domain::interval(-1, 2);
  check_harmonic(OracleSolution::linear_1d(line, 2.0, -1.0), [&] { return Point{0.5 + 1.4 * u(rng), 0, 0}; });
  check_harmonic(OracleSolution::fundamental_shifted(kDisk, {1.5, 0.5, 0}),
                 [&] { return random_in_disk(rng, 0.99); });
  const Domain ball3 = Domain::ball(3, {0, 0, 0}, 1.0);
  check_harmonic(OracleSolution::fundamental_shifted(ball3, {0, 2, 0}), [&] {
    for (;;) {
      const Point p{u(rng), u(rng), u(rng)};
      if (ball3.signed_distance(p) > 0.0) return p;
    }
  });
  check_harmonic(OracleSolution::fundamental_shifted(line, {3, 0, 0}),
                 [&] { return Point{0.5 + 1.4 * u(rng), 0, 0}; });
}

TEST_CASE("linear and fundamental oracles") {
  const Domain line = Domain::interval(0, 1);
  const OracleSolution lin = OracleSolution::linear_1d(line, 2.0, -1.0);
  CHECK(lin({0, 0, 0}) == 2.0);
  CHECK(lin({1, 0, 0}) == -1.0);
  CHECK(lin({0.25, 0, 0}) == doctest::Approx(1.25));
  CHECK(lin.kind() == OracleSolution::Kind::linear_1d);
  CHECK_THROWS_AS(OracleSolution::linear_1d(kDisk, 0, 1), std::invalid_argument);

  const OracleSolution log2d = OracleSolution::fundamental_shifted(kDisk, {2, 0, 0});
  CHECK(log2d({0, 0, 0}) == doctest::Approx(std::log(2.0)));
  const OracleSolution inv3d =
      OracleSolution::fundamental_shifted(Domain::ball(3, {0, 0, 0}, 1.0), {0, 0, 4});
  CHECK(inv3d({0, 0, 0}) == doctest::Approx(0.25));
  CHECK_THROWS_AS(OracleSolution::fundamental_shifted(kDisk, {0.5, 0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(OracleSolution::fundamental_shifted(kDisk, {1, 0, 0}), std::invalid_argument);

  CHECK(to_string(OracleSolution::Kind::harmonic_poly) == "harmonic_poly");
  CHECK(to_string(OracleSolution::Kind::poisson_integral) == "poisson_integral");
  CHECK(to_string(OracleSolution::Kind::linear_1d) == "linear_1d");
  CHECK(to_string(OracleSolution::Kind::fundamental_shifted) == "fundamental_shifted");
}

TEST_CASE("barrier examples and Laplacian") {
  const Barrier h(kDisk);
  CHECK(h({0, 0, 0}) == doctest::Approx(0.25));
  CHECK(std::abs(h({0.6, 0.8, 0})) <= 1e-15);
  CHECK(Barrier(Domain::interval(-1, 1))({0, 0, 0}) == doctest::Approx(0.5));
  std::mt19937_64 rng(5);
  for (int t = 0; t < 100; ++t) {
    const Point p = random_in_disk(rng, 1.0);
    CHECK(h(p) > 0.0);
    CHECK(fd_laplacian([&](const Point& x) { return h(x); }, p, 2) == doctest::Approx(-1.0).epsilon(1e-6));
  }
  const Barrier h3(Domain::ball(3, {1, 0, 0}, 2.0));
  CHECK(fd_laplacian([&](const Point& x) { return h3(x); }, {1.2, 0.3, -0.5}, 3) ==
        doctest::Approx(-1.0).epsilon(1e-6));
  CHECK_THROWS_AS(Barrier(Domain::box(2, {0, 0, 0}, {1, 1, 0})), std::invalid_argument);
  CHECK_THROWS_AS(Barrier(Domain::ellipse(2, {0, 0, 0}, {2, 1, 0})), std::invalid_argument);
}

TEST_CASE("barrier descent over a ball matches Monte Carlo") {
  for (int n : {2, 3}) {
    const Domain ball = Domain::ball(n, {0, 0, 0}, 1.0);
    const Barrier h(ball);
    const ref::Vec x{0.2, -0.1, n == 3 ? 0.3 : 0.0};
    const double delta = 0.4;
    const double mean = ref::monte_carlo_ball_mean(
        [&](const ref::Vec& z) { return h({z[0], z[1], z[2]}); }, x, delta, n, 1000000, 6);
    // Sample std of h over the ball is below delta^2 / (2n), so 1e6 samples
    // leave a few 1e-5.
    CHECK(std::abs(h({x[0], x[1], x[2]}) - mean - h.descent(delta)) <= 2e-4);
    CHECK(h.descent(delta) == doctest::Approx(delta * delta / (2.0 * (n + 2))));
  }
}

TEST_CASE("averaged barrier descends by the closed form within budget") {
  const auto lat = disk_lattice(65);
  const StencilSet st(lat, half(), QuadratureSpec{});
  const Barrier h(kDisk);
  const GridField hf = h.sample(lat);
  const GridField sh = apply_sigma(hf, st, BoundaryValues::from_field(hf));
  for (std::size_t s = 0; s < st.size(); ++s) {
    const std::size_t idx = st.node(s);
    CHECK(sh[idx] <= hf[idx] + 1e-12);
    // The budget is attained at nodes whose points all land in full cells.
    CHECK(std::abs(hf[idx] - sh[idx] - h.descent(st.radius(s))) <=
          h.descent_budget(st, s) * (1.0 + 1e-12));
  }
}

TEST_CASE("barrier constant examples") {
  const auto lat = disk_lattice(65);
  const GridField u = OracleSolution::harmonic(2).sample(lat);
  const GridField h = Barrier(kDisk).sample(lat);
  CHECK(barrier_constant(u, u, h).K == 0.0);

  GridField uh = u;
  for (std::size_t idx : lat->mask().interior()) uh[idx] += h[idx];
  CHECK(barrier_constant(uh, u, h).K == doctest::Approx(1.0).epsilon(1e-10));

  GridField ub = u;
  for (std::size_t idx : lat->mask().interior()) ub[idx] += height_bump(lat->mask().position(idx));
  const BarrierConstant K = barrier_constant(ub, u, h);
  double scan = 0.0;
  for (std::size_t idx : lat->mask().interior()) {
    const Point& p = lat->mask().position(idx);
    scan = std::max(scan, height_bump(p) / ((1.0 - p[0] * p[0] - p[1] * p[1]) / 4.0));
  }
  CHECK(K.K == doctest::Approx(scan).epsilon(1e-10));
  CHECK(std::abs(K.K - 0.4) <= 1e-3);

  GridField bad = u;
  bad[lat->mask().boundary()[0]] += 1e-6;
  CHECK_THROWS_AS(barrier_constant(bad, u, h), std::invalid_argument);
}

TEST_CASE("barrier constant skips nodes where h vanishes") {
  const auto lat = disk_lattice(65);
  const GridField u = OracleSolution::harmonic(1).sample(lat);
  GridField h = Barrier(kDisk).sample(lat);
  const std::size_t victim = lat->mask().interior()[3];
  h[victim] = 1e-13;
  GridField f = u;
  f[victim] += 1.0;
  const BarrierConstant K = barrier_constant(f, u, h);
  REQUIRE(K.excluded.size() == 1);
  CHECK(K.excluded[0] == victim);
  CHECK(K.K == 0.0);
}

TEST_CASE("barrier sandwich") {
  const auto lat = disk_lattice(65);
  const StencilSet st(lat, half(), QuadratureSpec{});
  const GridField u = OracleSolution::harmonic(2).sample(lat);
  const GridField h = Barrier(kDisk).sample(lat);
  GridField f0 = u;
  for (std::size_t idx : lat->mask().interior()) f0[idx] += height_bump(lat->mask().position(idx));
  const double K = barrier_constant(f0, u, h).K;

  CHECK(check_barrier_sandwich(f0, u, h, K, 1e-10).min_margin >= -1e-10);
  const SandwichReport at_u = check_barrier_sandwich(u, u, h, K, 0.0);
  CHECK(at_u.pass);
  CHECK(at_u.min_margin >= 0.0);

  const BoundaryValues b = BoundaryValues::from_field(u);
  const double tol = 10.0 * fixed_point_residual(u, st, b);
  GridField f = f0;
  for (int n = 0; n < 400; ++n) {
    f = apply_sigma(f, st, b);
    const SandwichReport r = check_barrier_sandwich(f, u, h, K, tol);
    CHECK(r.pass);
    CHECK(r.tolerance == tol);
  }
  GridField far = u;
  far[lat->mask().interior()[0]] += 1.0;
  CHECK_FALSE(check_barrier_sandwich(far, u, h, K, tol).pass);
}

}  // TEST_SUITE
