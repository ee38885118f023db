#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "harmavg/iteration.hpp"
#include "harmavg/oracles.hpp"

using namespace harmavg;

namespace {

const Domain kDisk = Domain::ball(2, {0, 0, 0}, 1.0);

std::shared_ptr<const Lattice> disk_lattice(int n) {
  return Lattice::make(kDisk, GridSpec::fit(kDisk, {n, n, 1}));
}

RadiusSpec half() {
  RadiusSpec r;
  r.fraction = 0.5;
  return r;
}

double bump(const Point& x) {
  const double r2 = ((x[0] - 0.2) * (x[0] - 0.2) + (x[1] + 0.1) * (x[1] + 0.1)) / 0.16;
  return r2 < 1.0 ? 0.3 * std::pow(1.0 - r2, 3) : 0.0;
}

GridField plus_bump(const GridField& u) {
  GridField f = u;
  for (std::size_t idx : u.lattice().mask().interior()) {
    f[idx] += bump(u.lattice().mask().position(idx));
  }
  return f;
}

}  // namespace

TEST_SUITE("iteration") {

TEST_CASE("stop rule validation") {
  StopRule s;
  CHECK_NOTHROW(s.validate());
  s.tol = 0.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = StopRule{};
  s.max_iter = 0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = StopRule{};
  s.stall_window = 0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("fixed point residual examples") {
  const auto lat = disk_lattice(65);
  const StencilSet st(lat, half(), QuadratureSpec{});
  const GridField c = GridField::sample(lat, [](const Point&) { return 4.0; });
  CHECK(fixed_point_residual(c, st, BoundaryValues::from_field(c)) <= 1e-14);

  const Barrier h(kDisk);
  const GridField hf = h.sample(lat);
  const GridField sh = apply_sigma(hf, st, BoundaryValues::from_field(hf));
  for (std::size_t idx : lat->mask().interior()) CHECK(sh[idx] < hf[idx]);
  CHECK(fixed_point_residual(hf, st, BoundaryValues::from_field(hf)) > 0.0);
  const std::size_t centre = lat->grid().index({32, 32, 0});
  const std::size_t s = st.slot(centre);
  CHECK(std::abs(hf[centre] - sh[centre] - h.descent(st.radius(s))) <=
        h.descent_budget(st, s));
}

TEST_CASE("harmonic quadratic residual is within budget and decays with the grid") {
  const auto quad = [](const Point& x) { return harmonic_poly(2, x); };
  double previous = 0.0;
  for (int n : {65, 129, 257}) {
    const auto lat = disk_lattice(n);
    const StencilSet st(lat, half(), QuadratureSpec{});
    const GridField u = GridField::sample(lat, quad);
    const double r = fixed_point_residual(u, st, BoundaryValues::from_field(u));
    CHECK(r <= 2e-3);
    if (previous > 0.0) CHECK(previous / r >= 3.0);
    previous = r;
  }
}

TEST_CASE("harmonic oracle converges immediately at five times its budget") {
  const auto lat = disk_lattice(65);
  const StencilSet st(lat, half(), QuadratureSpec{});
  const GridField u = OracleSolution::harmonic(2).sample(lat);
  const BoundaryValues b = BoundaryValues::from_field(u);
  StopRule stop;
  stop.tol = 5.0 * fixed_point_residual(u, st, b);
  const IterationResult r = run(u, st, b, stop, {u, {}});
  CHECK(r.report.verdict == Verdict::converged);
  CHECK(r.report.iterations <= 2);
  CHECK(sup_diff(r.field, u) == 0.0);
  CHECK(r.report.final_oracle_error == 0.0);
}

TEST_CASE("zero field with zero boundary converges in one step") {
  const auto lat = disk_lattice(33);
  const StencilSet st(lat, half(), QuadratureSpec{});
  const GridField z(lat);
  const IterationResult r = run(z, st, BoundaryValues::from_field(z), StopRule{});
  CHECK(r.report.verdict == Verdict::converged);
  CHECK(r.report.iterations == 1);
  CHECK(sup_norm(r.field) == 0.0);
}

TEST_CASE("initial boundary values are replaced by the pinned data") {
  const auto lat = disk_lattice(33);
  const StencilSet st(lat, half(), QuadratureSpec{});
  const GridField u = OracleSolution::harmonic(1).sample(lat);
  const BoundaryValues b = BoundaryValues::from_field(u);
  GridField f0(lat);
  for (std::size_t idx : lat->mask().boundary()) f0[idx] = 9.0;
  StopRule stop;
  stop.max_iter = 1;
  const IterationResult r = run(f0, st, b, stop);
  for (std::size_t k = 0; k < lat->mask().boundary().size(); ++k) {
    CHECK(r.field[lat->mask().boundary()[k]] == b.values()[k]);
  }
}

TEST_CASE("error to an exact fixed point never increases") {
  // Affine fields are fixed points of the product rule to rounding.
  const auto lat = disk_lattice(49);
  const StencilSet st(lat, half(), QuadratureSpec{});
  const GridField u = OracleSolution::harmonic(1).sample(lat);
  const BoundaryValues b = BoundaryValues::from_field(u);
  REQUIRE(fixed_point_residual(u, st, b) <= 1e-14);
  StopRule stop;
  stop.tol = 1e-9;
  const IterationResult r = run(plus_bump(u), st, b, stop, {u, {}});
  CHECK(r.report.verdict == Verdict::converged);
  const auto& e = r.report.oracle_error_history;
  REQUIRE(e.size() == static_cast<std::size_t>(r.report.iterations));
  CHECK(e.front() == doctest::Approx(0.3).epsilon(0.05));
  for (std::size_t k = 1; k < e.size(); ++k) CHECK(e[k] <= e[k - 1] + 1e-12);
  CHECK(r.report.final_oracle_error <= 1e-7);
}

TEST_CASE("error to a harmonic oracle grows by at most its residual per step") {
  const auto lat = disk_lattice(49);
  const StencilSet st(lat, half(), QuadratureSpec{});
  const GridField u = OracleSolution::harmonic(2).sample(lat);
  const BoundaryValues b = BoundaryValues::from_field(u);
  const double residual = fixed_point_residual(u, st, b);
  const IterationResult r = run(plus_bump(u), st, b, StopRule{}, {u, {}});
  CHECK(r.report.verdict == Verdict::converged);
  const auto& e = r.report.oracle_error_history;
  for (std::size_t k = 1; k < e.size(); ++k) CHECK(e[k] <= e[k - 1] + residual + 1e-12);
  CHECK(r.report.final_oracle_error <= 0.3 * 1e-2);
  CHECK(r.report.oracle_error_infimum() <= r.report.final_oracle_error);
}

TEST_CASE("sup norm is non-increasing under zero boundary data") {
  const auto lat = disk_lattice(33);
  const StencilSet st(lat, half(), QuadratureSpec{});
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  GridField f = GridField::sample(lat, [&](const Point&) { return u(rng); });
  const BoundaryValues zero = BoundaryValues::from_field(GridField(lat));
  zero.apply(f);
  double prev = sup_norm(f);
  for (int k = 0; k < 200; ++k) {
    f = apply_sigma(f, st, zero);
    const double now = sup_norm(f);
    CHECK(now <= prev + 1e-12);
    prev = now;
  }
}

TEST_CASE("converged iterate satisfies the tolerance it stopped on") {
  const auto lat = disk_lattice(41);
  const StencilSet st(lat, half(), QuadratureSpec{});
  const GridField u = OracleSolution::harmonic(3).sample(lat);
  StopRule stop;
  stop.tol = 1e-7;
  const IterationResult r = run(plus_bump(u), st, BoundaryValues::from_field(u), stop);
  REQUIRE(r.report.verdict == Verdict::converged);
  CHECK(fixed_point_residual(r.field, st, BoundaryValues::from_field(u)) <= stop.tol);
}

TEST_CASE("history lengths match the iteration count") {
  const auto lat = disk_lattice(41);
  const StencilSet st(lat, half(), QuadratureSpec{});
  const GridField u = OracleSolution::harmonic(2).sample(lat);
  const GridField h = Barrier(kDisk).sample(lat);
  const GridField f0 = plus_bump(u);
  const double K = barrier_constant(f0, u, h).K;
  GridField kh = h;
  for (double& v : kh.values()) v *= K;
  StopRule stop;
  stop.max_iter = 37;
  const IterationResult r = run(f0, st, BoundaryValues::from_field(u), stop, {u, kh});
  CHECK(r.report.verdict == Verdict::max_iter);
  CHECK(r.report.iterations == 37);
  CHECK(r.report.sup_diff_history.size() == 37);
  CHECK(r.report.oracle_error_history.size() == 37);
  CHECK(r.report.barrier_margin_history.size() == 37);

  const IterationResult bare = run(f0, st, BoundaryValues::from_field(u), stop);
  CHECK(bare.report.oracle_error_history.empty());
  CHECK(bare.report.barrier_margin_history.empty());
  CHECK(std::isnan(bare.report.final_oracle_error));
  CHECK(std::isnan(bare.report.oracle_error_infimum()));
}

TEST_CASE("stalls at the rounding floor when the tolerance is below it") {
  const Domain d = Domain::interval(0, 1);
  const auto lat = Lattice::make(d, GridSpec::fit(d, {9, 1, 1}));
  const StencilSet st(lat, RadiusSpec{}, QuadratureSpec{});
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const GridField f = GridField::sample(lat, [&](const Point&) { return u(rng); });
  StopRule stop;
  stop.tol = 1e-300;
  stop.max_iter = 100000;
  stop.stall_window = 1;
  const IterationResult r = run(f, st, BoundaryValues::from_field(f), stop);
  CHECK(r.report.verdict == Verdict::stalled);
  CHECK(r.report.iterations < stop.max_iter);
  const auto& s = r.report.sup_diff_history;
  CHECK(s.back() <= 1e-13);
  CHECK(s.back() >= s[s.size() - 2]);
}

TEST_CASE("runs are deterministic") {
  const auto lat = disk_lattice(41);
  QuadratureSpec mc;
  mc.kind = QuadratureSpec::Kind::monte_carlo;
  mc.samples = 400;
  mc.seed = 12;
  const StencilSet st1(lat, half(), mc);
  const StencilSet st2(lat, half(), mc);
  const GridField u = OracleSolution::harmonic(2).sample(lat);
  const GridField f0 = plus_bump(u);
  StopRule stop;
  stop.max_iter = 60;
  const IterationResult a = run(f0, st1, BoundaryValues::from_field(u), stop, {u, {}});
  const IterationResult b = run(f0, st2, BoundaryValues::from_field(u), stop, {u, {}});
  CHECK(a.report.sup_diff_history == b.report.sup_diff_history);
  CHECK(a.report.oracle_error_history == b.report.oracle_error_history);
  CHECK(sup_diff(a.field, b.field) == 0.0);
}

TEST_CASE("verdict names") {
  CHECK(to_string(Verdict::converged) == "converged");
  CHECK(to_string(Verdict::max_iter) == "max_iter");
  CHECK(to_string(Verdict::stalled) == "stalled");
}

}  // TEST_SUITE
