#include "core/bounds.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <cmath>

using namespace smagda;

namespace {

BoundInputs reference_inputs() {
  BoundInputs in;
  in.ell = 12.0;
  in.mu = 2.0;
  in.kappa = 6.0;
  in.tau1 = 1.0 / 36.0;
  in.tau2 = in.tau1 / 48.0;
  in.alpha = 1.0 / 1600.0;
  in.delta_x_sq = 1.0;
  in.delta_y_sq = 1.0;
  in.delta0_b0 = 12.0;
  in.iterations = 10000;
  in.qbar_mesh = {0.5};
  return in;
}

// Single-expression oracle for the bound value.
double q_oracle(const BoundInputs& in, double qbar) {
  return (64.0 / in.alpha) * (in.kappa / in.tau2) *
         (in.delta0_b0 / static_cast<double>(in.iterations) +
          (16.0 * in.ell * in.tau1 * in.tau1 * in.delta_x_sq +
           64.0 * in.ell * in.tau2 * in.tau2 * in.delta_y_sq) +
          std::max(4.0 * in.tau1 * (240.0 * in.delta_x_sq + 32.0 * in.delta_y_sq),
                   2.0 * (16.0 * in.ell * in.tau1 * in.tau1 * in.delta_x_sq +
                          64.0 * in.ell * in.tau2 * in.tau2 * in.delta_y_sq)) /
              static_cast<double>(in.iterations) * std::log(1.0 / qbar));
}

}  // namespace

TEST_CASE("noise aggregate sigma_C^2") {
  CHECK(sigma_c_sq(0.5, 0.0, 0.0) == 0.0);
  CHECK(sigma_c_sq(1.0, 1.0, 1.0) == doctest::Approx(272.0).epsilon(1e-15));
  CHECK(sigma_c_sq(2.0, 1.0, 1.0) == doctest::Approx(2.0 * 272.0).epsilon(1e-15));
  CHECK_THROWS_AS((void)sigma_c_sq(-1.0, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("noise aggregate sigma_D^2") {
  CHECK(sigma_d_sq(3.0, 0.5, 0.1, 0.0, 0.0) == 0.0);
  CHECK(sigma_d_sq(1.0, 1.0, 1.0 / 48.0, 1.0, 1.0) ==
        doctest::Approx(16.0 + 64.0 / 2304.0).epsilon(1e-15));
}

TEST_CASE("sigma_D^2 matches its factored form under the stepsize policy") {
  rng::Stream stream(4);
  for (int i = 0; i < 100; ++i) {
    const auto s = static_cast<std::uint64_t>(i);
    const double ell = 0.5 + 20.0 * stream.uniform(rng::Tag::kSearch, s, 0);
    const double tau1 = 0.001 + stream.uniform(rng::Tag::kSearch, s, 1);
    const double dx = stream.uniform(rng::Tag::kSearch, s, 2);
    const double dy = stream.uniform(rng::Tag::kSearch, s, 3);
    const double tau2 = tau1 / 48.0;
    const double direct = sigma_d_sq(ell, tau1, tau2, dx, dy);
    const double factored = 16.0 * ell * tau1 * (tau1 * dx + tau2 * dy / 12.0);
    CHECK(direct == doctest::Approx(factored).epsilon(1e-14));
  }
}

TEST_CASE("sigma aggregates are jointly degree-1 homogeneous in the noise") {
  for (double c : {0.5, 2.0, 7.0}) {
    CHECK(sigma_c_sq(0.25, c * 1.5, c * 0.5) ==
          doctest::Approx(c * sigma_c_sq(0.25, 1.5, 0.5)).epsilon(1e-15));
    CHECK(sigma_d_sq(3.0, 0.25, 0.01, c * 1.5, c * 0.5) ==
          doctest::Approx(c * sigma_d_sq(3.0, 0.25, 0.01, 1.5, 0.5)).epsilon(1e-15));
  }
}

TEST_CASE("bound curve matches the single-expression oracle") {
  auto in = reference_inputs();
  const auto curve = q_bound(in);
  CHECK(curve.q[0] == doctest::Approx(q_oracle(in, 0.5)).epsilon(1e-12));

  rng::Stream stream(17);
  for (int i = 0; i < 100; ++i) {
    const auto s = static_cast<std::uint64_t>(i);
    BoundInputs r;
    r.ell = 1.0 + 30.0 * stream.uniform(rng::Tag::kSearch, s, 0);
    r.mu = r.ell * (0.05 + 0.9 * stream.uniform(rng::Tag::kSearch, s, 1));
    r.kappa = r.ell / r.mu;
    r.tau1 = (0.2 + 0.79 * stream.uniform(rng::Tag::kSearch, s, 2)) / (3.0 * r.ell);
    r.tau2 = r.tau1 / 48.0;
    r.alpha = (0.1 + 0.9 * stream.uniform(rng::Tag::kSearch, s, 3)) / 406.0;
    r.delta_x_sq = 2.0 * stream.uniform(rng::Tag::kSearch, s, 4);
    r.delta_y_sq = 2.0 * stream.uniform(rng::Tag::kSearch, s, 5);
    r.delta0_b0 = 100.0 * stream.uniform(rng::Tag::kSearch, s, 6);
    r.iterations = 1 + static_cast<std::int64_t>(1e5 * stream.uniform(rng::Tag::kSearch, s, 7));
    const double qbar = 0.001 + 0.99 * stream.uniform(rng::Tag::kSearch, s, 8);
    r.qbar_mesh = {qbar};
    CHECK(q_bound(r).q[0] == doctest::Approx(q_oracle(r, qbar)).epsilon(1e-12));
  }
}

TEST_CASE("bound limits") {
  auto in = reference_inputs();

  // T -> infinity leaves r1 r2.
  in.iterations = 1'000'000'000'000;
  const auto curve = q_bound(in);
  CHECK(curve.q[0] == doctest::Approx(curve.r1 * curve.r2).epsilon(1e-6));

  // qbar -> 1 kills the log term.
  auto near_one = reference_inputs();
  near_one.qbar_mesh = {1.0 - 1e-15};
  const auto c1 = q_bound(near_one);
  CHECK(c1.q[0] ==
        doctest::Approx(c1.r1 * (near_one.delta0_b0 / 1e4 + c1.r2)).epsilon(1e-9));
}

TEST_CASE("bound is monotone decreasing in qbar and in T") {
  auto in = reference_inputs();
  in.qbar_mesh = default_qbar_mesh(1e-3);
  const auto curve = q_bound(in);
  for (std::size_t i = 1; i < curve.q.size(); ++i) CHECK(curve.q[i] < curve.q[i - 1]);

  auto longer = in;
  longer.iterations = 20000;
  const auto curve2 = q_bound(longer);
  for (std::size_t i = 0; i < curve.q.size(); ++i) CHECK(curve2.q[i] < curve.q[i]);
}

TEST_CASE("r3 is the sigma_C branch under the stepsize policy") {
  rng::Stream stream(31);
  for (int i = 0; i < 50; ++i) {
    const auto s = static_cast<std::uint64_t>(i);
    BoundInputs r = reference_inputs();
    r.ell = 1.0 + 30.0 * stream.uniform(rng::Tag::kSearch, s, 0);
    r.mu = r.ell;
    r.kappa = 1.0;
    r.tau1 = (0.01 + 0.98 * stream.uniform(rng::Tag::kSearch, s, 1)) / (3.0 * r.ell);
    r.tau2 = r.tau1 / 48.0;
    r.delta_x_sq = 0.01 + stream.uniform(rng::Tag::kSearch, s, 2);
    r.delta_y_sq = 0.01 + stream.uniform(rng::Tag::kSearch, s, 3);
    const auto curve = q_bound(r);
    CHECK(!curve.r3_from_sigma_d);
    CHECK(curve.r3 == doctest::Approx(4.0 * sigma_c_sq(r.tau1, r.delta_x_sq, r.delta_y_sq))
                          .epsilon(1e-15));
  }
}

TEST_CASE("bound input validation") {
  auto in = reference_inputs();
  in.kappa = 5.0;
  CHECK_THROWS_AS((void)q_bound(in), ConfigError);

  in = reference_inputs();
  in.qbar_mesh = {0.0, 0.5};
  CHECK_THROWS_AS((void)q_bound(in), ConfigError);
  in.qbar_mesh = {0.5, 1.0};
  CHECK_THROWS_AS((void)q_bound(in), ConfigError);
  in.qbar_mesh = {0.5, 0.25};
  CHECK_THROWS_AS((void)q_bound(in), ConfigError);

  in = reference_inputs();
  in.tau2 = in.tau1 / 40.0;
  CHECK_THROWS_AS((void)q_bound(in), ConfigError);

  in = reference_inputs();
  in.constrained_dual = true;
  CHECK_THROWS_AS((void)q_bound(in), UnsupportedError);
}

TEST_CASE("default mesh matches the stated grid size") {
  const auto mesh = default_qbar_mesh(2e-4);
  CHECK(mesh.size() == 4999);
  CHECK(mesh.front() == doctest::Approx(2e-4).epsilon(1e-15));
  CHECK(mesh.back() == doctest::Approx(1.0 - 2e-4).epsilon(1e-12));
}

TEST_CASE("initialization gap of a saddle start is zero") {
  const testing::QuadraticSaddle problem(3);
  const Vec zero = Vec::Zero(3);
  SearchSpec spec;
  spec.num_samples = 64;
  spec.refine_steps = 100;
  spec.outer_descent_steps = 50;
  spec.x_halfwidth = 5.0;
  spec.y_halfwidth = 5.0;
  const auto est = estimate_delta0_b0(problem, zero, zero, zero, 4.0, spec);
  CHECK(est.delta0 <= 1e-9);
  CHECK(est.b0 <= 1e-9);
  CHECK(est.total <= 1e-9);
  CHECK(est.total >= 0.0);
}

TEST_CASE("initialization gap is finite and nonnegative on the game") {
  const auto game = testing::small_game(3, 1.0, 5);
  rng::Stream stream(123);
  Vec x0(3), y0(3);
  for (int i = 0; i < 3; ++i) {
    x0[i] = 20.0 * (2.0 * stream.uniform(rng::Tag::kInit, 0, static_cast<std::uint64_t>(i)) - 1.0);
    y0[i] = 20.0 * (2.0 * stream.uniform(rng::Tag::kInit, 1, static_cast<std::uint64_t>(i)) - 1.0);
  }
  SearchSpec spec;
  spec.num_samples = 128;
  spec.refine_steps = 200;
  spec.outer_descent_steps = 80;
  spec.inner_warm_steps = 30;
  spec.y_halfwidth = 120.0;
  const auto est = estimate_delta0_b0(game, x0, y0, x0, 24.0, spec);
  CHECK(std::isfinite(est.total));
  CHECK(est.total >= 0.0);
  CHECK(est.delta0 >= 0.0);
  CHECK(est.b0 >= 0.0);
  // The primal suboptimality alone is at least |x0|^2-ish here.
  CHECK(est.delta0 > 0.5 * x0.squaredNorm());
}

TEST_CASE("pure-grid estimates never decrease under lattice refinement") {
  const auto game = testing::small_game(2, 0.0, 9);
  Vec x0(2), y0(2);
  x0 << 1.5, -2.0;
  y0 << 0.5, 1.0;
  SearchSpec coarse;
  coarse.pure_grid = true;
  coarse.grid_points_per_dim = 5;
  coarse.x_halfwidth = 4.0;
  coarse.y_halfwidth = 8.0;
  auto fine = coarse;
  fine.grid_points_per_dim = 9;  // n -> 2n-1 nests the lattices

  const auto low = estimate_delta0_b0(game, x0, y0, x0, 24.0, coarse);
  const auto high = estimate_delta0_b0(game, x0, y0, x0, 24.0, fine);
  CHECK(high.phi_z0 >= low.phi_z0 - 1e-12);
  CHECK(high.total >= low.total - 1e-12);
}

TEST_CASE("searches that leave the sampling box raise the boundary flag") {
  const auto game = testing::small_game(2, 0.0, 9);
  Vec x0(2), y0(2);
  x0 << 40.0, 40.0;  // far outside the x box below
  y0 << 0.0, 0.0;
  SearchSpec spec;
  spec.x_halfwidth = 5.0;
  spec.y_halfwidth = 50.0;
  spec.num_samples = 32;
  spec.refine_steps = 100;
  spec.outer_descent_steps = 20;
  const auto est = estimate_delta0_b0(game, x0, y0, x0, 24.0, spec);
  CHECK(est.boundary_warning);
}
