#include "core/problem.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <cmath>

using namespace smagda;
using testing::LinearProblem;

TEST_CASE("constants validation") {
  ProblemConstants ok{12.0, 2.0};
  CHECK(ok.kappa() == doctest::Approx(6.0));
  CHECK_NOTHROW(ok.validate());

  CHECK_THROWS_AS(ProblemConstants{}.validate(), ConfigError);
  CHECK_THROWS_AS((ProblemConstants{1.0, 2.0}).validate(), ConfigError);  // kappa < 1
  CHECK_THROWS_AS((NoiseSpec{-1.0, 0.0}).validate(), ConfigError);
}

TEST_CASE("oracle preconditions") {
  const auto game = testing::small_game();
  const Vec x = Vec::Zero(5), y = Vec::Zero(5);
  CHECK_THROWS_AS((void)game.grad_x(Vec::Zero(4), y), std::invalid_argument);
  Vec bad = x;
  bad[0] = std::nan("");
  CHECK_THROWS_AS((void)game.grad_x(bad, y), std::invalid_argument);
  CHECK_THROWS_AS((void)game.value(x, Vec::Zero(6)), std::invalid_argument);
}

TEST_CASE("finite differences are exact for a linear function") {
  Vec a(3), b(2);
  a << 1.5, -2.0, 0.25;
  b << 3.0, -1.0;
  const LinearProblem problem(a, b);
  const auto report = check_gradients(problem, 10, 1e-5, 1e-10, 7);
  CHECK(report.pass);
  CHECK(report.max_rel_error_x <= 1e-10);
  CHECK(report.max_rel_error_y <= 1e-10);
}

TEST_CASE("gradient check on the synthetic game") {
  const auto game = testing::small_game();
  const auto report = check_gradients(game, 100, 1e-5, 1e-5, 3);
  CHECK(report.pass);
  CHECK(report.max_rel_error_x <= 1e-5);
  CHECK(report.max_rel_error_y <= 1e-5);
}

TEST_CASE("gradient check argument validation") {
  const auto game = testing::small_game();
  CHECK_THROWS_AS((void)check_gradients(game, 0, 1e-5, 1e-5), std::invalid_argument);
  CHECK_THROWS_AS((void)check_gradients(game, 1, 0.0, 1e-5), std::invalid_argument);
}

TEST_CASE("exact gradients satisfy the declared Lipschitz bound") {
  const auto game = testing::small_game(5, 0.0);
  const double ell = game.constants().lipschitz_ell;
  rng::Stream stream(17);
  Vec x1(5), y1(5), x2(5), y2(5);
  for (int pair = 0; pair < 1000; ++pair) {
    const auto step = static_cast<std::uint64_t>(pair);
    for (int i = 0; i < 5; ++i) {
      x1[i] = 10.0 * (2.0 * stream.uniform(rng::Tag::kSearch, step, 4 * i) - 1.0);
      y1[i] = 10.0 * (2.0 * stream.uniform(rng::Tag::kSearch, step, 4 * i + 1) - 1.0);
      x2[i] = 10.0 * (2.0 * stream.uniform(rng::Tag::kSearch, step, 4 * i + 2) - 1.0);
      y2[i] = 10.0 * (2.0 * stream.uniform(rng::Tag::kSearch, step, 4 * i + 3) - 1.0);
    }
    const double rhs = 1.001 * ell * ((x1 - x2).norm() + (y1 - y2).norm());
    CHECK((game.grad_x(x1, y1) - game.grad_x(x2, y2)).norm() <= rhs);
    CHECK((game.grad_y(x1, y1) - game.grad_y(x2, y2)).norm() <= rhs);
  }
}

TEST_CASE("stochastic oracles are unbiased") {
  const auto game = testing::small_game(5, 1.0);
  rng::Stream stream(23, 0);
  Vec x(5), y(5);
  x << 0.3, -1.0, 2.0, 0.0, 1.1;
  y << -0.4, 0.7, 0.0, 1.0, -2.0;
  const Vec exact = game.grad_x(x, y);

  const int draws = 100000;
  Vec mean = Vec::Zero(5);
  double sq = 0.0;
  for (int i = 0; i < draws; ++i) {
    const Vec dev = game.grad_x_stoch(x, y, stream, static_cast<std::uint64_t>(i)) - exact;
    mean += dev;
    sq += dev.squaredNorm();
  }
  mean /= draws;
  const double rms = std::sqrt(sq / draws);
  // Universal form (scales with the per-draw deviation) plus the d=5 window.
  CHECK(mean.norm() <= 5.0 * rms / std::sqrt(static_cast<double>(draws)));
  CHECK(mean.norm() <= 5.0 * 1.0 / std::sqrt(static_cast<double>(draws)));
}

TEST_CASE("per-coordinate noise variance matches the spec'd window") {
  const auto game = testing::small_game(5, 1.0);
  rng::Stream stream(29, 1);
  const Vec x = Vec::Ones(5), y = Vec::Ones(5);
  const Vec exact = game.grad_x(x, y);
  const int draws = 100000;
  Vec sumsq = Vec::Zero(5);
  for (int i = 0; i < draws; ++i) {
    const Vec dev = game.grad_x_stoch(x, y, stream, static_cast<std::uint64_t>(i)) - exact;
    sumsq += dev.cwiseProduct(dev);
  }
  for (int i = 0; i < 5; ++i) {
    const double var = sumsq[i] / draws;
    CHECK(var >= 0.97);
    CHECK(var <= 1.03);
  }
}

TEST_CASE("stochastic oracles are deterministic given the stream key") {
  const auto game = testing::small_game(5, 1.0);
  rng::Stream a(101, 4), b(101, 4);
  const Vec x = Vec::Ones(5), y = Vec::Ones(5);
  const Vec ga = game.grad_x_stoch(x, y, a, 12);
  const Vec gb = game.grad_x_stoch(x, y, b, 12);
  CHECK((ga - gb).cwiseAbs().maxCoeff() == 0.0);
  CHECK((game.grad_y_stoch(x, y, a, 12) - game.grad_y_stoch(x, y, b, 12))
            .cwiseAbs()
            .maxCoeff() == 0.0);
  // The two blocks draw from distinct sub-streams.
  CHECK((game.grad_x_stoch(x, y, a, 12) - game.grad_x(x, y)).norm() !=
        (game.grad_y_stoch(x, y, a, 12) - game.grad_y(x, y)).norm());

  const auto exact_game = testing::small_game(5, 0.0);
  const Vec g0 = exact_game.grad_x_stoch(x, y, a, 12);
  CHECK((g0 - exact_game.grad_x(x, y)).cwiseAbs().maxCoeff() == 0.0);
  const Vec h0 = exact_game.grad_y_stoch(x, y, a, 12);
  CHECK((h0 - exact_game.grad_y(x, y)).cwiseAbs().maxCoeff() == 0.0);
}
