#include "core/optimizer.hpp"

#include "core/dro.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>

using namespace smagda;

namespace {

SmAgdaParams free_params(double tau1, double tau2, double beta, double p, std::int64_t T) {
  SmAgdaParams params;
  params.tau1 = tau1;
  params.tau2 = tau2;
  params.beta = beta;
  params.p = p;
  params.iterations = T;
  return params;
}

}  // namespace

TEST_CASE("stepsize policy on the reference game") {
  ProblemConstants constants{12.0, 2.0};
  // Small T keeps the deterministic cap active.
  const auto params = derive_params(constants, 100, 12.0, 2.0, 1.0 / 1600.0);
  CHECK(params.tau1 == doctest::Approx(1.0 / 36.0).epsilon(1e-15));
  CHECK(params.tau2 == doctest::Approx(1.0 / 1728.0).epsilon(1e-15));
  CHECK(params.p == doctest::Approx(24.0).epsilon(1e-15));
  CHECK(params.beta == doctest::Approx(7.233796296296296e-7).epsilon(1e-12));
  CHECK(params.beta == params.alpha * constants.pl_mu * params.tau2);
  CHECK(params.theory_mode);
}

TEST_CASE("stepsize policy limits") {
  ProblemConstants constants{12.0, 2.0};

  // Zero noise selects the deterministic branch for any T.
  CHECK(derive_params(constants, 1'000'000'000, 12.0, 0.0, 1e-3).tau1 ==
        doctest::Approx(1.0 / 36.0).epsilon(1e-15));

  // Stochastic branch: tau1 ~ sqrt(delta0_b0), tau1 ~ 1/sqrt(T).
  const double t1 = derive_params(constants, 1'000'000, 1e-6, 2.0, 1e-3).tau1;
  const double t2 = derive_params(constants, 1'000'000, 0.5e-6, 2.0, 1e-3).tau1;
  CHECK(t2 == doctest::Approx(t1 / std::sqrt(2.0)).epsilon(1e-12));
  const double t3 = derive_params(constants, 2'000'000, 1e-6, 2.0, 1e-3).tau1;
  CHECK(t3 == doctest::Approx(t1 / std::sqrt(2.0)).epsilon(1e-12));

  CHECK_THROWS_AS((void)derive_params(constants, 0, 1.0, 1.0, 1e-3), ConfigError);
  CHECK_THROWS_AS((void)derive_params(constants, 10, -1.0, 1.0, 1e-3), ConfigError);
}

TEST_CASE("theory-mode validation rejects off-policy tuples") {
  ProblemConstants constants{12.0, 2.0};
  const auto good = derive_params(constants, 100, 12.0, 2.0, 1.0 / 1600.0);
  CHECK_NOTHROW(good.validate(&constants));

  auto bad = good;
  bad.tau1 = 1.0 / 30.0;  // > 1/(3 ell)
  CHECK_THROWS_AS(bad.validate(&constants), ConfigError);

  bad = good;
  bad.tau2 = good.tau1 / 47.0;
  CHECK_THROWS_AS(bad.validate(&constants), ConfigError);

  bad = good;
  bad.p = 23.0;
  CHECK_THROWS_AS(bad.validate(&constants), ConfigError);

  bad = good;
  bad.alpha = 1.0 / 100.0;  // > 1/406
  bad.beta = bad.alpha * constants.pl_mu * bad.tau2;
  CHECK_THROWS_AS(bad.validate(&constants), ConfigError);

  bad = good;
  bad.beta = 2.0 * good.beta;
  CHECK_THROWS_AS(bad.validate(&constants), ConfigError);

  // alpha = 1/406 itself is allowed.
  auto edge = derive_params(constants, 100, 12.0, 2.0, 1.0 / 406.0);
  CHECK_NOTHROW(edge.validate(&constants));
}

TEST_CASE("beta = 1 makes the proximal center track x exactly") {
  const auto game = testing::small_game(5, 1.0);
  rng::Stream stream(5, 0);
  IterateState state{Vec::Ones(5), Vec::Ones(5), -2.0 * Vec::Ones(5), 0};
  const auto next = step(game, state, free_params(0.01, 0.001, 1.0, 0.0, 1), stream);
  CHECK((next.z - next.x).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("a zero-gradient zero-noise state is a fixed point") {
  const auto game = testing::small_game(5, 0.0);
  rng::Stream stream(5, 0);
  IterateState state{Vec::Zero(5), Vec::Zero(5), Vec::Zero(5), 3};
  const auto next = step(game, state, free_params(0.01, 0.001, 0.5, 24.0, 10), stream);
  CHECK(next.t == 4);
  CHECK(next.x.cwiseAbs().maxCoeff() == 0.0);
  CHECK(next.y.cwiseAbs().maxCoeff() == 0.0);
  CHECK(next.z.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("proximal-center contraction identity") {
  const auto game = testing::small_game(5, 1.0);
  rng::Stream stream(8, 0);
  IterateState state{Vec::Ones(5), -0.5 * Vec::Ones(5), 0.25 * Vec::Ones(5), 0};
  for (double beta : {1e-6, 0.125, 0.5, 0.99}) {
    const auto next = step(game, state, free_params(0.01, 0.001, beta, 2.0, 1), stream);
    const double lhs = (next.z - next.x).norm();
    const double rhs = (1.0 - beta) * (state.z - next.x).norm();
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("p = 0 reduces to plain stochastic alternating GDA, bitwise") {
  const auto game = testing::small_game(5, 1.0);
  const double tau1 = 0.01, tau2 = tau1 / 48.0;

  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto params = free_params(tau1, tau2, 0.37, 0.0, 1000);
    const Vec x0 = Vec::Ones(5), y0 = -Vec::Ones(5);
    const auto traj =
        run(game, params, seed, 0, x0, y0, nullptr, {}, Retention::kFullIterates);

    // Independent reference: the two plain update lines on the same stream.
    rng::Stream stream(seed, 0);
    Vec x = x0, y = y0;
    for (std::int64_t t = 0; t < 1000; ++t) {
      const Vec x_next =
          x - tau1 * game.grad_x_stoch(x, y, stream, static_cast<std::uint64_t>(t));
      y += tau2 * game.grad_y_stoch(x_next, y, stream, static_cast<std::uint64_t>(t));
      x = x_next;
    }
    CHECK((traj.x_final - x).cwiseAbs().maxCoeff() == 0.0);
    CHECK((traj.y_final - y).cwiseAbs().maxCoeff() == 0.0);

    // And the (x, y) path ignores beta entirely when p = 0.
    const auto other = run(game, free_params(tau1, tau2, 0.9, 0.0, 1000), seed, 0, x0, y0,
                           nullptr, {}, Retention::kMetricsOnly);
    CHECK((other.x_final - x).cwiseAbs().maxCoeff() == 0.0);
    CHECK((other.y_final - y).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("runs are reproducible and T = 0 returns the initial state") {
  const auto game = testing::small_game(5, 1.0);
  const auto params = free_params(0.01, 0.001, 0.5, 2.0, 0);
  const MetricSpec metrics[] = {metric_m_kappa()};
  const Vec x0 = Vec::Ones(5), y0 = Vec::Ones(5);
  const auto traj = run(game, params, 3, 1, x0, y0, nullptr,
                        std::span<const MetricSpec>(metrics, 1), Retention::kFullIterates);
  CHECK(traj.recorded_iterations == 0);
  CHECK(traj.metrics[0].empty());
  CHECK(traj.xs.size() == 1);
  CHECK((traj.x_final - x0).cwiseAbs().maxCoeff() == 0.0);

  auto params2 = params;
  params2.iterations = 250;
  const auto a = run(game, params2, 3, 1, x0, y0, nullptr,
                     std::span<const MetricSpec>(metrics, 1), Retention::kMetricsOnly);
  const auto b = run(game, params2, 3, 1, x0, y0, nullptr,
                     std::span<const MetricSpec>(metrics, 1), Retention::kMetricsOnly);
  CHECK(a.metrics[0] == b.metrics[0]);
  CHECK((a.x_final - b.x_final).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("metric recording covers exactly t = 0..T-1") {
  const auto game = testing::small_game(5, 1.0);
  auto params = free_params(0.01, 0.001, 0.5, 2.0, 7);
  const MetricSpec metrics[] = {metric_m_kappa()};
  const auto traj = run(game, params, 3, 0, Vec::Ones(5), Vec::Ones(5), nullptr,
                        std::span<const MetricSpec>(metrics, 1), Retention::kMetricsOnly);
  REQUIRE(traj.metrics[0].size() == 7);
  CHECK(traj.final_metrics.size() == 1);

  double sum = 0.0;
  for (double v : traj.metrics[0]) sum += v;
  CHECK(traj.metric_average(0) == doctest::Approx(sum / 7.0).epsilon(1e-15));

  // The t = 0 entry is the metric of the initial point, untouched by updates.
  const double at_init = metric_m_kappa().fn(game, Vec::Ones(5), Vec::Ones(5));
  CHECK(traj.metrics[0][0] == at_init);
}

TEST_CASE("z0 defaults to x0") {
  const auto game = testing::small_game(5, 0.0);
  const auto params = free_params(0.01, 0.001, 0.5, 2.0, 5);
  const Vec x0 = Vec::Ones(5), y0 = 0.5 * Vec::Ones(5);
  const Vec z0 = x0;
  const auto defaulted = run(game, params, 0, 0, x0, y0, nullptr, {}, Retention::kMetricsOnly);
  const auto explicit_z = run(game, params, 0, 0, x0, y0, &z0, {}, Retention::kMetricsOnly);
  CHECK((defaulted.z_final - explicit_z.z_final).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("divergence guard aborts with the iteration index") {
  const auto game = testing::small_game(5, 0.0);
  // A grossly unstable primal stepsize blows up against the prox term.
  const auto params = free_params(1e9, 1e-3, 0.1, 10.0, 100);
  const auto traj = run(game, params, 0, 0, Vec::Ones(5), Vec::Ones(5), nullptr, {},
                        Retention::kMetricsOnly);
  CHECK(traj.divergence.diverged);
  CHECK(traj.divergence.at_iteration >= 0);
  CHECK(traj.divergence.at_iteration < 100);
  CHECK(traj.final_metrics.empty());
}

TEST_CASE("projection is applied to the dual ascent step") {
  const auto problem = testing::toy_dro(10, 4, 10);
  const auto params = free_params(0.01, 0.5, 0.1, 1.0, 1);
  rng::Stream stream(0, 0);
  IterateState state{Vec::Zero(4), problem.uniform_dual(), Vec::Zero(4), 0};
  const auto next = step(problem, state, params, stream);
  double sum = 0.0;
  for (int j = 0; j < next.y.size(); ++j) {
    CHECK(next.y[j] >= 0.0);
    sum += next.y[j];
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("uniform output selection") {
  const auto game = testing::small_game(5, 1.0);
  const MetricSpec metrics[] = {metric_m_kappa()};

  auto params = free_params(0.01, 0.001, 0.5, 2.0, 1);
  const Vec x0 = Vec::Ones(5), y0 = Vec::Ones(5);
  const auto single = run(game, params, 1, 0, x0, y0, nullptr,
                          std::span<const MetricSpec>(metrics, 1), Retention::kFullIterates);
  const auto pick = select_output(single, 99);
  CHECK(pick.index == 0);
  CHECK((pick.x - x0).cwiseAbs().maxCoeff() == 0.0);
  CHECK((pick.y - y0).cwiseAbs().maxCoeff() == 0.0);

  // Same selection seed, same index.
  CHECK(select_output(single, 7).index == select_output(single, 7).index);

  params.iterations = 10;
  const auto traj = run(game, params, 1, 0, x0, y0, nullptr,
                        std::span<const MetricSpec>(metrics, 1), Retention::kFullIterates);
  REQUIRE(traj.xs.size() == 11);  // T+1 states including the initial one
  REQUIRE(traj.ys.size() == 11);
  std::vector<int> counts(10, 0);
  const int draws = 100000;
  for (int i = 0; i < draws; ++i)
    ++counts[static_cast<std::size_t>(
        select_output(traj, static_cast<std::uint64_t>(i)).index)];
  const double expected = draws / 10.0;
  const double sigma = std::sqrt(draws * 0.1 * 0.9);
  for (int c : counts) CHECK(std::abs(c - expected) <= 5.0 * sigma);

  const auto metrics_only =
      run(game, params, 1, 0, x0, y0, nullptr, std::span<const MetricSpec>(metrics, 1),
          Retention::kMetricsOnly);
  CHECK_THROWS_AS((void)select_output(metrics_only, 0), std::logic_error);
}

TEST_CASE("free-mode parameter validation") {
  CHECK_THROWS_AS(free_params(0.0, 0.001, 0.5, 1.0, 10).validate(), ConfigError);
  CHECK_THROWS_AS(free_params(0.01, 0.001, 1.5, 1.0, 10).validate(), ConfigError);
  CHECK_THROWS_AS(free_params(0.01, 0.001, 0.5, -1.0, 10).validate(), ConfigError);
  CHECK_NOTHROW(free_params(0.01, 0.001, 0.0, 0.0, 10).validate());
}
