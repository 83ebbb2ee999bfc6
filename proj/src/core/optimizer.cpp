#include "core/optimizer.hpp"

#include <cmath>
#include <sstream>

namespace smagda {

namespace {

constexpr double kDivergenceGuard = 1e12;
constexpr double kRelTol = 1e-12;
constexpr double kAlphaCap = 1.0 / 406.0;

bool close_rel(double a, double b) {
  return std::abs(a - b) <= kRelTol * std::max(std::abs(a), std::abs(b));
}

bool iterate_ok(const Vec& v) {
  return v.allFinite() && v.cwiseAbs().maxCoeff() <= kDivergenceGuard;
}

}  // namespace

void SmAgdaParams::validate(const ProblemConstants* constants) const {
  if (!(tau1 > 0.0) || !(tau2 > 0.0)) throw ConfigError("params: stepsizes must be positive");
  if (!(beta >= 0.0) || !(beta <= 1.0)) throw ConfigError("params: beta must lie in [0, 1]");
  if (p < 0.0) throw ConfigError("params: p must be >= 0");
  if (iterations < 0) throw ConfigError("params: iterations must be >= 0");
  if (!theory_mode) return;

  if (constants == nullptr)
    throw ConfigError("params: theory-mode validation needs problem constants");
  const double ell = constants->lipschitz_ell;
  const double mu = constants->pl_mu;
  if (tau1 > (1.0 / (3.0 * ell)) * (1.0 + kRelTol))
    throw ConfigError("params: theory mode requires tau1 <= 1/(3 ell)");
  if (!close_rel(tau2, tau1 / 48.0))
    throw ConfigError("params: theory mode requires tau2 = tau1/48");
  if (!close_rel(p, 2.0 * ell))
    throw ConfigError("params: theory mode requires p = 2 ell");
  if (!(alpha > 0.0) || alpha > kAlphaCap * (1.0 + kRelTol))
    throw ConfigError("params: theory mode requires alpha in (0, 1/406]");
  if (!close_rel(beta, alpha * mu * tau2))
    throw ConfigError("params: theory mode requires beta = alpha mu tau2");
}

nlohmann::json SmAgdaParams::to_json() const {
  return {{"tau1", tau1}, {"tau2", tau2},   {"beta", beta},
          {"p", p},       {"alpha", alpha}, {"iterations", iterations},
          {"theory_mode", theory_mode}};
}

SmAgdaParams SmAgdaParams::from_json(const nlohmann::json& j) {
  SmAgdaParams p;
  p.tau1 = j.at("tau1").get<double>();
  p.tau2 = j.at("tau2").get<double>();
  p.beta = j.at("beta").get<double>();
  p.p = j.at("p").get<double>();
  p.alpha = j.value("alpha", 0.0);
  p.iterations = j.at("iterations").get<std::int64_t>();
  p.theory_mode = j.value("theory_mode", false);
  return p;
}

SmAgdaParams derive_params(const ProblemConstants& constants, std::int64_t iterations,
                           double delta0_b0, double delta_sq_sum, double alpha) {
  constants.validate();
  if (iterations < 1) throw ConfigError("derive_params: iterations must be >= 1");
  if (delta0_b0 < 0.0 || delta_sq_sum < 0.0)
    throw ConfigError("derive_params: delta0_b0 and delta^2 must be >= 0");
  if (!(alpha > 0.0)) throw ConfigError("derive_params: alpha must be positive");

  const double ell = constants.lipschitz_ell;
  double tau1 = 1.0 / (3.0 * ell);
  if (delta_sq_sum > 0.0) {
    const double stochastic =
        48.0 * std::sqrt(delta0_b0) /
        std::sqrt(static_cast<double>(iterations) * ell * delta_sq_sum);
    tau1 = std::min(tau1, stochastic);
  }

  SmAgdaParams params;
  params.tau1 = tau1;
  params.tau2 = tau1 / 48.0;
  params.alpha = alpha;
  params.beta = alpha * constants.pl_mu * params.tau2;
  params.p = 2.0 * ell;
  params.iterations = iterations;
  params.theory_mode = true;
  params.validate(&constants);
  return params;
}

IterateState step(const MinimaxProblem& problem, const IterateState& state,
                  const SmAgdaParams& params, const rng::Stream& stream) {
  const auto t = static_cast<std::uint64_t>(state.t);
  IterateState next;
  next.t = state.t + 1;

  const Vec gx = problem.grad_x_stoch(state.x, state.y, stream, t);
  next.x = state.x - params.tau1 * (gx + params.p * (state.x - state.z));

  const Vec gy = problem.grad_y_stoch(next.x, state.y, stream, t);
  next.y = state.y + params.tau2 * gy;
  if (problem.has_dual_projection()) next.y = problem.project_dual(next.y);

  // (1-beta) z + beta x so that beta = 1 copies x exactly.
  next.z = (1.0 - params.beta) * state.z + params.beta * next.x;
  return next;
}

MetricSpec metric_m_kappa() {
  return {"m_kappa", [](const MinimaxProblem& problem, const Vec& x, const Vec& y) {
            const double kappa = problem.constants().kappa();
            return problem.grad_x(x, y).squaredNorm() +
                   kappa * problem.grad_y(x, y).squaredNorm();
          }};
}

MetricSpec metric_distance_sq(Vec x_star, Vec y_star) {
  return {"distance_sq",
          [x_star = std::move(x_star), y_star = std::move(y_star)](
              const MinimaxProblem&, const Vec& x, const Vec& y) {
            return (x - x_star).squaredNorm() + (y - y_star).squaredNorm();
          }};
}

MetricSpec metric_constrained_stationarity(double tau2) {
  return {"constrained_stationarity",
          [tau2](const MinimaxProblem& problem, const Vec& x, const Vec& y) {
            if (!problem.has_dual_projection())
              throw std::logic_error(
                  "constrained_stationarity metric needs a projection-equipped problem");
            const Vec gx = problem.grad_x(x, y);
            const Vec gy = problem.grad_y(x, y);
            const Vec residual = (problem.project_dual(y + tau2 * gy) - y) / tau2;
            return gx.squaredNorm() + residual.squaredNorm();
          }};
}

double Trajectory::metric_average(std::size_t metric_index) const {
  const auto& series = metrics.at(metric_index);
  if (series.empty()) return 0.0;
  double s = 0.0;
  for (double v : series) s += v;
  return s / static_cast<double>(series.size());
}

Trajectory run(const MinimaxProblem& problem, const SmAgdaParams& params,
               std::uint64_t base_seed, std::uint64_t path_index, const Vec& x0,
               const Vec& y0, const Vec* z0, std::span<const MetricSpec> metrics,
               Retention retention) {
  params.validate(params.theory_mode ? &problem.constants() : nullptr);
  if (x0.size() != problem.dim_x() || y0.size() != problem.dim_y())
    throw std::invalid_argument("run: initial point dimension mismatch");

  Trajectory traj;
  traj.params = params;
  traj.base_seed = base_seed;
  traj.path_index = path_index;
  traj.metric_names.reserve(metrics.size());
  for (const auto& m : metrics) traj.metric_names.push_back(m.name);
  traj.metrics.assign(metrics.size(), {});
  const auto T = params.iterations;
  for (auto& series : traj.metrics) series.reserve(static_cast<std::size_t>(T));

  rng::Stream stream(base_seed, path_index);
  IterateState state{x0, y0, z0 != nullptr ? *z0 : x0, 0};

  if (retention == Retention::kFullIterates) {
    traj.xs.reserve(static_cast<std::size_t>(T) + 1);
    traj.ys.reserve(static_cast<std::size_t>(T) + 1);
    traj.xs.push_back(state.x);
    traj.ys.push_back(state.y);
  }

  for (std::int64_t t = 0; t < T; ++t) {
    for (std::size_t m = 0; m < metrics.size(); ++m)
      traj.metrics[m].push_back(metrics[m].fn(problem, state.x, state.y));

    state = step(problem, state, params, stream);
    if (!iterate_ok(state.x) || !iterate_ok(state.y) || !iterate_ok(state.z)) {
      traj.divergence.diverged = true;
      traj.divergence.at_iteration = t;
      traj.recorded_iterations = t + 1;
      traj.x_final = state.x;
      traj.y_final = state.y;
      traj.z_final = state.z;
      return traj;
    }
    if (retention == Retention::kFullIterates) {
      traj.xs.push_back(state.x);
      traj.ys.push_back(state.y);
    }
  }

  traj.recorded_iterations = T;
  traj.x_final = state.x;
  traj.y_final = state.y;
  traj.z_final = state.z;
  traj.final_metrics.reserve(metrics.size());
  for (const auto& m : metrics) traj.final_metrics.push_back(m.fn(problem, state.x, state.y));
  return traj;
}

SelectedOutput select_output(const Trajectory& trajectory, std::uint64_t selection_seed) {
  const auto T = trajectory.params.iterations;
  if (T < 1) throw std::invalid_argument("select_output: need at least one iteration");
  if (trajectory.xs.empty())
    throw std::logic_error(
        "select_output: trajectory was recorded metrics-only; re-run with "
        "full-iterate retention");

  rng::Stream stream(selection_seed, trajectory.path_index);
  const auto u = static_cast<std::int64_t>(
      stream.uniform_int(rng::Tag::kSelect, 0, 0, static_cast<std::uint64_t>(T)));
  SelectedOutput out;
  out.index = u;
  out.x = trajectory.xs.at(static_cast<std::size_t>(u));
  out.y = trajectory.ys.at(static_cast<std::size_t>(u));
  return out;
}

}  // namespace smagda
