#ifndef SMAGDA_CORE_OPTIMIZER_HPP
#define SMAGDA_CORE_OPTIMIZER_HPP

#include "core/problem.hpp"

#include <json.hpp>

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace smagda {

// One smoothed alternating GDA configuration.
//
// In theory mode the tuple must satisfy the policy p = 2*ell,
// tau1 <= 1/(3*ell), tau2 = tau1/48, beta = alpha*mu*tau2 with
// alpha <= 1/406; free mode only requires positive stepsizes and
// beta in [0, 1].
struct SmAgdaParams {
  double tau1 = 0.0;
  double tau2 = 0.0;
  double beta = 0.0;
  double p = 0.0;
  double alpha = 0.0;  // informational outside theory mode
  std::int64_t iterations = 0;
  bool theory_mode = false;

  void validate(const ProblemConstants* constants = nullptr) const;
  nlohmann::json to_json() const;
  static SmAgdaParams from_json(const nlohmann::json& j);
};

// Stepsize policy: tau1 = min(1/(3 ell), 48 sqrt(delta0_b0) / sqrt(T ell delta^2))
// with delta^2 = delta_x^2 + delta_y^2, then tau2 = tau1/48, beta = alpha mu tau2,
// p = 2 ell. A zero delta^2 selects the deterministic branch tau1 = 1/(3 ell).
SmAgdaParams derive_params(const ProblemConstants& constants, std::int64_t iterations,
                           double delta0_b0, double delta_sq_sum, double alpha);

struct IterateState {
  Vec x, y, z;
  std::int64_t t = 0;
};

// Single update: Gauss-Seidel order, the dual oracle is evaluated at the
// fresh primal point (x_{t+1}, y_t). When the problem carries a dual
// projection the ascent step is projected; x stays unconstrained.
IterateState step(const MinimaxProblem& problem, const IterateState& state,
                  const SmAgdaParams& params, const rng::Stream& stream);

enum class Retention { kMetricsOnly, kFullIterates };

struct MetricSpec {
  std::string name;
  std::function<double(const MinimaxProblem&, const Vec&, const Vec&)> fn;
};

MetricSpec metric_m_kappa();  // |grad_x f|^2 + kappa |grad_y f|^2
MetricSpec metric_distance_sq(Vec x_star, Vec y_star);
MetricSpec metric_constrained_stationarity(double tau2);

struct DivergenceInfo {
  bool diverged = false;
  std::int64_t at_iteration = -1;
};

struct Trajectory {
  SmAgdaParams params;
  std::uint64_t base_seed = 0;
  std::uint64_t path_index = 0;

  std::vector<std::string> metric_names;
  // metrics[m][t] is metric m at (x_t, y_t), recorded before the update for
  // t = 0..T-1, so sums over a series divided by T match the running average
  // convention of the output-selection analysis.
  std::vector<std::vector<double>> metrics;
  std::vector<double> final_metrics;  // evaluated at t = T

  // Full retention only; length T+1 including the initial state.
  std::vector<Vec> xs, ys;

  Vec x_final, y_final, z_final;
  DivergenceInfo divergence;
  std::int64_t recorded_iterations = 0;  // == params.iterations unless diverged

  double metric_average(std::size_t metric_index) const;  // (1/T) sum_{t<T}
};

// Runs T steps from (x0, y0, z0); z0 defaults to x0. Aborts recording with a
// divergence report if an iterate goes non-finite or any coordinate exceeds
// 1e12 in magnitude.
Trajectory run(const MinimaxProblem& problem, const SmAgdaParams& params,
               std::uint64_t base_seed, std::uint64_t path_index, const Vec& x0,
               const Vec& y0, const Vec* z0, std::span<const MetricSpec> metrics,
               Retention retention);

struct SelectedOutput {
  Vec x, y;
  std::int64_t index = 0;
};

// Uniform draw over {0, ..., T-1}; requires full-iterate retention.
SelectedOutput select_output(const Trajectory& trajectory, std::uint64_t selection_seed);

}  // namespace smagda

#endif  // SMAGDA_CORE_OPTIMIZER_HPP
