#include "core/grid_tune.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace smagda {

DroGrids DroGrids::from_json(const nlohmann::json& j) {
  DroGrids g;
  if (j.contains("tau1")) g.tau1 = j.at("tau1").get<std::vector<double>>();
  if (j.contains("beta")) g.beta = j.at("beta").get<std::vector<double>>();
  if (j.contains("p")) g.p = j.at("p").get<std::vector<double>>();
  if (g.tau1.empty() || g.beta.empty() || g.p.empty())
    throw ConfigError("dro grids: every grid must be nonempty");
  return g;
}

nlohmann::json DroGrids::to_json() const {
  return {{"tau1", tau1}, {"beta", beta}, {"p", p}};
}

nlohmann::json GridCellResult::to_json() const {
  return {{"tau1", tau1},
          {"tau2", tau2},
          {"beta", beta},
          {"p", p},
          {"median_final_metric",
           std::isfinite(median_final_metric) ? nlohmann::json(median_final_metric)
                                              : nlohmann::json("diverged")},
          {"divergent_paths", divergent_paths}};
}

nlohmann::json GridTuneReport::to_json() const {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : ranking) cells.push_back(c.to_json());
  return {{"ranking", cells}, {"winner", winner.to_json()}};
}

std::int64_t dro_iterations_per_epoch(const DroProblem& problem) {
  return problem.dataset().num_samples() / problem.options().batch_size;
}

GridTuneReport grid_tune_dro(const DroProblem& problem, const DroGrids& grids, int paths,
                             int epochs, std::uint64_t base_seed, int parallelism) {
  if (paths < 1 || epochs < 1) throw ConfigError("grid_tune_dro: paths, epochs >= 1");
  const std::int64_t iterations = dro_iterations_per_epoch(problem) * epochs;
  if (iterations < 1) throw ConfigError("grid_tune_dro: epoch shorter than one iteration");

  std::vector<GridCellResult> cells;
  for (double tau1 : grids.tau1)
    for (double beta : grids.beta)
      for (double p : grids.p)
        cells.push_back({tau1, tau1 / 48.0, beta, p,
                         std::numeric_limits<double>::infinity(), 0});

  const Vec x0 = Vec::Zero(problem.dim_x());
  const Vec y0 = problem.uniform_dual();

  auto evaluate_cell = [&](GridCellResult& cell) {
    SmAgdaParams params;
    params.tau1 = cell.tau1;
    params.tau2 = cell.tau2;
    params.beta = cell.beta;
    params.p = cell.p;
    params.iterations = iterations;

    std::vector<double> finals;
    for (int path = 0; path < paths; ++path) {
      const Trajectory traj = run(problem, params, base_seed,
                                  static_cast<std::uint64_t>(path), x0, y0, nullptr, {},
                                  Retention::kMetricsOnly);
      if (traj.divergence.diverged) {
        ++cell.divergent_paths;
        continue;
      }
      finals.push_back(
          problem.constrained_stationarity(traj.x_final, traj.y_final, params.tau2));
    }
    if (!finals.empty()) {
      std::sort(finals.begin(), finals.end());
      const std::size_t n = finals.size();
      cell.median_final_metric =
          n % 2 == 1 ? finals[n / 2] : 0.5 * (finals[n / 2 - 1] + finals[n / 2]);
    }
  };

  int threads = parallelism;
  if (threads <= 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<int>(threads, static_cast<int>(cells.size()));
  std::vector<std::exception_ptr> errors(cells.size());
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  workers.reserve(static_cast<std::size_t>(threads));
  for (int w = 0; w < threads; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < cells.size(); i = next.fetch_add(1)) {
        try {
          evaluate_cell(cells[i]);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& w : workers) w.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  GridTuneReport report;
  report.ranking = std::move(cells);
  std::stable_sort(report.ranking.begin(), report.ranking.end(),
                   [](const GridCellResult& a, const GridCellResult& b) {
                     return a.median_final_metric < b.median_final_metric;
                   });
  if (!std::isfinite(report.ranking.front().median_final_metric))
    throw DivergenceError("grid_tune_dro: every grid cell diverged", -1);
  report.winner = report.ranking.front();
  return report;
}

}  // namespace smagda
