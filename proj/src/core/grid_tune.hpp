#ifndef SMAGDA_CORE_GRID_TUNE_HPP
#define SMAGDA_CORE_GRID_TUNE_HPP

#include "core/dro.hpp"
#include "core/optimizer.hpp"

#include <json.hpp>

#include <vector>

namespace smagda {

struct DroGrids {
  std::vector<double> tau1 = {1e-1, 1e-2, 1e-3, 1e-4};
  std::vector<double> beta = {1e-3, 1e-4, 1e-5};
  std::vector<double> p = {0.1, 1.0, 10.0};

  static DroGrids from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct GridCellResult {
  double tau1 = 0.0, tau2 = 0.0, beta = 0.0, p = 0.0;
  double median_final_metric = 0.0;  // +inf when every path diverged
  int divergent_paths = 0;

  nlohmann::json to_json() const;
};

struct GridTuneReport {
  std::vector<GridCellResult> ranking;  // ascending by median final metric
  GridCellResult winner;

  nlohmann::json to_json() const;
};

// Runs every (tau1, beta, p) cell with tau2 = tau1/48 for `epochs` epochs
// over `paths` seeded paths from (x0, y0) = (0, u), and ranks cells by the
// median final constrained stationarity. Throws if every cell diverges.
GridTuneReport grid_tune_dro(const DroProblem& problem, const DroGrids& grids, int paths,
                             int epochs, std::uint64_t base_seed, int parallelism = 0);

// Iterations per epoch: floor(d2 / batch_size).
std::int64_t dro_iterations_per_epoch(const DroProblem& problem);

}  // namespace smagda

#endif  // SMAGDA_CORE_GRID_TUNE_HPP
