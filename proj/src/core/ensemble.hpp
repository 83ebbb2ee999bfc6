#ifndef SMAGDA_CORE_ENSEMBLE_HPP
#define SMAGDA_CORE_ENSEMBLE_HPP

#include "core/optimizer.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace smagda {

// Initial-point policy of an ensemble. `kShared` draws one (x0, y0) for all
// paths (the quantile-comparison protocol); `kPerPath` gives every path its
// own draw. z0 is always x0.
struct InitSpec {
  enum class Mode { kShared, kPerPath };
  enum class Draw { kUniformBox, kZeros, kGiven };

  Mode mode = Mode::kShared;
  Draw x0_draw = Draw::kUniformBox;
  Draw y0_draw = Draw::kUniformBox;
  double box_halfwidth = 20.0;
  Vec x0_given, y0_given;

  nlohmann::json to_json() const;
  static InitSpec from_json(const nlohmann::json& j);
};

struct EnsembleConfig {
  int num_paths = 1;
  std::uint64_t base_seed = 0;
  SmAgdaParams params;
  std::vector<std::string> metrics = {"m_kappa"};
  Retention retention = Retention::kMetricsOnly;
  InitSpec init;
  int parallelism = 0;  // 0 = all hardware threads
};

struct PathSummary {
  std::uint64_t path = 0;
  bool diverged = false;
  std::int64_t diverged_at = -1;
  double x_t = 0.0;  // (1/T) sum_t of the stationarity metric
  std::vector<double> final_metrics;
};

struct EnsembleStats {
  std::int64_t iterations = 0;
  std::vector<std::string> metric_names;
  // [metric][t] across completed paths; min <= mean <= max per entry.
  std::vector<std::vector<double>> mean, min, max;
  std::vector<double> terminal_xt;  // per completed path, in path order
  std::string xt_metric;
  std::vector<PathSummary> paths;
  int num_divergent = 0;
  Vec shared_x0, shared_y0;  // filled for shared-init ensembles
};

// Resolves metric names against a problem; throws ConfigError for metrics the
// problem cannot support. `tau2` parameterizes the projected-gradient
// residual of the constrained metric and is echoed in run metadata.
std::vector<MetricSpec> build_metrics(const MinimaxProblem& problem,
                                      const std::vector<std::string>& names, double tau2);

// Runs num_paths independent seeded paths (stream (base_seed, path)) and
// aggregates per-iteration mean/min/max. Paths execute concurrently; the
// reduction always merges in path order, so aggregates do not depend on
// scheduling. Divergent paths are recorded and skipped by the aggregates.
EnsembleStats run_ensemble(const MinimaxProblem& problem, const EnsembleConfig& config);

// Initial point of one path under the policy (exposed for reproducing a
// specific path outside an ensemble).
std::pair<Vec, Vec> draw_init(const MinimaxProblem& problem, const InitSpec& init,
                              std::uint64_t base_seed, std::uint64_t path_index);

}  // namespace smagda

#endif  // SMAGDA_CORE_ENSEMBLE_HPP
