#include "core/ensemble.hpp"

#include "core/ncpl_game.hpp"

#include <algorithm>
#include <limits>
#include <thread>

namespace smagda {

namespace {

const char* draw_name(InitSpec::Draw d) {
  switch (d) {
    case InitSpec::Draw::kUniformBox: return "box";
    case InitSpec::Draw::kZeros: return "zeros";
    case InitSpec::Draw::kGiven: return "given";
  }
  return "?";
}

InitSpec::Draw draw_from_name(const std::string& s) {
  if (s == "box") return InitSpec::Draw::kUniformBox;
  if (s == "zeros") return InitSpec::Draw::kZeros;
  if (s == "given") return InitSpec::Draw::kGiven;
  throw ConfigError("init: unknown draw '" + s + "' (expected box|zeros|given)");
}

Vec draw_block(const rng::Stream& stream, std::uint64_t step, int dim, InitSpec::Draw draw,
               double halfwidth, const Vec& given) {
  switch (draw) {
    case InitSpec::Draw::kZeros:
      return Vec::Zero(dim);
    case InitSpec::Draw::kGiven:
      if (given.size() != dim) throw ConfigError("init: given vector has wrong dimension");
      return given;
    case InitSpec::Draw::kUniformBox: {
      Vec v(dim);
      for (int i = 0; i < dim; ++i)
        v[i] = halfwidth *
               (2.0 * stream.uniform(rng::Tag::kInit, step, static_cast<std::uint64_t>(i)) - 1.0);
      return v;
    }
  }
  throw std::logic_error("init: unreachable");
}

}  // namespace

nlohmann::json InitSpec::to_json() const {
  nlohmann::json j{{"mode", mode == Mode::kShared ? "shared" : "per_path"},
                   {"x0", draw_name(x0_draw)},
                   {"y0", draw_name(y0_draw)},
                   {"box_halfwidth", box_halfwidth}};
  if (x0_draw == Draw::kGiven)
    j["x0_given"] = std::vector<double>(x0_given.data(), x0_given.data() + x0_given.size());
  if (y0_draw == Draw::kGiven)
    j["y0_given"] = std::vector<double>(y0_given.data(), y0_given.data() + y0_given.size());
  return j;
}

InitSpec InitSpec::from_json(const nlohmann::json& j) {
  InitSpec s;
  const std::string mode = j.value("mode", "shared");
  if (mode == "shared") s.mode = Mode::kShared;
  else if (mode == "per_path") s.mode = Mode::kPerPath;
  else throw ConfigError("init: unknown mode '" + mode + "' (expected shared|per_path)");
  s.x0_draw = draw_from_name(j.value("x0", "box"));
  s.y0_draw = draw_from_name(j.value("y0", "box"));
  s.box_halfwidth = j.value("box_halfwidth", 20.0);
  if (j.contains("x0_given")) {
    const auto v = j.at("x0_given").get<std::vector<double>>();
    s.x0_given = Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
  }
  if (j.contains("y0_given")) {
    const auto v = j.at("y0_given").get<std::vector<double>>();
    s.y0_given = Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
  }
  return s;
}

std::vector<MetricSpec> build_metrics(const MinimaxProblem& problem,
                                      const std::vector<std::string>& names, double tau2) {
  std::vector<MetricSpec> specs;
  specs.reserve(names.size());
  for (const auto& name : names) {
    if (name == "m_kappa") {
      specs.push_back(metric_m_kappa());
    } else if (name == "distance_sq") {
      const auto* game = dynamic_cast<const NcplGame*>(&problem);
      if (game == nullptr)
        throw ConfigError("metric 'distance_sq' needs a problem with a saddle reference");
      specs.push_back(metric_distance_sq(game->saddle_x(), game->saddle_y()));
    } else if (name == "constrained_stationarity") {
      if (!problem.has_dual_projection())
        throw ConfigError("metric 'constrained_stationarity' needs a dual projection");
      specs.push_back(metric_constrained_stationarity(tau2));
    } else {
      throw ConfigError("unknown metric '" + name + "'");
    }
  }
  return specs;
}

std::pair<Vec, Vec> draw_init(const MinimaxProblem& problem, const InitSpec& init,
                              std::uint64_t base_seed, std::uint64_t path_index) {
  const std::uint64_t path = init.mode == InitSpec::Mode::kShared ? 0 : path_index;
  rng::Stream stream(base_seed, path);
  Vec x0 = draw_block(stream, 0, problem.dim_x(), init.x0_draw, init.box_halfwidth,
                      init.x0_given);
  Vec y0 = draw_block(stream, 1, problem.dim_y(), init.y0_draw, init.box_halfwidth,
                      init.y0_given);
  if (problem.has_dual_projection()) y0 = problem.project_dual(y0);
  return {std::move(x0), std::move(y0)};
}

EnsembleStats run_ensemble(const MinimaxProblem& problem, const EnsembleConfig& config) {
  if (config.num_paths < 1) throw ConfigError("ensemble: num_paths must be >= 1");
  if (config.metrics.empty()) throw ConfigError("ensemble: need at least one metric");
  const auto metrics = build_metrics(problem, config.metrics, config.params.tau2);

  std::size_t xt_index = config.metrics.size();
  for (std::size_t i = 0; i < config.metrics.size(); ++i) {
    if (config.metrics[i] == "m_kappa" || config.metrics[i] == "constrained_stationarity") {
      xt_index = i;
      break;
    }
  }
  if (xt_index == config.metrics.size())
    throw ConfigError("ensemble: need a stationarity metric for the path averages");

  const auto T = config.params.iterations;
  EnsembleStats stats;
  stats.iterations = T;
  stats.metric_names = config.metrics;
  stats.xt_metric = config.metrics[xt_index];
  const std::size_t n_metrics = metrics.size();
  stats.mean.assign(n_metrics, std::vector<double>(static_cast<std::size_t>(T), 0.0));
  stats.min.assign(n_metrics, std::vector<double>(static_cast<std::size_t>(T),
                                                  std::numeric_limits<double>::infinity()));
  stats.max.assign(n_metrics, std::vector<double>(static_cast<std::size_t>(T),
                                                  -std::numeric_limits<double>::infinity()));
  stats.paths.resize(static_cast<std::size_t>(config.num_paths));

  if (config.init.mode == InitSpec::Mode::kShared) {
    auto [x0, y0] = draw_init(problem, config.init, config.base_seed, 0);
    stats.shared_x0 = x0;
    stats.shared_y0 = y0;
  }

  int threads = config.parallelism;
  if (threads <= 0)
    threads = std::max(1u, std::thread::hardware_concurrency());
  const int block = std::max(1, threads);

  auto run_path = [&](std::uint64_t path) {
    auto [x0, y0] = draw_init(problem, config.init, config.base_seed, path);
    return run(problem, config.params, config.base_seed, path, x0, y0, nullptr,
               std::span<const MetricSpec>(metrics), config.retention);
  };

  std::vector<Trajectory> slot(static_cast<std::size_t>(block));
  for (int start = 0; start < config.num_paths; start += block) {
    const int count = std::min(block, config.num_paths - start);
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(count));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
      workers.emplace_back([&, k, start] {
        try {
          slot[static_cast<std::size_t>(k)] = run_path(static_cast<std::uint64_t>(start + k));
        } catch (...) {
          errors[static_cast<std::size_t>(k)] = std::current_exception();
        }
      });
    }
    for (auto& w : workers) w.join();
    for (int k = 0; k < count; ++k)
      if (errors[static_cast<std::size_t>(k)])
        std::rethrow_exception(errors[static_cast<std::size_t>(k)]);

    // Merge strictly in path order.
    for (int k = 0; k < count; ++k) {
      const auto& traj = slot[static_cast<std::size_t>(k)];
      const auto path = static_cast<std::size_t>(start + k);
      auto& summary = stats.paths[path];
      summary.path = path;
      if (traj.divergence.diverged) {
        summary.diverged = true;
        summary.diverged_at = traj.divergence.at_iteration;
        ++stats.num_divergent;
        continue;
      }
      summary.x_t = traj.metric_average(xt_index);
      summary.final_metrics = traj.final_metrics;
      stats.terminal_xt.push_back(summary.x_t);
      for (std::size_t m = 0; m < n_metrics; ++m) {
        const auto& series = traj.metrics[m];
        for (std::size_t t = 0; t < series.size(); ++t) {
          stats.mean[m][t] += series[t];
          stats.min[m][t] = std::min(stats.min[m][t], series[t]);
          stats.max[m][t] = std::max(stats.max[m][t], series[t]);
        }
      }
    }
  }

  const int completed = config.num_paths - stats.num_divergent;
  if (completed > 0) {
    for (std::size_t m = 0; m < stats.mean.size(); ++m) {
      for (std::size_t t = 0; t < stats.mean[m].size(); ++t) {
        double v = stats.mean[m][t] / static_cast<double>(completed);
        // Summation rounding must not push the mean outside [min, max].
        v = std::clamp(v, stats.min[m][t], stats.max[m][t]);
        stats.mean[m][t] = v;
      }
    }
  }
  return stats;
}

}  // namespace smagda
