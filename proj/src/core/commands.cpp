#include "core/commands.hpp"

#include "core/concentration.hpp"
#include "core/config.hpp"
#include "core/csv.hpp"
#include "core/grid_tune.hpp"
#include "core/quantiles.hpp"
#include "core/version.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <thread>

namespace smagda::commands {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string out_path(const std::string& out_dir, const char* name) {
  return (fs::path(out_dir) / name).string();
}

void finalize_manifest(Manifest& manifest, const Timer& timer, const std::string& out_dir) {
  // A generated dataset is an output too.
  const std::string synthetic = out_path(out_dir, "synthetic.libsvm");
  if (fs::exists(synthetic)) manifest.add_output(synthetic);
  manifest.set("smagda_version", kVersionString);
  manifest.set("wall_time_seconds", timer.seconds());
  manifest.write(out_path(out_dir, "manifest.json"));
}

std::vector<double> json_to_vector(const json& j) { return j.get<std::vector<double>>(); }

json vector_to_json(const Vec& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double interdecile_width(const std::vector<double>& v) {
  const auto q = empirical_quantiles(v, {0.1, 0.9});
  return q[1] - q[0];
}

}  // namespace

Outcome run_ensemble_cmd(const std::string& config_path, const std::string& out_dir) {
  Timer timer;
  const json config = load_json_file(config_path);
  fs::create_directories(out_dir);

  IngestReport ingest;
  const auto problem = make_problem(require_field(config, "problem"), out_dir, &ingest);
  const auto cfg = parse_ensemble_config(config, *problem);
  const EnsembleStats stats = run_ensemble(*problem, cfg.ensemble);

  {
    CsvWriter csv(out_path(out_dir, "ensemble_iterations.csv"),
                  {"t", "metric", "mean", "min", "max"});
    for (std::size_t m = 0; m < stats.metric_names.size(); ++m)
      for (std::int64_t t = 0; t < stats.iterations; ++t) {
        const auto ti = static_cast<std::size_t>(t);
        csv.cell(t).cell(stats.metric_names[m]).cell(stats.mean[m][ti])
            .cell(stats.min[m][ti]).cell(stats.max[m][ti]);
        csv.end_row();
      }
  }
  {
    CsvWriter csv(out_path(out_dir, "ensemble_terminal.csv"), {"path", "x_t"});
    for (const auto& p : stats.paths) {
      if (p.diverged) continue;
      csv.cell(static_cast<std::int64_t>(p.path)).cell(p.x_t);
      csv.end_row();
    }
  }

  json divergent = json::array();
  for (const auto& p : stats.paths)
    if (p.diverged) divergent.push_back({{"path", p.path}, {"at_iteration", p.diverged_at}});

  const auto& constants = problem->constants();
  json summary{{"problem", cfg.problem_spec},
               {"params", cfg.ensemble.params.to_json()},
               {"metrics", stats.metric_names},
               {"xt_metric", stats.xt_metric},
               {"metric_tau2", cfg.ensemble.params.tau2},
               {"num_paths", cfg.ensemble.num_paths},
               {"base_seed", cfg.ensemble.base_seed},
               {"init", cfg.ensemble.init.to_json()},
               {"divergent_paths", divergent},
               {"constants",
                {{"ell", constants.lipschitz_ell},
                 {"mu", constants.pl_mu},
                 {"kappa", constants.kappa()}}},
               {"noise",
                {{"delta_x_sq", problem->noise().delta_x_sq},
                 {"delta_y_sq", problem->noise().delta_y_sq}}},
               {"constrained_dual", problem->has_dual_projection()}};
  if (stats.shared_x0.size() > 0) {
    summary["shared_x0"] = vector_to_json(stats.shared_x0);
    summary["shared_y0"] = vector_to_json(stats.shared_y0);
  }
  write_text_file(out_path(out_dir, "ensemble_summary.json"), summary.dump(2) + "\n");

  Manifest manifest("run-ensemble", config);
  manifest.add_output(out_path(out_dir, "ensemble_iterations.csv"));
  manifest.add_output(out_path(out_dir, "ensemble_terminal.csv"));
  manifest.add_output(out_path(out_dir, "ensemble_summary.json"));
  finalize_manifest(manifest, timer, out_dir);
  return stats.num_divergent > 0 ? Outcome::kDivergence : Outcome::kOk;
}

Outcome bound_cmd(const std::string& config_path, const std::string& out_dir) {
  Timer timer;
  const json config = load_json_file(config_path);
  fs::create_directories(out_dir);

  BoundInputs inputs = BoundInputs::from_json(require_field(config, "inputs"));
  inputs.qbar_mesh = config.contains("mesh") ? mesh_from_json(config.at("mesh"))
                                             : default_qbar_mesh();
  const QuantileCurve curve = q_bound(inputs);

  {
    CsvWriter csv(out_path(out_dir, "quantile_bound.csv"), {"qbar", "Q"});
    for (std::size_t i = 0; i < curve.qbar.size(); ++i) {
      csv.cell(curve.qbar[i]).cell(curve.q[i]);
      csv.end_row();
    }
  }
  json sidecar = inputs.to_json();
  sidecar["r1"] = curve.r1;
  sidecar["r2"] = curve.r2;
  sidecar["r3"] = curve.r3;
  sidecar["r3_from_sigma_d"] = curve.r3_from_sigma_d;
  write_text_file(out_path(out_dir, "bound_inputs.json"), sidecar.dump(2) + "\n");

  Manifest manifest("bound", config);
  manifest.add_output(out_path(out_dir, "quantile_bound.csv"));
  manifest.add_output(out_path(out_dir, "bound_inputs.json"));
  finalize_manifest(manifest, timer, out_dir);
  return Outcome::kOk;
}

namespace {

// X_T samples from a previous run-ensemble output directory.
std::vector<double> read_terminal_xt(const std::string& ensemble_dir) {
  const std::string text = read_text_file(
      (fs::path(ensemble_dir) / "ensemble_terminal.csv").string());
  std::vector<double> xt;
  std::size_t pos = text.find('\n');  // skip header
  while (pos != std::string::npos && pos + 1 < text.size()) {
    const std::size_t eol = text.find('\n', pos + 1);
    const std::string line = text.substr(pos + 1, eol - pos - 1);
    const std::size_t comma = line.find(',');
    if (comma != std::string::npos) xt.push_back(std::stod(line.substr(comma + 1)));
    pos = eol;
  }
  return xt;
}

void check_field(const json& explicit_inputs, const char* name, double expected) {
  if (!explicit_inputs.contains(name)) return;
  const double got = explicit_inputs.at(name).get<double>();
  if (std::abs(got - expected) > 1e-12 * std::max(std::abs(expected), 1.0))
    throw ConfigError(std::string("bound config mismatch on field '") + name +
                      "': ensemble has " + format_double(expected) + ", config has " +
                      format_double(got));
}

}  // namespace

Outcome compare_cmd(const std::string& ensemble_dir, const std::string& bound_config_path,
                    const std::string& out_dir) {
  Timer timer;
  const json config = load_json_file(bound_config_path);
  const json summary =
      load_json_file((fs::path(ensemble_dir) / "ensemble_summary.json").string());
  fs::create_directories(out_dir);

  if (summary.value("constrained_dual", false))
    throw UnsupportedError("compare: the quantile bound does not cover constrained duals");

  const json params = require_field(summary, "params");
  const json constants = require_field(summary, "constants");
  const json noise = require_field(summary, "noise");

  BoundInputs inputs;
  inputs.ell = constants.at("ell").get<double>();
  inputs.mu = constants.at("mu").get<double>();
  inputs.kappa = constants.at("kappa").get<double>();
  inputs.tau1 = params.at("tau1").get<double>();
  inputs.tau2 = params.at("tau2").get<double>();
  inputs.alpha = params.at("alpha").get<double>();
  inputs.delta_x_sq = noise.at("delta_x_sq").get<double>();
  inputs.delta_y_sq = noise.at("delta_y_sq").get<double>();
  inputs.iterations = params.at("iterations").get<std::int64_t>();

  // Any explicitly configured field must agree with the ensemble, field by field.
  if (config.contains("inputs")) {
    const json& explicit_inputs = config.at("inputs");
    check_field(explicit_inputs, "ell", inputs.ell);
    check_field(explicit_inputs, "mu", inputs.mu);
    check_field(explicit_inputs, "kappa", inputs.kappa);
    check_field(explicit_inputs, "tau1", inputs.tau1);
    check_field(explicit_inputs, "tau2", inputs.tau2);
    check_field(explicit_inputs, "alpha", inputs.alpha);
    check_field(explicit_inputs, "delta_x_sq", inputs.delta_x_sq);
    check_field(explicit_inputs, "delta_y_sq", inputs.delta_y_sq);
    check_field(explicit_inputs, "iterations", static_cast<double>(inputs.iterations));
  }

  json estimate_echo;
  const json& d0 = require_field(config, "delta0_b0");
  if (d0.is_number()) {
    inputs.delta0_b0 = d0.get<double>();
  } else if (d0.is_object() && d0.contains("estimate")) {
    if (!summary.contains("shared_x0"))
      throw ConfigError(
          "compare: delta0_b0 estimation needs a shared-init ensemble (no shared_x0 in "
          "summary)");
    const auto problem = make_problem(require_field(summary, "problem"), out_dir);
    const auto x0v = json_to_vector(summary.at("shared_x0"));
    const auto y0v = json_to_vector(summary.at("shared_y0"));
    const Vec x0 = Eigen::Map<const Vec>(x0v.data(), static_cast<Eigen::Index>(x0v.size()));
    const Vec y0 = Eigen::Map<const Vec>(y0v.data(), static_cast<Eigen::Index>(y0v.size()));
    const SearchSpec spec = SearchSpec::from_json(d0.at("estimate"));
    const Delta0B0Estimate est = estimate_delta0_b0(*problem, x0, y0, x0,
                                                    params.at("p").get<double>(), spec);
    inputs.delta0_b0 = est.total;
    estimate_echo = est.to_json();
  } else {
    throw ConfigError("config error: delta0_b0 must be a number or {\"estimate\": {...}}");
  }

  inputs.qbar_mesh = config.contains("mesh") ? mesh_from_json(config.at("mesh"))
                                             : default_qbar_mesh();

  const std::vector<double> xt = read_terminal_xt(ensemble_dir);
  const QuantileCurve curve = q_bound(inputs);
  const QuantileComparison cmp = compare_quantiles(xt, curve);

  {
    CsvWriter csv(out_path(out_dir, "comparison.csv"),
                  {"q", "empirical", "theoretical", "theoretical_scaled", "dominated"});
    for (std::size_t i = 0; i < cmp.qbar.size(); ++i) {
      csv.cell(cmp.qbar[i]).cell(cmp.empirical[i]).cell(cmp.theoretical[i])
          .cell(cmp.theoretical_scaled[i]).cell(std::int64_t{cmp.dominated[i] ? 1 : 0});
      csv.end_row();
    }
  }
  json cmp_summary = cmp.summary_json();
  cmp_summary["bound_inputs"] = inputs.to_json();
  cmp_summary["num_samples"] = xt.size();
  if (!estimate_echo.is_null()) cmp_summary["delta0_b0_estimate"] = estimate_echo;
  write_text_file(out_path(out_dir, "comparison_summary.json"), cmp_summary.dump(2) + "\n");

  Manifest manifest("compare", config);
  manifest.set("ensemble_dir", ensemble_dir);
  manifest.add_output(out_path(out_dir, "comparison.csv"));
  manifest.add_output(out_path(out_dir, "comparison_summary.json"));
  finalize_manifest(manifest, timer, out_dir);
  return cmp.all_dominated ? Outcome::kOk : Outcome::kCheckFailed;
}

namespace {

// Constrained-stationarity series at epoch boundaries (0..epochs) of one run.
std::vector<double> dro_epoch_series(const DroProblem& problem, const SmAgdaParams& params,
                                     const InitSpec& init, std::uint64_t base_seed,
                                     std::uint64_t path, int epochs,
                                     std::int64_t iterations_per_epoch) {
  auto [x0, y0] = draw_init(problem, init, base_seed, path);
  rng::Stream stream(base_seed, path);
  IterateState state{std::move(x0), std::move(y0), Vec(), 0};
  state.z = state.x;
  std::vector<double> series;
  series.reserve(static_cast<std::size_t>(epochs) + 1);
  series.push_back(problem.constrained_stationarity(state.x, state.y, params.tau2));
  for (int e = 0; e < epochs; ++e) {
    for (std::int64_t i = 0; i < iterations_per_epoch; ++i) {
      state = step(problem, state, params, stream);
      if (!state.x.allFinite() || !state.y.allFinite() ||
          state.x.cwiseAbs().maxCoeff() > 1e12)
        throw DivergenceError("dro run diverged", state.t);
    }
    series.push_back(problem.constrained_stationarity(state.x, state.y, params.tau2));
  }
  return series;
}

// x0 = 0, y0 = uniform weights unless the config says otherwise.
InitSpec dro_default_init(const json& run_block) {
  if (run_block.contains("init")) return InitSpec::from_json(run_block.at("init"));
  InitSpec init;
  init.x0_draw = InitSpec::Draw::kZeros;
  init.y0_draw = InitSpec::Draw::kZeros;  // projected onto the simplex
  return init;
}

}  // namespace

Outcome dro_cmd(const std::string& config_path, const std::string& out_dir) {
  Timer timer;
  const json config = load_json_file(config_path);
  fs::create_directories(out_dir);

  IngestReport ingest;
  const auto problem_ptr = make_problem(require_field(config, "problem"), out_dir, &ingest);
  const auto* problem = dynamic_cast<const DroProblem*>(problem_ptr.get());
  if (problem == nullptr) throw ConfigError("dro command needs a problem of type 'dro'");
  write_text_file(out_path(out_dir, "dro_ingest.json"), ingest.to_json().dump(2) + "\n");

  const json& tune = require_field(config, "tune");
  const DroGrids grids = tune.contains("grids") ? DroGrids::from_json(tune.at("grids"))
                                                : DroGrids{};
  const GridTuneReport tuned = grid_tune_dro(
      *problem, grids, tune.value("paths", 3), tune.value("epochs", 2),
      tune.value("base_seed", std::uint64_t{11}), tune.value("parallelism", 0));

  {
    CsvWriter csv(out_path(out_dir, "tune_ranking.csv"),
                  {"tau1", "tau2", "beta", "p", "median_final_metric", "divergent_paths"});
    for (const auto& cell : tuned.ranking) {
      csv.cell(cell.tau1).cell(cell.tau2).cell(cell.beta).cell(cell.p)
          .cell(cell.median_final_metric).cell(std::int64_t{cell.divergent_paths});
      csv.end_row();
    }
  }

  const json& run_block = require_field(config, "run");
  const int runs = run_block.value("runs", 20);
  const int epochs = run_block.value("epochs", 20);
  const auto base_seed = run_block.value("base_seed", std::uint64_t{17});
  const InitSpec init = dro_default_init(run_block);
  const std::int64_t ipe = dro_iterations_per_epoch(*problem);

  SmAgdaParams params;
  params.tau1 = tuned.winner.tau1;
  params.tau2 = tuned.winner.tau2;
  params.beta = tuned.winner.beta;
  params.p = tuned.winner.p;
  params.iterations = ipe * epochs;

  std::vector<std::vector<double>> series(static_cast<std::size_t>(runs));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(runs));
  std::atomic<int> next{0};
  int threads = run_block.value("parallelism", 0);
  if (threads <= 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, runs);
  std::vector<std::thread> workers;
  for (int w = 0; w < threads; ++w)
    workers.emplace_back([&] {
      for (int r = next.fetch_add(1); r < runs; r = next.fetch_add(1)) {
        try {
          series[static_cast<std::size_t>(r)] =
              dro_epoch_series(*problem, params, init, base_seed,
                               static_cast<std::uint64_t>(r), epochs, ipe);
        } catch (...) {
          errors[static_cast<std::size_t>(r)] = std::current_exception();
        }
      }
    });
  for (auto& w : workers) w.join();

  int divergent = 0;
  for (const auto& e : errors) {
    if (!e) continue;
    try {
      std::rethrow_exception(e);
    } catch (const DivergenceError&) {
      ++divergent;
    }
  }

  {
    CsvWriter csv(out_path(out_dir, "dro_runs.csv"), {"run", "epoch", "metric"});
    for (int r = 0; r < runs; ++r) {
      const auto& s = series[static_cast<std::size_t>(r)];
      for (std::size_t e = 0; e < s.size(); ++e) {
        csv.cell(std::int64_t{r}).cell(static_cast<std::int64_t>(e)).cell(s[e]);
        csv.end_row();
      }
    }
  }

  std::vector<double> at_epoch1, at_final;
  for (const auto& s : series) {
    if (s.size() < 2) continue;
    at_epoch1.push_back(std::log10(s[1]));
    at_final.push_back(std::log10(s.back()));
  }
  json report{{"winner", tuned.winner.to_json()},
              {"runs", runs},
              {"epochs", epochs},
              {"iterations_per_epoch", ipe},
              {"divergent_runs", divergent}};
  if (!at_epoch1.empty()) {
    report["median_log10_epoch1"] = median_of(at_epoch1);
    report["median_log10_final"] = median_of(at_final);
    report["interdecile_log10_epoch1"] = interdecile_width(at_epoch1);
    report["interdecile_log10_final"] = interdecile_width(at_final);
  }
  report["tune"] = tuned.to_json();
  write_text_file(out_path(out_dir, "dro_report.json"), report.dump(2) + "\n");

  Manifest manifest("dro", config);
  manifest.add_output(out_path(out_dir, "dro_ingest.json"));
  manifest.add_output(out_path(out_dir, "tune_ranking.csv"));
  manifest.add_output(out_path(out_dir, "dro_runs.csv"));
  manifest.add_output(out_path(out_dir, "dro_report.json"));
  finalize_manifest(manifest, timer, out_dir);
  return divergent > 0 ? Outcome::kDivergence : Outcome::kOk;
}

Outcome check_concentration_cmd(const std::string& config_path, const std::string& out_dir) {
  Timer timer;
  const json config = load_json_file(config_path);
  fs::create_directories(out_dir);

  const GeneratorSpec gen = config.contains("generator")
                                ? GeneratorSpec::from_json(config.at("generator"))
                                : GeneratorSpec{};
  const json bound = config.value("bound", json::object());
  const double bound_sigma_c = bound.value("sigma_c", gen.sigma_c);
  const double bound_sigma_d = bound.value("sigma_d", gen.sigma_d);

  const ConcentrationReport report = verify_concentration(
      gen, bound_sigma_c, bound_sigma_d, config.value("tau1", 0.1),
      config.value("T", std::int64_t{100}), config.value("qbar", 0.1),
      config.value("trials", std::int64_t{10000}), config.value("seed", std::uint64_t{0}));

  json doc = report.to_json();
  doc["generator"] = gen.to_json();
  doc["bound_sigma_c"] = bound_sigma_c;
  doc["bound_sigma_d"] = bound_sigma_d;
  write_text_file(out_path(out_dir, "concentration_report.json"), doc.dump(2) + "\n");

  Manifest manifest("check-concentration", config);
  manifest.add_output(out_path(out_dir, "concentration_report.json"));
  finalize_manifest(manifest, timer, out_dir);
  return report.pass ? Outcome::kOk : Outcome::kCheckFailed;
}

Outcome ingest_cmd(const std::string& libsvm_path, const std::string& out_dir) {
  Timer timer;
  fs::create_directories(out_dir);
  IngestReport report;
  parse_libsvm(libsvm_path, &report);
  write_text_file(out_path(out_dir, "ingestion_report.json"), report.to_json().dump(2) + "\n");

  Manifest manifest("ingest", json{{"path", libsvm_path}});
  manifest.add_output(out_path(out_dir, "ingestion_report.json"));
  finalize_manifest(manifest, timer, out_dir);
  return Outcome::kOk;
}

}  // namespace smagda::commands
