#include "core/config.hpp"

#include "core/csv.hpp"

#include <filesystem>

namespace smagda {

nlohmann::json load_json_file(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config error: " + path + " is not valid JSON: " + e.what());
  }
}

const nlohmann::json& require_field(const nlohmann::json& j, const std::string& name) {
  if (!j.contains(name)) throw ConfigError("config error: missing field '" + name + "'");
  return j.at(name);
}

std::unique_ptr<MinimaxProblem> make_problem(const nlohmann::json& spec,
                                             const std::string& scratch_dir,
                                             IngestReport* ingest) {
  const std::string type = require_field(spec, "type").get<std::string>();
  if (type == "ncpl") {
    try {
      return std::make_unique<NcplGame>(NcplGame::make(NcplGameConfig::from_json(spec)));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("config error in problem block: ") + e.what());
    }
  }
  if (type == "dro") {
    std::string path;
    bool synthetic = false;
    if (spec.contains("path")) {
      path = spec.at("path").get<std::string>();
    } else if (spec.contains("synthetic")) {
      const auto& syn = spec.at("synthetic");
      const Dataset data = make_synthetic_dataset(
          require_field(syn, "d1").get<std::int32_t>(),
          require_field(syn, "d2").get<std::int64_t>(), syn.value("nnz_per_row", 14),
          syn.value("seed", std::uint64_t{7}));
      std::filesystem::create_directories(scratch_dir);
      path = (std::filesystem::path(scratch_dir) / "synthetic.libsvm").string();
      write_libsvm(data, path);
      synthetic = true;
    } else {
      throw ConfigError("config error: dro problem needs 'path' or 'synthetic'");
    }
    Dataset data = parse_libsvm(path, ingest);
    // Keep generated-file reports location-independent so re-runs into
    // different directories stay byte-identical.
    if (ingest != nullptr && synthetic) ingest->path = "synthetic.libsvm";
    DroOptions options = spec.contains("options") ? DroOptions::from_json(spec.at("options"))
                                                  : DroOptions{};
    return std::make_unique<DroProblem>(std::move(data), options);
  }
  throw ConfigError("config error: unknown problem type '" + type + "'");
}

SmAgdaParams params_from_json(const nlohmann::json& j, const MinimaxProblem& problem,
                              std::int64_t iterations) {
  const std::string mode = j.value("mode", "theory");
  if (mode == "explicit") {
    SmAgdaParams p;
    p.tau1 = require_field(j, "tau1").get<double>();
    p.tau2 = require_field(j, "tau2").get<double>();
    p.beta = require_field(j, "beta").get<double>();
    p.p = require_field(j, "p").get<double>();
    p.alpha = j.value("alpha", 0.0);
    p.iterations = iterations;
    p.theory_mode = false;
    p.validate();
    return p;
  }
  if (mode == "theory") {
    const double alpha = require_field(j, "alpha").get<double>();
    const auto& constants = problem.constants();
    if (j.contains("tau1")) {
      SmAgdaParams p;
      p.tau1 = j.at("tau1").get<double>();
      p.tau2 = p.tau1 / 48.0;
      p.alpha = alpha;
      p.beta = alpha * constants.pl_mu * p.tau2;
      p.p = 2.0 * constants.lipschitz_ell;
      p.iterations = iterations;
      p.theory_mode = true;
      p.validate(&constants);
      return p;
    }
    if (j.contains("delta0_b0"))
      return derive_params(constants, iterations, j.at("delta0_b0").get<double>(),
                            problem.noise().sum(), alpha);
    throw ConfigError("config error: theory params need 'tau1' or 'delta0_b0'");
  }
  throw ConfigError("config error: params mode must be 'theory' or 'explicit'");
}

EnsembleCommandConfig parse_ensemble_config(const nlohmann::json& j,
                                            const MinimaxProblem& problem) {
  EnsembleCommandConfig cfg;
  cfg.problem_spec = require_field(j, "problem");
  const auto& run = require_field(j, "run");

  cfg.ensemble.num_paths = require_field(run, "num_paths").get<int>();
  if (cfg.ensemble.num_paths < 1)
    throw ConfigError("config error: invalid value for 'run.num_paths': must be >= 1");
  const auto iterations = require_field(run, "iterations").get<std::int64_t>();
  if (iterations < 1)
    throw ConfigError("config error: invalid value for 'run.iterations': must be >= 1");
  cfg.ensemble.base_seed = run.value("base_seed", std::uint64_t{0});
  cfg.ensemble.params = params_from_json(require_field(j, "params"), problem, iterations);
  if (run.contains("metrics"))
    cfg.ensemble.metrics = run.at("metrics").get<std::vector<std::string>>();
  const std::string retention = run.value("retention", "metrics");
  if (retention == "metrics") cfg.ensemble.retention = Retention::kMetricsOnly;
  else if (retention == "full") cfg.ensemble.retention = Retention::kFullIterates;
  else throw ConfigError("config error: retention must be 'metrics' or 'full'");
  if (run.contains("init")) cfg.ensemble.init = InitSpec::from_json(run.at("init"));
  cfg.ensemble.parallelism = run.value("parallelism", 0);
  return cfg;
}

std::vector<double> mesh_from_json(const nlohmann::json& j) {
  if (j.contains("values")) {
    auto values = j.at("values").get<std::vector<double>>();
    if (values.empty()) throw ConfigError("config error: empty mesh 'values'");
    return values;
  }
  return default_qbar_mesh(j.value("step", 2e-4));
}

}  // namespace smagda
