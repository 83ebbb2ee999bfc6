#include "core/commands.hpp"

#include "core/config.hpp"
#include "core/csv.hpp"
#include "core/sha256.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <algorithm>
#include <filesystem>

using namespace smagda;
using commands::Outcome;
using testing::TempDir;
using testing::write_file;

namespace {

namespace fs = std::filesystem;

const char* kSmallEnsembleConfig = R"({
  "problem": {"type": "ncpl", "d": 5, "m1": 1.0, "m2": 1.0, "sigma_sq": 1.0,
              "delta_sq": 1.0, "matrix_seed": 42},
  "params": {"mode": "theory", "alpha": 0.000625, "tau1": 0.027777777777777776},
  "run": {"iterations": 120, "num_paths": 12, "base_seed": 5,
          "metrics": ["m_kappa", "distance_sq"],
          "init": {"mode": "shared", "x0": "box", "y0": "box", "box_halfwidth": 2.0}}
})";

void verify_manifest_hashes(const std::string& dir) {
  const auto manifest = load_json_file((fs::path(dir) / "manifest.json").string());
  REQUIRE(manifest.contains("outputs"));
  REQUIRE(!manifest.at("outputs").empty());
  for (const auto& entry : manifest.at("outputs")) {
    const std::string file = (fs::path(dir) / entry.at("file").get<std::string>()).string();
    CHECK(sha256_file_hex(file) == entry.at("sha256").get<std::string>());
  }
}

}  // namespace

TEST_CASE("sha256 known vectors") {
  CHECK(sha256_hex("") ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("doubles print in shortest round-trip form") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(1e-300) == "1e-300");
  CHECK(format_double(1.0 / 3.0) == "0.3333333333333333");
}

TEST_CASE("run-ensemble command writes outputs and a verifiable manifest") {
  TempDir dir("cmd_ensemble");
  const auto config = write_file(dir.file("config.json"), kSmallEnsembleConfig);
  const auto out = dir.file("out");
  CHECK(commands::run_ensemble_cmd(config, out) == Outcome::kOk);

  CHECK(fs::exists(fs::path(out) / "ensemble_iterations.csv"));
  CHECK(fs::exists(fs::path(out) / "ensemble_terminal.csv"));
  CHECK(fs::exists(fs::path(out) / "ensemble_summary.json"));
  verify_manifest_hashes(out);

  const auto summary = load_json_file((fs::path(out) / "ensemble_summary.json").string());
  CHECK(summary.at("constants").at("ell").get<double>() == 12.0);
  CHECK(summary.at("shared_x0").size() == 5);
  CHECK(summary.at("params").at("p").get<double>() == 24.0);

  // 2 metrics x 120 iterations + header.
  const auto csv = read_text_file((fs::path(out) / "ensemble_iterations.csv").string());
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2 * 120 + 1);
}

TEST_CASE("re-running a command is byte-identical") {
  TempDir dir("cmd_repro");
  const auto config = write_file(dir.file("config.json"), kSmallEnsembleConfig);
  CHECK(commands::run_ensemble_cmd(config, dir.file("a")) == Outcome::kOk);
  CHECK(commands::run_ensemble_cmd(config, dir.file("b")) == Outcome::kOk);
  for (const char* name :
       {"ensemble_iterations.csv", "ensemble_terminal.csv", "ensemble_summary.json"}) {
    const auto a = read_text_file((fs::path(dir.file("a")) / name).string());
    const auto b = read_text_file((fs::path(dir.file("b")) / name).string());
    CHECK(a == b);
  }
}

TEST_CASE("config schema violations name the field") {
  TempDir dir("cmd_badcfg");
  const auto config = write_file(dir.file("bad.json"), R"({
    "problem": {"type": "ncpl", "d": 5},
    "params": {"mode": "theory", "alpha": 0.000625, "tau1": 0.01},
    "run": {"iterations": 10, "num_paths": 0}})");
  CHECK_THROWS_WITH_AS((void)commands::run_ensemble_cmd(config, dir.file("out")),
                       doctest::Contains("num_paths"), ConfigError);

  const auto missing = write_file(dir.file("missing.json"), R"({
    "problem": {"type": "ncpl", "d": 5},
    "params": {"mode": "theory", "alpha": 0.000625, "tau1": 0.01},
    "run": {"num_paths": 2}})");
  CHECK_THROWS_WITH_AS((void)commands::run_ensemble_cmd(missing, dir.file("out")),
                       doctest::Contains("iterations"), ConfigError);

  const auto garbage = write_file(dir.file("garbage.json"), "{nope");
  CHECK_THROWS_AS((void)commands::run_ensemble_cmd(garbage, dir.file("out")), ConfigError);
}

TEST_CASE("bound command emits the curve and its sidecar") {
  TempDir dir("cmd_bound");
  const auto config = write_file(dir.file("bound.json"), R"({
    "inputs": {"ell": 12.0, "mu": 2.0, "tau1": 0.027777777777777776,
               "alpha": 0.000625, "delta_x_sq": 1.0, "delta_y_sq": 1.0,
               "delta0_b0": 12.0, "iterations": 10000},
    "mesh": {"step": 0.0002}})");
  CHECK(commands::bound_cmd(config, dir.file("out")) == Outcome::kOk);

  const auto csv = read_text_file((fs::path(dir.file("out")) / "quantile_bound.csv").string());
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4999 + 1);
  const auto sidecar =
      load_json_file((fs::path(dir.file("out")) / "bound_inputs.json").string());
  CHECK(sidecar.at("r3_from_sigma_d").get<bool>() == false);
  verify_manifest_hashes(dir.file("out"));
}

TEST_CASE("compare command validates, estimates and judges domination") {
  TempDir dir("cmd_compare");
  const auto config = write_file(dir.file("config.json"), kSmallEnsembleConfig);
  const auto ensemble_dir = dir.file("ens");
  REQUIRE(commands::run_ensemble_cmd(config, ensemble_dir) == Outcome::kOk);

  const auto bound_ok = write_file(dir.file("bound.json"), R"({
    "delta0_b0": 12.0, "mesh": {"step": 0.01}})");
  CHECK(commands::compare_cmd(ensemble_dir, bound_ok, dir.file("cmp")) == Outcome::kOk);
  const auto summary =
      load_json_file((fs::path(dir.file("cmp")) / "comparison_summary.json").string());
  CHECK(summary.at("dominated_everywhere").get<bool>());
  verify_manifest_hashes(dir.file("cmp"));

  // Estimation mode pulls the shared init out of the ensemble summary.
  const auto bound_est = write_file(dir.file("bound_est.json"), R"({
    "delta0_b0": {"estimate": {"num_samples": 64, "refine_steps": 100,
                               "outer_descent_steps": 40, "y_halfwidth": 40.0}},
    "mesh": {"step": 0.01}})");
  CHECK(commands::compare_cmd(ensemble_dir, bound_est, dir.file("cmp_est")) == Outcome::kOk);
  const auto est_summary =
      load_json_file((fs::path(dir.file("cmp_est")) / "comparison_summary.json").string());
  CHECK(est_summary.contains("delta0_b0_estimate"));
  CHECK(est_summary.at("bound_inputs").at("delta0_b0").get<double>() > 0.0);

  // A mismatched explicit field is a config error naming the field.
  const auto bound_bad = write_file(dir.file("bound_bad.json"), R"({
    "inputs": {"tau1": 0.01}, "delta0_b0": 12.0, "mesh": {"step": 0.01}})");
  CHECK_THROWS_WITH_AS(
      (void)commands::compare_cmd(ensemble_dir, bound_bad, dir.file("cmp_bad")),
      doctest::Contains("tau1"), ConfigError);
}

TEST_CASE("compare flags an undominated bound") {
  TempDir dir("cmd_undominated");
  // Zero noise makes r2 = r3 = 0; delta0_b0 = 0 collapses the bound to zero
  // while the metric averages stay positive.
  const auto config = write_file(dir.file("config.json"), R"({
    "problem": {"type": "ncpl", "d": 5, "delta_sq": 0.0, "matrix_seed": 42},
    "params": {"mode": "theory", "alpha": 0.000625, "tau1": 0.027777777777777776},
    "run": {"iterations": 40, "num_paths": 6, "base_seed": 5,
            "metrics": ["m_kappa"],
            "init": {"mode": "shared", "box_halfwidth": 2.0}}})");
  const auto ensemble_dir = dir.file("ens");
  REQUIRE(commands::run_ensemble_cmd(config, ensemble_dir) == Outcome::kOk);
  const auto bound = write_file(dir.file("bound.json"), R"({
    "delta0_b0": 0.0, "mesh": {"step": 0.05}})");
  CHECK(commands::compare_cmd(ensemble_dir, bound, dir.file("cmp")) ==
        Outcome::kCheckFailed);
}

TEST_CASE("concentration command reports and passes") {
  TempDir dir("cmd_conc");
  const auto config = write_file(dir.file("conc.json"), R"({
    "generator": {"kind": "default", "sigma_c": 1.0, "sigma_d": 1.0},
    "tau1": 0.1, "T": 50, "qbar": 0.1, "trials": 2000, "seed": 3})");
  CHECK(commands::check_concentration_cmd(config, dir.file("out")) == Outcome::kOk);
  const auto report =
      load_json_file((fs::path(dir.file("out")) / "concentration_report.json").string());
  CHECK(report.at("pass").get<bool>());
  CHECK(report.at("trials").get<int>() == 2000);
  verify_manifest_hashes(dir.file("out"));
}

TEST_CASE("ingest command reports the dataset shape") {
  TempDir dir("cmd_ingest");
  const auto data = write_file(dir.file("tiny.libsvm"), "+1 1:0.5 3:-1.2\n-1 2:1\n");
  CHECK(commands::ingest_cmd(data, dir.file("out")) == Outcome::kOk);
  const auto report =
      load_json_file((fs::path(dir.file("out")) / "ingestion_report.json").string());
  CHECK(report.at("d1").get<int>() == 3);
  CHECK(report.at("d2").get<int>() == 2);
  CHECK(report.at("nnz").get<int>() == 3);
  CHECK(report.at("label_mapping").get<std::string>() == "identity");

  CHECK_THROWS_AS((void)commands::ingest_cmd(dir.file("nope.libsvm"), dir.file("out2")),
                  ConfigError);
}

TEST_CASE("dro command runs the tuned winner and reports epoch statistics") {
  TempDir dir("cmd_dro");
  const auto config = write_file(dir.file("dro.json"), R"({
    "problem": {"type": "dro",
                "synthetic": {"d1": 12, "d2": 120, "nnz_per_row": 4, "seed": 7},
                "options": {"batch_size": 30}},
    "tune": {"grids": {"tau1": [1e-2, 1e-3], "beta": [1e-4], "p": [1.0]},
             "paths": 2, "epochs": 1, "base_seed": 11},
    "run": {"runs": 4, "epochs": 3, "base_seed": 17}})");
  CHECK(commands::dro_cmd(config, dir.file("out")) == Outcome::kOk);

  const auto report = load_json_file((fs::path(dir.file("out")) / "dro_report.json").string());
  CHECK(report.at("runs").get<int>() == 4);
  CHECK(report.at("iterations_per_epoch").get<int>() == 4);
  CHECK(report.contains("median_log10_epoch1"));
  CHECK(report.contains("interdecile_log10_final"));
  const auto ranking =
      read_text_file((fs::path(dir.file("out")) / "tune_ranking.csv").string());
  CHECK(std::count(ranking.begin(), ranking.end(), '\n') == 2 + 1);
  // 4 runs x (3 epochs + 1) rows + header.
  const auto runs = read_text_file((fs::path(dir.file("out")) / "dro_runs.csv").string());
  CHECK(std::count(runs.begin(), runs.end(), '\n') == 4 * 4 + 1);
  verify_manifest_hashes(dir.file("out"));
}
