// smagda command-line front end. Built entirely on the shared library's C API.

#include <smagda/smagda.h>

#include <CLI11.hpp>

#include <cstdio>
#include <string>

namespace {

int status_to_exit_code(smagda_status status) {
  switch (status) {
    case SMAGDA_OK:
      return 0;
    case SMAGDA_ERR_CONFIG:
    case SMAGDA_ERR_INVALID_ARG:
      return 2;
    case SMAGDA_ERR_DIVERGENCE:
      return 3;
    case SMAGDA_ERR_CHECK_FAILED:
      return 4;
    default:
      return 1;
  }
}

int finish(smagda_status status) {
  if (status != SMAGDA_OK)
    std::fprintf(stderr, "smagda: %s: %s\n", smagda_status_name(status),
                 smagda_last_error());
  return status_to_exit_code(status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stochastic minimax optimization toolkit (sm-AGDA)"};
  app.require_subcommand(1);

  int vmajor = 0, vminor = 0, vpatch = 0;
  smagda_version(&vmajor, &vminor, &vpatch);
  app.set_version_flag("--version", std::to_string(vmajor) + "." + std::to_string(vminor) +
                                        "." + std::to_string(vpatch));

  std::string config, out_dir = "smagda-out", ensemble_dir, path;

  auto* run_ensemble = app.add_subcommand("run-ensemble", "run a seeded sample-path ensemble");
  run_ensemble->add_option("config", config, "JSON config")->required();
  run_ensemble->add_option("-o,--out", out_dir, "output directory");

  auto* bound = app.add_subcommand("bound", "evaluate the quantile bound over a mesh");
  bound->add_option("config", config, "JSON config")->required();
  bound->add_option("-o,--out", out_dir, "output directory");

  auto* compare = app.add_subcommand(
      "compare", "compare empirical quantiles of an ensemble against the bound");
  compare->add_option("ensemble_dir", ensemble_dir, "run-ensemble output directory")
      ->required();
  compare->add_option("bound_config", config, "JSON bound config")->required();
  compare->add_option("-o,--out", out_dir, "output directory");

  auto* dro = app.add_subcommand("dro", "tune and run the robust logistic-regression problem");
  dro->add_option("config", config, "JSON config")->required();
  dro->add_option("-o,--out", out_dir, "output directory");

  auto* check = app.add_subcommand("check-concentration",
                                   "Monte Carlo check of the concentration inequality");
  check->add_option("config", config, "JSON config")->required();
  check->add_option("-o,--out", out_dir, "output directory");

  auto* ingest = app.add_subcommand("ingest", "parse a LIBSVM file and report its shape");
  ingest->add_option("path", path, "LIBSVM text file")->required();
  ingest->add_option("-o,--out", out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  if (run_ensemble->parsed())
    return finish(smagda_cmd_run_ensemble(config.c_str(), out_dir.c_str()));
  if (bound->parsed()) return finish(smagda_cmd_bound(config.c_str(), out_dir.c_str()));
  if (compare->parsed())
    return finish(smagda_cmd_compare(ensemble_dir.c_str(), config.c_str(), out_dir.c_str()));
  if (dro->parsed()) return finish(smagda_cmd_dro(config.c_str(), out_dir.c_str()));
  if (check->parsed())
    return finish(smagda_cmd_check_concentration(config.c_str(), out_dir.c_str()));
  if (ingest->parsed()) return finish(smagda_cmd_ingest(path.c_str(), out_dir.c_str()));
  return 2;
}
