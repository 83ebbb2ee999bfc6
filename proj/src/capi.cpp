#include "smagda/smagda.h"

#include "core/bounds.hpp"
#include "core/commands.hpp"
#include "core/config.hpp"
#include "core/ensemble.hpp"
#include "core/optimizer.hpp"
#include "core/version.hpp"

#include <cstring>
#include <memory>
#include <string>

namespace {

thread_local std::string g_last_error;

using smagda::ConfigError;
using smagda::DivergenceError;
using smagda::UnsupportedError;
using smagda::Vec;

smagda_status fail(smagda_status status, const char* what) {
  g_last_error = what != nullptr ? what : "unknown error";
  return status;
}

template <typename Fn>
smagda_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    return fail(SMAGDA_ERR_CONFIG, e.what());
  } catch (const UnsupportedError& e) {
    return fail(SMAGDA_ERR_UNSUPPORTED, e.what());
  } catch (const DivergenceError& e) {
    return fail(SMAGDA_ERR_DIVERGENCE, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(SMAGDA_ERR_INVALID_ARG, e.what());
  } catch (const std::exception& e) {
    return fail(SMAGDA_ERR_RUNTIME, e.what());
  } catch (...) {
    return fail(SMAGDA_ERR_RUNTIME, "unknown error");
  }
}

smagda_status outcome_to_status(smagda::commands::Outcome outcome) {
  switch (outcome) {
    case smagda::commands::Outcome::kOk:
      return SMAGDA_OK;
    case smagda::commands::Outcome::kDivergence:
      return fail(SMAGDA_ERR_DIVERGENCE, "some sample paths diverged (see outputs)");
    case smagda::commands::Outcome::kCheckFailed:
      return fail(SMAGDA_ERR_CHECK_FAILED, "verification verdict failed (see outputs)");
  }
  return SMAGDA_ERR_RUNTIME;
}

smagda::SmAgdaParams to_core(const smagda_params& p) {
  smagda::SmAgdaParams out;
  out.tau1 = p.tau1;
  out.tau2 = p.tau2;
  out.beta = p.beta;
  out.p = p.p;
  out.alpha = p.alpha;
  out.iterations = p.iterations;
  out.theory_mode = p.theory_mode != 0;
  return out;
}

#define SMAGDA_REQUIRE(cond)                                            \
  do {                                                                  \
    if (!(cond)) return fail(SMAGDA_ERR_INVALID_ARG, "null argument: " #cond); \
  } while (0)

}  // namespace

struct smagda_problem {
  std::unique_ptr<smagda::MinimaxProblem> impl;
};

struct smagda_run {
  smagda::Trajectory trajectory;
  const smagda::MinimaxProblem* problem;
};

namespace {

smagda_status eval_vec(const smagda_problem* problem, const double* x, const double* y,
                       double* out, int out_dim,
                       Vec (smagda::MinimaxProblem::*fn)(const Vec&, const Vec&) const) {
  return guarded([&] {
    const auto& p = *problem->impl;
    const Vec xv = Eigen::Map<const Vec>(x, p.dim_x());
    const Vec yv = Eigen::Map<const Vec>(y, p.dim_y());
    const Vec g = (p.*fn)(xv, yv);
    std::memcpy(out, g.data(), sizeof(double) * static_cast<std::size_t>(out_dim));
    return SMAGDA_OK;
  });
}

}  // namespace

extern "C" {

const char* smagda_status_name(smagda_status status) {
  switch (status) {
    case SMAGDA_OK: return "ok";
    case SMAGDA_ERR_INVALID_ARG: return "invalid-argument";
    case SMAGDA_ERR_CONFIG: return "config-error";
    case SMAGDA_ERR_DIVERGENCE: return "divergence";
    case SMAGDA_ERR_CHECK_FAILED: return "check-failed";
    case SMAGDA_ERR_UNSUPPORTED: return "unsupported";
    case SMAGDA_ERR_RUNTIME: return "runtime-error";
  }
  return "unknown";
}

const char* smagda_last_error(void) { return g_last_error.c_str(); }

void smagda_version(int* major, int* minor, int* patch) {
  if (major) *major = smagda::kVersionMajor;
  if (minor) *minor = smagda::kVersionMinor;
  if (patch) *patch = smagda::kVersionPatch;
}

smagda_status smagda_problem_create(const char* json_spec, smagda_problem** out) {
  SMAGDA_REQUIRE(json_spec != nullptr);
  SMAGDA_REQUIRE(out != nullptr);
  return guarded([&] {
    nlohmann::json spec;
    try {
      spec = nlohmann::json::parse(json_spec);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(std::string("config error: invalid JSON: ") + e.what());
    }
    auto problem = smagda::make_problem(spec, ".");
    *out = new smagda_problem{std::move(problem)};
    return SMAGDA_OK;
  });
}

smagda_status smagda_problem_create_dro(const char* libsvm_path, const char* json_options,
                                        smagda_problem** out) {
  SMAGDA_REQUIRE(libsvm_path != nullptr);
  SMAGDA_REQUIRE(out != nullptr);
  return guarded([&] {
    smagda::DroOptions options;
    if (json_options != nullptr) {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(json_options);
      } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config error: invalid JSON: ") + e.what());
      }
      options = smagda::DroOptions::from_json(j);
    }
    smagda::Dataset data = smagda::parse_libsvm(libsvm_path);
    *out = new smagda_problem{
        std::make_unique<smagda::DroProblem>(std::move(data), options)};
    return SMAGDA_OK;
  });
}

void smagda_problem_destroy(smagda_problem* problem) { delete problem; }

smagda_status smagda_problem_dims(const smagda_problem* problem, int32_t* dim_x,
                                  int32_t* dim_y) {
  SMAGDA_REQUIRE(problem != nullptr);
  if (dim_x) *dim_x = problem->impl->dim_x();
  if (dim_y) *dim_y = problem->impl->dim_y();
  return SMAGDA_OK;
}

smagda_status smagda_problem_constants(const smagda_problem* problem, double* ell,
                                       double* mu, double* kappa) {
  SMAGDA_REQUIRE(problem != nullptr);
  const auto& c = problem->impl->constants();
  if (ell) *ell = c.lipschitz_ell;
  if (mu) *mu = c.pl_mu;
  if (kappa) *kappa = c.kappa();
  return SMAGDA_OK;
}

smagda_status smagda_problem_value(const smagda_problem* problem, const double* x,
                                   const double* y, double* out) {
  SMAGDA_REQUIRE(problem != nullptr);
  SMAGDA_REQUIRE(x != nullptr);
  SMAGDA_REQUIRE(y != nullptr);
  SMAGDA_REQUIRE(out != nullptr);
  return guarded([&] {
    const auto& p = *problem->impl;
    *out = p.value(Eigen::Map<const Vec>(x, p.dim_x()), Eigen::Map<const Vec>(y, p.dim_y()));
    return SMAGDA_OK;
  });
}

smagda_status smagda_problem_grad_x(const smagda_problem* problem, const double* x,
                                    const double* y, double* out) {
  SMAGDA_REQUIRE(problem != nullptr);
  SMAGDA_REQUIRE(x != nullptr);
  SMAGDA_REQUIRE(y != nullptr);
  SMAGDA_REQUIRE(out != nullptr);
  return eval_vec(problem, x, y, out, problem->impl->dim_x(),
                  &smagda::MinimaxProblem::grad_x);
}

smagda_status smagda_problem_grad_y(const smagda_problem* problem, const double* x,
                                    const double* y, double* out) {
  SMAGDA_REQUIRE(problem != nullptr);
  SMAGDA_REQUIRE(x != nullptr);
  SMAGDA_REQUIRE(y != nullptr);
  SMAGDA_REQUIRE(out != nullptr);
  return eval_vec(problem, x, y, out, problem->impl->dim_y(),
                  &smagda::MinimaxProblem::grad_y);
}

smagda_status smagda_problem_grad_x_stoch(const smagda_problem* problem, const double* x,
                                          const double* y, uint64_t base_seed,
                                          uint64_t path_index, uint64_t step, double* out) {
  SMAGDA_REQUIRE(problem != nullptr);
  SMAGDA_REQUIRE(x != nullptr);
  SMAGDA_REQUIRE(y != nullptr);
  SMAGDA_REQUIRE(out != nullptr);
  return guarded([&] {
    const auto& p = *problem->impl;
    const smagda::rng::Stream stream(base_seed, path_index);
    const Vec g = p.grad_x_stoch(Eigen::Map<const Vec>(x, p.dim_x()),
                                 Eigen::Map<const Vec>(y, p.dim_y()), stream, step);
    std::memcpy(out, g.data(), sizeof(double) * static_cast<std::size_t>(p.dim_x()));
    return SMAGDA_OK;
  });
}

smagda_status smagda_problem_grad_y_stoch(const smagda_problem* problem, const double* x,
                                          const double* y, uint64_t base_seed,
                                          uint64_t path_index, uint64_t step, double* out) {
  SMAGDA_REQUIRE(problem != nullptr);
  SMAGDA_REQUIRE(x != nullptr);
  SMAGDA_REQUIRE(y != nullptr);
  SMAGDA_REQUIRE(out != nullptr);
  return guarded([&] {
    const auto& p = *problem->impl;
    const smagda::rng::Stream stream(base_seed, path_index);
    const Vec g = p.grad_y_stoch(Eigen::Map<const Vec>(x, p.dim_x()),
                                 Eigen::Map<const Vec>(y, p.dim_y()), stream, step);
    std::memcpy(out, g.data(), sizeof(double) * static_cast<std::size_t>(p.dim_y()));
    return SMAGDA_OK;
  });
}

smagda_status smagda_params_derive(double ell, double mu, int64_t iterations,
                                   double delta0_b0, double noise_var_sum, double alpha,
                                   smagda_params* out) {
  SMAGDA_REQUIRE(out != nullptr);
  return guarded([&] {
    smagda::ProblemConstants constants;
    constants.lipschitz_ell = ell;
    constants.pl_mu = mu;
    const auto p =
        smagda::derive_params(constants, iterations, delta0_b0, noise_var_sum, alpha);
    *out = {p.tau1, p.tau2, p.beta, p.p, p.alpha, p.iterations, p.theory_mode ? 1 : 0};
    return SMAGDA_OK;
  });
}

smagda_status smagda_run_path(const smagda_problem* problem, const smagda_params* params,
                              uint64_t base_seed, uint64_t path_index, const double* x0,
                              const double* y0, const double* z0, int retain_iterates,
                              smagda_run** out) {
  SMAGDA_REQUIRE(problem != nullptr);
  SMAGDA_REQUIRE(params != nullptr);
  SMAGDA_REQUIRE(x0 != nullptr);
  SMAGDA_REQUIRE(y0 != nullptr);
  SMAGDA_REQUIRE(out != nullptr);
  return guarded([&] {
    const auto& p = *problem->impl;
    const Vec x0v = Eigen::Map<const Vec>(x0, p.dim_x());
    const Vec y0v = Eigen::Map<const Vec>(y0, p.dim_y());
    Vec z0v;
    if (z0 != nullptr) z0v = Eigen::Map<const Vec>(z0, p.dim_x());

    const auto metric = p.has_dual_projection()
                            ? smagda::metric_constrained_stationarity(params->tau2)
                            : smagda::metric_m_kappa();
    const smagda::MetricSpec metrics[] = {metric};
    auto trajectory = smagda::run(
        p, to_core(*params), base_seed, path_index, x0v, y0v, z0 ? &z0v : nullptr,
        std::span<const smagda::MetricSpec>(metrics, 1),
        retain_iterates != 0 ? smagda::Retention::kFullIterates
                             : smagda::Retention::kMetricsOnly);
    *out = new smagda_run{std::move(trajectory), &p};
    return SMAGDA_OK;
  });
}

void smagda_run_destroy(smagda_run* run) { delete run; }

smagda_status smagda_run_diverged(const smagda_run* run, int* diverged,
                                  int64_t* at_iteration) {
  SMAGDA_REQUIRE(run != nullptr);
  if (diverged) *diverged = run->trajectory.divergence.diverged ? 1 : 0;
  if (at_iteration) *at_iteration = run->trajectory.divergence.at_iteration;
  return SMAGDA_OK;
}

smagda_status smagda_run_metric_series(const smagda_run* run, const double** data,
                                       int64_t* length) {
  SMAGDA_REQUIRE(run != nullptr);
  SMAGDA_REQUIRE(data != nullptr);
  SMAGDA_REQUIRE(length != nullptr);
  const auto& series = run->trajectory.metrics.at(0);
  *data = series.data();
  *length = static_cast<int64_t>(series.size());
  return SMAGDA_OK;
}

smagda_status smagda_run_metric_average(const smagda_run* run, double* out) {
  SMAGDA_REQUIRE(run != nullptr);
  SMAGDA_REQUIRE(out != nullptr);
  *out = run->trajectory.metric_average(0);
  return SMAGDA_OK;
}

smagda_status smagda_run_final_state(const smagda_run* run, double* x, double* y, double* z) {
  SMAGDA_REQUIRE(run != nullptr);
  const auto& t = run->trajectory;
  if (x) std::memcpy(x, t.x_final.data(), sizeof(double) * t.x_final.size());
  if (y) std::memcpy(y, t.y_final.data(), sizeof(double) * t.y_final.size());
  if (z) std::memcpy(z, t.z_final.data(), sizeof(double) * t.z_final.size());
  return SMAGDA_OK;
}

smagda_status smagda_run_select_output(const smagda_run* run, uint64_t selection_seed,
                                       double* x, double* y, int64_t* index) {
  SMAGDA_REQUIRE(run != nullptr);
  SMAGDA_REQUIRE(x != nullptr);
  SMAGDA_REQUIRE(y != nullptr);
  return guarded([&] {
    const auto selected = smagda::select_output(run->trajectory, selection_seed);
    std::memcpy(x, selected.x.data(), sizeof(double) * selected.x.size());
    std::memcpy(y, selected.y.data(), sizeof(double) * selected.y.size());
    if (index) *index = selected.index;
    return SMAGDA_OK;
  });
}

smagda_status smagda_sigma_c_sq(double tau1, double delta_x_sq, double delta_y_sq,
                                double* out) {
  SMAGDA_REQUIRE(out != nullptr);
  return guarded([&] {
    *out = smagda::sigma_c_sq(tau1, delta_x_sq, delta_y_sq);
    return SMAGDA_OK;
  });
}

smagda_status smagda_sigma_d_sq(double ell, double tau1, double tau2, double delta_x_sq,
                                double delta_y_sq, double* out) {
  SMAGDA_REQUIRE(out != nullptr);
  return guarded([&] {
    *out = smagda::sigma_d_sq(ell, tau1, tau2, delta_x_sq, delta_y_sq);
    return SMAGDA_OK;
  });
}

smagda_status smagda_quantile_bound(double ell, double mu, double tau1, double tau2,
                                    double alpha, double delta_x_sq, double delta_y_sq,
                                    double delta0_b0, int64_t iterations, double qbar,
                                    double* out) {
  SMAGDA_REQUIRE(out != nullptr);
  return guarded([&] {
    smagda::BoundInputs inputs;
    inputs.ell = ell;
    inputs.mu = mu;
    inputs.kappa = ell / mu;
    inputs.tau1 = tau1;
    inputs.tau2 = tau2;
    inputs.alpha = alpha;
    inputs.delta_x_sq = delta_x_sq;
    inputs.delta_y_sq = delta_y_sq;
    inputs.delta0_b0 = delta0_b0;
    inputs.iterations = iterations;
    inputs.qbar_mesh = {qbar};
    *out = smagda::q_bound(inputs).q.at(0);
    return SMAGDA_OK;
  });
}

smagda_status smagda_estimate_delta0_b0(const smagda_problem* problem, const double* x0,
                                        const double* y0, const double* z0,
                                        double p_smoothing, const char* search_json,
                                        double* out) {
  SMAGDA_REQUIRE(problem != nullptr);
  SMAGDA_REQUIRE(x0 != nullptr);
  SMAGDA_REQUIRE(y0 != nullptr);
  SMAGDA_REQUIRE(out != nullptr);
  return guarded([&] {
    const auto& p = *problem->impl;
    smagda::SearchSpec spec;
    if (search_json != nullptr) {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(search_json);
      } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config error: invalid JSON: ") + e.what());
      }
      spec = smagda::SearchSpec::from_json(j);
    }
    const Vec x0v = Eigen::Map<const Vec>(x0, p.dim_x());
    const Vec y0v = Eigen::Map<const Vec>(y0, p.dim_y());
    const Vec z0v = z0 != nullptr ? Eigen::Map<const Vec>(z0, p.dim_x()) : x0v;
    *out = smagda::estimate_delta0_b0(p, x0v, y0v, z0v, p_smoothing, spec).total;
    return SMAGDA_OK;
  });
}

smagda_status smagda_cmd_run_ensemble(const char* config_path, const char* out_dir) {
  SMAGDA_REQUIRE(config_path != nullptr);
  SMAGDA_REQUIRE(out_dir != nullptr);
  return guarded([&] {
    return outcome_to_status(smagda::commands::run_ensemble_cmd(config_path, out_dir));
  });
}

smagda_status smagda_cmd_bound(const char* config_path, const char* out_dir) {
  SMAGDA_REQUIRE(config_path != nullptr);
  SMAGDA_REQUIRE(out_dir != nullptr);
  return guarded(
      [&] { return outcome_to_status(smagda::commands::bound_cmd(config_path, out_dir)); });
}

smagda_status smagda_cmd_compare(const char* ensemble_dir, const char* bound_config_path,
                                 const char* out_dir) {
  SMAGDA_REQUIRE(ensemble_dir != nullptr);
  SMAGDA_REQUIRE(bound_config_path != nullptr);
  SMAGDA_REQUIRE(out_dir != nullptr);
  return guarded([&] {
    return outcome_to_status(
        smagda::commands::compare_cmd(ensemble_dir, bound_config_path, out_dir));
  });
}

smagda_status smagda_cmd_dro(const char* config_path, const char* out_dir) {
  SMAGDA_REQUIRE(config_path != nullptr);
  SMAGDA_REQUIRE(out_dir != nullptr);
  return guarded(
      [&] { return outcome_to_status(smagda::commands::dro_cmd(config_path, out_dir)); });
}

smagda_status smagda_cmd_check_concentration(const char* config_path, const char* out_dir) {
  SMAGDA_REQUIRE(config_path != nullptr);
  SMAGDA_REQUIRE(out_dir != nullptr);
  return guarded([&] {
    return outcome_to_status(
        smagda::commands::check_concentration_cmd(config_path, out_dir));
  });
}

smagda_status smagda_cmd_ingest(const char* libsvm_path, const char* out_dir) {
  SMAGDA_REQUIRE(libsvm_path != nullptr);
  SMAGDA_REQUIRE(out_dir != nullptr);
  return guarded(
      [&] { return outcome_to_status(smagda::commands::ingest_cmd(libsvm_path, out_dir)); });
}

}  // extern "C"
