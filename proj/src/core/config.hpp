#ifndef SMAGDA_CORE_CONFIG_HPP
#define SMAGDA_CORE_CONFIG_HPP

#include "core/bounds.hpp"
#include "core/dro.hpp"
#include "core/ensemble.hpp"
#include "core/ncpl_game.hpp"

#include <json.hpp>

#include <memory>
#include <string>

namespace smagda {

nlohmann::json load_json_file(const std::string& path);

// Field access with named-field errors ("config error: missing field 'x'").
const nlohmann::json& require_field(const nlohmann::json& j, const std::string& name);

// Problem construction from a {"type": "ncpl"|"dro", ...} block. A DRO block
// carries either {"path": ...} or {"synthetic": {d1, d2, nnz_per_row, seed}};
// a synthetic dataset is written next to `scratch_dir` as a LIBSVM file and
// read back through the parser. The ingest report, when requested, describes
// whichever file was loaded.
std::unique_ptr<MinimaxProblem> make_problem(const nlohmann::json& spec,
                                             const std::string& scratch_dir,
                                             IngestReport* ingest = nullptr);

// Params block: {"mode": "explicit", tau1, tau2, beta, p} or
// {"mode": "theory", alpha, tau1 | delta0_b0} using the problem's constants
// and noise (the Coro-style stepsize rule when delta0_b0 is given).
SmAgdaParams params_from_json(const nlohmann::json& j, const MinimaxProblem& problem,
                              std::int64_t iterations);

struct EnsembleCommandConfig {
  nlohmann::json problem_spec;
  EnsembleConfig ensemble;
};

EnsembleCommandConfig parse_ensemble_config(const nlohmann::json& j,
                                            const MinimaxProblem& problem);

// Mesh block: {"step": m} (uniform on [m, 1-m]) or {"values": [...]}.
std::vector<double> mesh_from_json(const nlohmann::json& j);

}  // namespace smagda

#endif  // SMAGDA_CORE_CONFIG_HPP
