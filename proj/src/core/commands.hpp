#ifndef SMAGDA_CORE_COMMANDS_HPP
#define SMAGDA_CORE_COMMANDS_HPP

#include <string>

namespace smagda::commands {

// Soft result of a command that completed and wrote its outputs.
enum class Outcome {
  kOk,
  kDivergence,   // some sample paths diverged (outputs list them)
  kCheckFailed,  // a verification verdict came out negative
};

// Each command reads a JSON config, writes its outputs plus a manifest with
// SHA-256 hashes into out_dir, and throws ConfigError (bad config / input
// files) or std::exception subclasses on hard failures.
Outcome run_ensemble_cmd(const std::string& config_path, const std::string& out_dir);
Outcome bound_cmd(const std::string& config_path, const std::string& out_dir);
Outcome compare_cmd(const std::string& ensemble_dir, const std::string& bound_config_path,
                    const std::string& out_dir);
Outcome dro_cmd(const std::string& config_path, const std::string& out_dir);
Outcome check_concentration_cmd(const std::string& config_path, const std::string& out_dir);
Outcome ingest_cmd(const std::string& libsvm_path, const std::string& out_dir);

}  // namespace smagda::commands

#endif  // SMAGDA_CORE_COMMANDS_HPP
