#ifndef SMAGDA_CORE_COMMON_HPP
#define SMAGDA_CORE_COMMON_HPP

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace smagda {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Bad or inconsistent configuration / input files. Maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// An operation the theory does not cover (e.g. quantile bounds for
// constrained dual domains).
class UnsupportedError : public std::runtime_error {
 public:
  explicit UnsupportedError(const std::string& what) : std::runtime_error(what) {}
};

// A sample path blew up. Carries the iteration at which the guard tripped.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, std::int64_t iteration)
      : std::runtime_error(what), iteration(iteration) {}
  std::int64_t iteration;
};

}  // namespace smagda

#endif  // SMAGDA_CORE_COMMON_HPP
