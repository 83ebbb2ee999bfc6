#ifndef SMAGDA_CORE_CONCENTRATION_HPP
#define SMAGDA_CORE_CONCENTRATION_HPP

#include <json.hpp>

#include <cstdint>

namespace smagda {

// Synthetic processes (A_t, B_t, C_t, D_t) for the Monte Carlo check of the
// concentration inequality
//
//   Prob( (tau1/2) sum_{t<T} B_t <= (A_0 - A_T) + tau1 sigma_D^2 T
//         + 2 tau1 max{2 sigma_C^2, sigma_D^2} log(1/qbar) ) >= 1 - qbar
//
// under: (i) B_t >= 0, (ii) C_{t+1} | F_t sub-Gaussian with proxy
// sigma_C^2 B_t, (iii) E[exp(lambda D_{t+1}) | F_t] <= exp(lambda sigma_D^2)
// for lambda in [0, 1/sigma_D^2], (iv) the descent recursion
// (A_{t+1}-A_t)/tau1 <= -B_t + C_{t+1} + D_{t+1}.
//
// The default generator takes B_t = 1, C_{t+1} = sigma_C sqrt(2 B_t) N(0,1),
// D_{t+1} = sigma_D^2 (1 - min(Exp(1), cap)) and builds A by the recursion
// with equality. The zero-noise generator sets C = D = 0.
struct GeneratorSpec {
  enum class Kind { kDefault, kZeroNoise };
  Kind kind = Kind::kDefault;
  double sigma_c = 1.0;  // process scale used by the generator
  double sigma_d = 1.0;
  double a0 = 0.0;
  double exp_cap = 10.0;

  static GeneratorSpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct ConcentrationReport {
  std::int64_t trials = 0;
  std::int64_t violations = 0;
  double frequency = 0.0;
  double qbar = 0.0;
  double threshold = 0.0;  // qbar + 3 sqrt(qbar (1-qbar) / trials)
  bool pass = false;
  bool self_check_pass = false;

  nlohmann::json to_json() const;
};

// Estimates the violation frequency of the bound event over num_trials
// independent trials of T steps. bound_sigma_c / bound_sigma_d are the
// constants plugged into the bound; moment self-checks verify that the
// generator satisfies (ii) and (iii) against those constants (a generator
// whose processes are too heavy for the claimed constants is rejected).
ConcentrationReport verify_concentration(const GeneratorSpec& gen, double bound_sigma_c,
                                         double bound_sigma_d, double tau1, std::int64_t T,
                                         double qbar, std::int64_t num_trials,
                                         std::uint64_t seed = 0);

}  // namespace smagda

#endif  // SMAGDA_CORE_CONCENTRATION_HPP
