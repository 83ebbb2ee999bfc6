#ifndef SMAGDA_CORE_NCPL_GAME_HPP
#define SMAGDA_CORE_NCPL_GAME_HPP

#include "core/problem.hpp"

#include <json.hpp>

namespace smagda {

// Construction parameters of the synthetic nonconvex-PL game
//
//   min_x max_y  m1 [ |x|^2 + sin(3 sqrt(|x|^2 + 1)) ] + x'Ky
//                - m2 [ |y|^2 + 3 sin^2(|y|) ]
//
// with K = 10*Ktilde/|Ktilde|, Ktilde = (M + M')/2 and M a seeded Gaussian
// matrix with entry variance sigma_sq. The stochastic oracle adds
// N(0, delta_sq I) to each exact gradient.
struct NcplGameConfig {
  int d1 = 30;
  int d2 = 30;
  double m1 = 1.0;
  double m2 = 1.0;
  double sigma_sq = 1.0;
  double delta_sq = 1.0;
  std::uint64_t matrix_seed = 0;

  static NcplGameConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

class NcplGame final : public MinimaxProblem {
 public:
  // Builds K and the derived constants mu = 2 m2, ell = max{12 m1, 8 m2, |K|}.
  // The symmetrizing construction needs d1 == d2.
  static NcplGame make(const NcplGameConfig& config);

  int dim_x() const override { return config_.d1; }
  int dim_y() const override { return config_.d2; }
  const ProblemConstants& constants() const override { return constants_; }
  const NoiseSpec& noise() const override { return noise_; }

  double value(const Vec& x, const Vec& y) const override;
  Vec grad_x(const Vec& x, const Vec& y) const override;
  Vec grad_y(const Vec& x, const Vec& y) const override;
  Vec grad_x_stoch(const Vec& x, const Vec& y, const rng::Stream& stream,
                   std::uint64_t step) const override;
  Vec grad_y_stoch(const Vec& x, const Vec& y, const rng::Stream& stream,
                   std::uint64_t step) const override;

  // Squared distance to the saddle point, which sits at the origin.
  double metric_distance_sq(const Vec& x, const Vec& y) const;

  const Mat& interaction() const { return k_; }
  const NcplGameConfig& config() const { return config_; }
  Vec saddle_x() const { return Vec::Zero(config_.d1); }
  Vec saddle_y() const { return Vec::Zero(config_.d2); }

  // Replaces the derived constants (experimentation hook). Emits a warning on
  // stderr since the stepsize policy depends on them.
  void override_constants(const ProblemConstants& constants);

 private:
  NcplGame() = default;

  NcplGameConfig config_;
  Mat k_;
  ProblemConstants constants_;
  NoiseSpec noise_;
};

}  // namespace smagda

#endif  // SMAGDA_CORE_NCPL_GAME_HPP
