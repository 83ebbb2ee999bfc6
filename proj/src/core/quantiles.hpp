#ifndef SMAGDA_CORE_QUANTILES_HPP
#define SMAGDA_CORE_QUANTILES_HPP

#include "core/bounds.hpp"

#include <vector>

namespace smagda {

// Linear-interpolation quantile estimator: at probability q the value is
// interpolated between order statistics placed at (k-1)/(n-1). Needs at
// least two samples and q in [0, 1].
std::vector<double> empirical_quantiles(const std::vector<double>& samples,
                                        const std::vector<double>& probabilities);

struct QuantileComparison {
  std::vector<double> qbar;
  std::vector<double> empirical;            // empirical (1-qbar)-quantile of X_T
  std::vector<double> theoretical;          // Q_{qbar,T}
  std::vector<double> theoretical_scaled;   // affine-mapped onto the empirical range
  std::vector<bool> dominated;              // empirical <= theoretical, unscaled
  bool all_dominated = false;

  nlohmann::json summary_json() const;
};

// Bound orientation: the event "metric average <= Q_{qbar,T}" holds with
// probability >= 1-qbar, so Q_{qbar,T} must sit at or above the empirical
// (1-qbar)-quantile of the path averages. The affine-scaled curve maps the
// theoretical range onto the empirical range for plotting only; verdicts use
// unscaled values.
QuantileComparison compare_quantiles(const std::vector<double>& xt_samples,
                                     const QuantileCurve& bound);

}  // namespace smagda

#endif  // SMAGDA_CORE_QUANTILES_HPP
