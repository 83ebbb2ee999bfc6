#include "core/quantiles.hpp"

#include <algorithm>
#include <cmath>

namespace smagda {

std::vector<double> empirical_quantiles(const std::vector<double>& samples,
                                        const std::vector<double>& probabilities) {
  if (samples.empty()) throw std::invalid_argument("empirical_quantiles: no samples");
  if (samples.size() < 2)
    throw std::invalid_argument("empirical_quantiles: need at least two samples");

  std::vector<double> sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();

  std::vector<double> out;
  out.reserve(probabilities.size());
  for (double q : probabilities) {
    if (!(q >= 0.0) || !(q <= 1.0))
      throw std::invalid_argument("empirical_quantiles: probability outside [0, 1]");
    const double pos = q * static_cast<double>(n - 1);
    const auto k = static_cast<std::size_t>(pos);
    if (k + 1 >= n) {
      out.push_back(sorted.back());
    } else {
      const double frac = pos - static_cast<double>(k);
      out.push_back(sorted[k] + frac * (sorted[k + 1] - sorted[k]));
    }
  }
  return out;
}

nlohmann::json QuantileComparison::summary_json() const {
  std::size_t violations = 0;
  for (bool d : dominated)
    if (!d) ++violations;
  return {{"mesh_points", qbar.size()},
          {"dominated_everywhere", all_dominated},
          {"violations", violations}};
}

QuantileComparison compare_quantiles(const std::vector<double>& xt_samples,
                                     const QuantileCurve& bound) {
  QuantileComparison cmp;
  cmp.qbar = bound.qbar;

  std::vector<double> levels;
  levels.reserve(bound.qbar.size());
  for (double qb : bound.qbar) levels.push_back(1.0 - qb);
  cmp.empirical = empirical_quantiles(xt_samples, levels);
  cmp.theoretical = bound.q;

  const auto [emin_it, emax_it] = std::minmax_element(cmp.empirical.begin(), cmp.empirical.end());
  const auto [tmin_it, tmax_it] =
      std::minmax_element(cmp.theoretical.begin(), cmp.theoretical.end());
  const double emin = *emin_it, emax = *emax_it;
  const double tmin = *tmin_it, tmax = *tmax_it;
  const double tspan = tmax - tmin;

  cmp.theoretical_scaled.reserve(cmp.theoretical.size());
  for (double t : cmp.theoretical)
    cmp.theoretical_scaled.push_back(
        tspan > 0.0 ? emin + (t - tmin) / tspan * (emax - emin) : emin);

  cmp.dominated.reserve(cmp.qbar.size());
  cmp.all_dominated = true;
  for (std::size_t i = 0; i < cmp.qbar.size(); ++i) {
    const bool ok = cmp.empirical[i] <= cmp.theoretical[i];
    cmp.dominated.push_back(ok);
    if (!ok) cmp.all_dominated = false;
  }
  return cmp;
}

}  // namespace smagda
