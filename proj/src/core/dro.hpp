#ifndef SMAGDA_CORE_DRO_HPP
#define SMAGDA_CORE_DRO_HPP

#include "core/libsvm.hpp"
#include "core/problem.hpp"

#include <memory>
#include <utility>

namespace smagda {

// Exact Euclidean projection onto the probability simplex {y >= 0, 1'y = 1},
// by sort-and-threshold. Prefix sums use compensated summation so the
// membership invariant holds to ~1e-15 even for very long vectors.
Vec project_simplex(const Vec& v);

struct DroOptions {
  double lambda1 = 1e-4;  // primal regularization weight
  double lambda2 = 1.0;   // dual regularization weight
  double omega = 10.0;    // nonconvex regularizer shape
  int batch_size = 128;

  static DroOptions from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

// Distributionally robust nonconvex logistic regression
//
//   min_x max_{y in simplex}  (1/d2) sum_j y_j log(1 + exp(-b_j a_j'x))
//                             + lambda1 sum_i omega x_i^2 / (1 + omega x_i^2)
//                             - (lambda2 d2 / 2) |y - u|^2,   u = (1/d2) 1.
//
// Stochastic oracles subsample the loss term with uniform without-replacement
// minibatches; the dual regularizer part stays exact (it is cheap and
// deterministic). The curvature constants are tuned, not certified.
class DroProblem final : public MinimaxProblem {
 public:
  DroProblem(Dataset dataset, DroOptions options);

  int dim_x() const override { return dataset_.dim_features; }
  int dim_y() const override { return static_cast<int>(dataset_.num_samples()); }
  const ProblemConstants& constants() const override { return constants_; }
  const NoiseSpec& noise() const override { return noise_; }

  double value(const Vec& x, const Vec& y) const override;
  Vec grad_x(const Vec& x, const Vec& y) const override;
  Vec grad_y(const Vec& x, const Vec& y) const override;
  Vec grad_x_stoch(const Vec& x, const Vec& y, const rng::Stream& stream,
                   std::uint64_t step) const override;
  Vec grad_y_stoch(const Vec& x, const Vec& y, const rng::Stream& stream,
                   std::uint64_t step) const override;

  // Both stochastic blocks at the same point (independent batches).
  std::pair<Vec, Vec> grad_stoch(const Vec& x, const Vec& y, const rng::Stream& stream,
                                 std::uint64_t step) const;

  bool has_dual_projection() const override { return true; }
  Vec project_dual(const Vec& v) const override { return project_simplex(v); }

  // |grad_x|^2 + |r|^2 with r the projected-gradient residual
  // (P(y + tau2 grad_y) - y)/tau2 of the dual ascent step.
  double constrained_stationarity(const Vec& x, const Vec& y, double tau2) const;

  Vec uniform_dual() const;  // u = (1/d2) 1

  const Dataset& dataset() const { return dataset_; }
  const DroOptions& options() const { return options_; }

 private:
  double loss_margin(std::int64_t j, const Vec& x) const;  // b_j a_j'x

  Dataset dataset_;
  DroOptions options_;
  ProblemConstants constants_;
  NoiseSpec noise_;
};

}  // namespace smagda

#endif  // SMAGDA_CORE_DRO_HPP
