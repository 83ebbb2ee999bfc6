#ifndef SMAGDA_CORE_PROBLEM_HPP
#define SMAGDA_CORE_PROBLEM_HPP

#include "core/common.hpp"
#include "core/rng.hpp"

#include <cstdint>
#include <string>

namespace smagda {

// Smoothness / curvature constants of a minimax problem.
struct ProblemConstants {
  double lipschitz_ell = 0.0;  // gradient Lipschitz constant
  double pl_mu = 0.0;          // PL constant of the dual block
  bool certified = true;       // false when the constants are tuned, not derived

  double kappa() const { return lipschitz_ell / pl_mu; }
  void validate() const;  // ell > 0, mu > 0, kappa >= 1
};

// Sub-Gaussian proxy variances of the stochastic gradient noise. Zero means
// the stochastic oracle is exact.
struct NoiseSpec {
  double delta_x_sq = 0.0;
  double delta_y_sq = 0.0;

  double sum() const { return delta_x_sq + delta_y_sq; }
  void validate() const;
};

// Oracle bundle for min_x max_y f(x, y). Implementations are immutable after
// construction and safe to share across concurrently running sample paths;
// all oracle calls are pure given (inputs, stream key).
class MinimaxProblem {
 public:
  virtual ~MinimaxProblem() = default;

  virtual int dim_x() const = 0;
  virtual int dim_y() const = 0;
  virtual const ProblemConstants& constants() const = 0;
  virtual const NoiseSpec& noise() const = 0;

  virtual double value(const Vec& x, const Vec& y) const = 0;
  virtual Vec grad_x(const Vec& x, const Vec& y) const = 0;
  virtual Vec grad_y(const Vec& x, const Vec& y) const = 0;

  // Conditionally unbiased stochastic gradients. `step` keys the draw, so a
  // repeated call with the same (stream, step) reproduces the same output.
  virtual Vec grad_x_stoch(const Vec& x, const Vec& y, const rng::Stream& stream,
                           std::uint64_t step) const = 0;
  virtual Vec grad_y_stoch(const Vec& x, const Vec& y, const rng::Stream& stream,
                           std::uint64_t step) const = 0;

  virtual bool has_dual_projection() const { return false; }
  virtual Vec project_dual(const Vec& v) const;  // throws unless overridden

 protected:
  // Dimension / finiteness preconditions shared by all oracles.
  void check_point(const Vec& x, const Vec& y) const;
};

struct GradientCheckReport {
  int num_points = 0;
  double fd_step = 0.0;
  double tolerance = 0.0;
  double max_rel_error_x = 0.0;
  double max_rel_error_y = 0.0;
  bool pass = false;
};

// Central-difference check of both exact gradients at random points drawn
// from [-box, box]^d. Relative error uses denominator max(1, |analytic|).
// Failures are reported, never thrown.
GradientCheckReport check_gradients(const MinimaxProblem& problem, int num_points,
                                    double fd_step, double tolerance,
                                    std::uint64_t seed = 0, double box = 3.0);

}  // namespace smagda

#endif  // SMAGDA_CORE_PROBLEM_HPP
