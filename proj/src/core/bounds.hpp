#ifndef SMAGDA_CORE_BOUNDS_HPP
#define SMAGDA_CORE_BOUNDS_HPP

#include "core/problem.hpp"

#include <json.hpp>

#include <vector>

namespace smagda {

// sigma_C^2 = tau1 (240 delta_x^2 + 32 delta_y^2)
double sigma_c_sq(double tau1, double delta_x_sq, double delta_y_sq);

// sigma_D^2 = 16 ell tau1^2 delta_x^2 + 64 ell tau2^2 delta_y^2
double sigma_d_sq(double ell, double tau1, double tau2, double delta_x_sq,
                  double delta_y_sq);

struct BoundInputs {
  double ell = 0.0, mu = 0.0, kappa = 0.0;
  double tau1 = 0.0, tau2 = 0.0, alpha = 0.0;
  double delta_x_sq = 0.0, delta_y_sq = 0.0;
  double delta0_b0 = 0.0;
  std::int64_t iterations = 0;
  std::vector<double> qbar_mesh;   // strictly increasing, inside (0, 1)
  bool constrained_dual = false;

  void validate() const;
  nlohmann::json to_json() const;
  static BoundInputs from_json(const nlohmann::json& j);
};

// Uniform mesh {m, 2m, ..., 1-m}.
std::vector<double> default_qbar_mesh(double m = 2e-4);

struct QuantileCurve {
  std::vector<double> qbar;
  std::vector<double> q;    // bound value per mesh point
  BoundInputs inputs;
  double r1 = 0.0, r2 = 0.0, r3 = 0.0;
  bool r3_from_sigma_d = false;  // diagnostic: max branch taken by 2 sigma_D^2
};

// Quantile bound Q_{qbar,T} = r1 { (Delta0+b0)/T + r2 + (r3/T) log(1/qbar) }
// with r1 = (64/alpha)(kappa/tau2), r2 = sigma_D^2,
// r3 = max{4 sigma_C^2, 2 sigma_D^2}. Refuses constrained dual domains (the
// guarantee does not cover them) and mesh points at 0 or 1.
QuantileCurve q_bound(const BoundInputs& inputs);

// Search policy of the initialization-gap estimator. Random multistart
// sampling in a box plus budgeted gradient refinement by default; an aligned
// lattice ("pure grid") mode is available for small dims.
struct SearchSpec {
  double x_halfwidth = 25.0;
  double y_halfwidth = 200.0;
  int num_samples = 256;
  int refine_steps = 400;
  int outer_descent_steps = 300;
  int inner_warm_steps = 40;
  int multistarts = 4;
  std::uint64_t seed = 0;
  bool pure_grid = false;
  int grid_points_per_dim = 0;

  nlohmann::json to_json() const;
  static SearchSpec from_json(const nlohmann::json& j);
};

struct Delta0B0Estimate {
  double delta0 = 0.0;  // Phi(z0) - min_x Phi(x), searched
  double b0 = 0.0;      // 2 [ max_y fhat(x0, y; z0) - min_x fhat(x, y0; z0) ]
  double total = 0.0;
  double phi_z0 = 0.0;
  double phi_star = 0.0;
  bool boundary_warning = false;  // an inner optimum left the sampling box
  SearchSpec spec;

  nlohmann::json to_json() const;
};

// Numerical upper-bound estimate of the initialization gap Delta0 + b0 for
// fhat(x, y; z) = f(x, y) + (p/2)|x - z|^2. The result is an estimate tied to
// the recorded search spec, not a certificate.
Delta0B0Estimate estimate_delta0_b0(const MinimaxProblem& problem, const Vec& x0,
                                    const Vec& y0, const Vec& z0, double p_smoothing,
                                    const SearchSpec& spec);

}  // namespace smagda

#endif  // SMAGDA_CORE_BOUNDS_HPP
