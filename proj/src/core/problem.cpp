#include "core/problem.hpp"

#include <algorithm>
#include <cmath>

namespace smagda {

void ProblemConstants::validate() const {
  if (!(lipschitz_ell > 0.0) || !std::isfinite(lipschitz_ell))
    throw ConfigError("ProblemConstants: lipschitz_ell must be positive");
  if (!(pl_mu > 0.0) || !std::isfinite(pl_mu))
    throw ConfigError("ProblemConstants: pl_mu must be positive");
  if (kappa() < 1.0)
    throw ConfigError("ProblemConstants: kappa = ell/mu must be >= 1");
}

void NoiseSpec::validate() const {
  if (delta_x_sq < 0.0 || delta_y_sq < 0.0 || !std::isfinite(delta_x_sq) ||
      !std::isfinite(delta_y_sq))
    throw ConfigError("NoiseSpec: proxy variances must be finite and >= 0");
}

Vec MinimaxProblem::project_dual(const Vec&) const {
  throw std::logic_error("project_dual: problem has no dual projection");
}

void MinimaxProblem::check_point(const Vec& x, const Vec& y) const {
  if (x.size() != dim_x() || y.size() != dim_y())
    throw std::invalid_argument("oracle: dimension mismatch");
  if (!x.allFinite() || !y.allFinite())
    throw std::invalid_argument("oracle: non-finite input");
}

GradientCheckReport check_gradients(const MinimaxProblem& problem, int num_points,
                                    double fd_step, double tolerance, std::uint64_t seed,
                                    double box) {
  if (num_points < 1) throw std::invalid_argument("check_gradients: num_points >= 1");
  if (!(fd_step > 0.0)) throw std::invalid_argument("check_gradients: fd_step > 0");

  GradientCheckReport report;
  report.num_points = num_points;
  report.fd_step = fd_step;
  report.tolerance = tolerance;

  const int d1 = problem.dim_x();
  const int d2 = problem.dim_y();
  rng::Stream stream(seed);
  Vec x(d1), y(d2);

  for (int pt = 0; pt < num_points; ++pt) {
    const auto step = static_cast<std::uint64_t>(pt);
    for (int i = 0; i < d1; ++i)
      x[i] = box * (2.0 * stream.uniform(rng::Tag::kSearch, step, static_cast<std::uint64_t>(i)) - 1.0);
    for (int i = 0; i < d2; ++i)
      y[i] = box * (2.0 * stream.uniform(rng::Tag::kSearch, step,
                                         static_cast<std::uint64_t>(d1 + i)) - 1.0);

    const Vec gx = problem.grad_x(x, y);
    const Vec gy = problem.grad_y(x, y);
    const double denom_x = std::max(1.0, gx.norm());
    const double denom_y = std::max(1.0, gy.norm());

    Vec fd_x(d1), fd_y(d2);
    Vec xp = x, xm = x, yp = y, ym = y;
    for (int i = 0; i < d1; ++i) {
      xp[i] = x[i] + fd_step;
      xm[i] = x[i] - fd_step;
      fd_x[i] = (problem.value(xp, y) - problem.value(xm, y)) / (2.0 * fd_step);
      xp[i] = x[i];
      xm[i] = x[i];
    }
    for (int i = 0; i < d2; ++i) {
      yp[i] = y[i] + fd_step;
      ym[i] = y[i] - fd_step;
      fd_y[i] = (problem.value(x, yp) - problem.value(x, ym)) / (2.0 * fd_step);
      yp[i] = y[i];
      ym[i] = y[i];
    }

    report.max_rel_error_x = std::max(report.max_rel_error_x, (fd_x - gx).norm() / denom_x);
    report.max_rel_error_y = std::max(report.max_rel_error_y, (fd_y - gy).norm() / denom_y);
  }

  report.pass = report.max_rel_error_x <= tolerance && report.max_rel_error_y <= tolerance;
  return report;
}

}  // namespace smagda
