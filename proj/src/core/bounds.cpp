#include "core/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace smagda {

double sigma_c_sq(double tau1, double delta_x_sq, double delta_y_sq) {
  if (tau1 < 0.0 || delta_x_sq < 0.0 || delta_y_sq < 0.0)
    throw std::invalid_argument("sigma_c_sq: inputs must be >= 0");
  return tau1 * (240.0 * delta_x_sq + 32.0 * delta_y_sq);
}

double sigma_d_sq(double ell, double tau1, double tau2, double delta_x_sq,
                  double delta_y_sq) {
  if (ell < 0.0 || tau1 < 0.0 || tau2 < 0.0 || delta_x_sq < 0.0 || delta_y_sq < 0.0)
    throw std::invalid_argument("sigma_d_sq: inputs must be >= 0");
  return 16.0 * ell * tau1 * tau1 * delta_x_sq + 64.0 * ell * tau2 * tau2 * delta_y_sq;
}

void BoundInputs::validate() const {
  if (!(ell > 0.0) || !(mu > 0.0)) throw ConfigError("bound inputs: ell, mu must be positive");
  const double expected_kappa = ell / mu;
  if (std::abs(kappa - expected_kappa) > 1e-12 * expected_kappa)
    throw ConfigError("bound inputs: kappa must equal ell/mu");
  if (!(tau1 > 0.0) || !(tau2 > 0.0) || !(alpha > 0.0))
    throw ConfigError("bound inputs: tau1, tau2, alpha must be positive");
  if (std::abs(tau2 - tau1 / 48.0) > 1e-12 * tau2)
    throw ConfigError("bound inputs: policy requires tau2 = tau1/48");
  if (delta_x_sq < 0.0 || delta_y_sq < 0.0)
    throw ConfigError("bound inputs: noise proxies must be >= 0");
  if (delta0_b0 < 0.0) throw ConfigError("bound inputs: delta0_b0 must be >= 0");
  if (iterations < 1) throw ConfigError("bound inputs: iterations must be >= 1");
  if (qbar_mesh.empty()) throw ConfigError("bound inputs: qbar_mesh must not be empty");
  double prev = 0.0;
  for (double q : qbar_mesh) {
    if (!(q > 0.0) || !(q < 1.0))
      throw ConfigError("bound inputs: qbar mesh must lie strictly inside (0, 1)");
    if (q <= prev) throw ConfigError("bound inputs: qbar mesh must be strictly increasing");
    prev = q;
  }
}

nlohmann::json BoundInputs::to_json() const {
  return {{"ell", ell},
          {"mu", mu},
          {"kappa", kappa},
          {"tau1", tau1},
          {"tau2", tau2},
          {"alpha", alpha},
          {"delta_x_sq", delta_x_sq},
          {"delta_y_sq", delta_y_sq},
          {"delta0_b0", delta0_b0},
          {"iterations", iterations},
          {"mesh_size", qbar_mesh.size()},
          {"mesh_min", qbar_mesh.front()},
          {"mesh_max", qbar_mesh.back()},
          {"constrained_dual", constrained_dual}};
}

BoundInputs BoundInputs::from_json(const nlohmann::json& j) {
  BoundInputs in;
  in.ell = j.at("ell").get<double>();
  in.mu = j.at("mu").get<double>();
  in.kappa = j.contains("kappa") ? j.at("kappa").get<double>() : in.ell / in.mu;
  in.tau1 = j.at("tau1").get<double>();
  in.tau2 = j.contains("tau2") ? j.at("tau2").get<double>() : in.tau1 / 48.0;
  in.alpha = j.at("alpha").get<double>();
  in.delta_x_sq = j.at("delta_x_sq").get<double>();
  in.delta_y_sq = j.at("delta_y_sq").get<double>();
  in.delta0_b0 = j.value("delta0_b0", 0.0);
  in.iterations = j.at("iterations").get<std::int64_t>();
  in.constrained_dual = j.value("constrained_dual", false);
  return in;
}

std::vector<double> default_qbar_mesh(double m) {
  if (!(m > 0.0) || !(m < 0.5)) throw ConfigError("qbar mesh: grid size must be in (0, 0.5)");
  std::vector<double> mesh;
  const auto count = static_cast<std::int64_t>(std::llround(1.0 / m)) - 1;
  mesh.reserve(static_cast<std::size_t>(count));
  for (std::int64_t i = 1; i <= count; ++i) mesh.push_back(static_cast<double>(i) * m);
  return mesh;
}

QuantileCurve q_bound(const BoundInputs& inputs) {
  inputs.validate();
  if (inputs.constrained_dual)
    throw UnsupportedError(
        "q_bound: the guarantee does not cover constrained dual domains; "
        "refusing to emit a bound for this problem");

  QuantileCurve curve;
  curve.inputs = inputs;
  const double sc2 = sigma_c_sq(inputs.tau1, inputs.delta_x_sq, inputs.delta_y_sq);
  const double sd2 = sigma_d_sq(inputs.ell, inputs.tau1, inputs.tau2, inputs.delta_x_sq,
                                inputs.delta_y_sq);
  curve.r1 = (64.0 / inputs.alpha) * (inputs.kappa / inputs.tau2);
  curve.r2 = sd2;
  curve.r3 = std::max(4.0 * sc2, 2.0 * sd2);
  curve.r3_from_sigma_d = 2.0 * sd2 > 4.0 * sc2;

  const double t = static_cast<double>(inputs.iterations);
  curve.qbar = inputs.qbar_mesh;
  curve.q.reserve(curve.qbar.size());
  for (double qb : curve.qbar)
    curve.q.push_back(curve.r1 *
                      (inputs.delta0_b0 / t + curve.r2 + (curve.r3 / t) * std::log(1.0 / qb)));
  return curve;
}

nlohmann::json SearchSpec::to_json() const {
  return {{"x_halfwidth", x_halfwidth},
          {"y_halfwidth", y_halfwidth},
          {"num_samples", num_samples},
          {"refine_steps", refine_steps},
          {"outer_descent_steps", outer_descent_steps},
          {"inner_warm_steps", inner_warm_steps},
          {"multistarts", multistarts},
          {"seed", seed},
          {"pure_grid", pure_grid},
          {"grid_points_per_dim", grid_points_per_dim}};
}

SearchSpec SearchSpec::from_json(const nlohmann::json& j) {
  SearchSpec s;
  s.x_halfwidth = j.value("x_halfwidth", 25.0);
  s.y_halfwidth = j.value("y_halfwidth", 200.0);
  s.num_samples = j.value("num_samples", 256);
  s.refine_steps = j.value("refine_steps", 400);
  s.outer_descent_steps = j.value("outer_descent_steps", 300);
  s.inner_warm_steps = j.value("inner_warm_steps", 40);
  s.multistarts = j.value("multistarts", 4);
  s.seed = j.value("seed", std::uint64_t{0});
  s.pure_grid = j.value("pure_grid", false);
  s.grid_points_per_dim = j.value("grid_points_per_dim", 0);
  return s;
}

nlohmann::json Delta0B0Estimate::to_json() const {
  return {{"delta0", delta0},   {"b0", b0},
          {"total", total},     {"phi_z0", phi_z0},
          {"phi_star", phi_star}, {"boundary_warning", boundary_warning},
          {"search", spec.to_json()},
          {"note", "estimated upper bound from the recorded search; not certified"}};
}

namespace {

// Lattice with points_per_dim points per axis over [-hw, hw]^dim. Doubling
// the resolution as n -> 2n-1 keeps the coarse lattice nested in the fine
// one, so refined searches can only enlarge inner maxima.
class LatticeWalker {
 public:
  LatticeWalker(int dim, int points_per_dim, double halfwidth)
      : dim_(dim), n_(points_per_dim), hw_(halfwidth), index_(dim, 0), done_(false) {
    if (dim_ > 4) throw ConfigError("pure grid search: dimension too large (max 4)");
    if (n_ < 1) throw ConfigError("pure grid search: need at least one point per dim");
  }
  bool next(Vec& out) {
    if (done_) return false;
    for (int i = 0; i < dim_; ++i)
      out[i] = n_ == 1 ? 0.0 : -hw_ + 2.0 * hw_ * static_cast<double>(index_[i]) /
                                          static_cast<double>(n_ - 1);
    int i = 0;
    for (; i < dim_; ++i) {
      if (++index_[i] < n_) break;
      index_[i] = 0;
    }
    if (i == dim_) done_ = true;
    return true;
  }

 private:
  int dim_, n_;
  double hw_;
  std::vector<int> index_;
  bool done_;
};

struct InnerMaxResult {
  double value = -std::numeric_limits<double>::infinity();
  Vec argmax;
  bool left_box = false;
};

}  // namespace

Delta0B0Estimate estimate_delta0_b0(const MinimaxProblem& problem, const Vec& x0,
                                    const Vec& y0, const Vec& z0, double p_smoothing,
                                    const SearchSpec& spec) {
  if (!(p_smoothing >= 0.0)) throw ConfigError("estimate_delta0_b0: p must be >= 0");
  const int d1 = problem.dim_x();
  const int d2 = problem.dim_y();
  const double ell = problem.constants().lipschitz_ell;
  rng::Stream stream(spec.seed);
  std::uint64_t draw = 0;

  auto random_point = [&](int dim, double hw) {
    Vec v(dim);
    for (int i = 0; i < dim; ++i)
      v[i] = hw * (2.0 * stream.uniform(rng::Tag::kSearch, draw, static_cast<std::uint64_t>(i)) -
                   1.0);
    ++draw;
    return v;
  };

  bool boundary_warning = false;
  auto note_box = [&](const Vec& v, double hw) {
    if (v.cwiseAbs().maxCoeff() > hw) boundary_warning = true;
  };

  // max_y f(x, y) by best-of-candidates + gradient ascent. The candidate list
  // always contains y = 0 and y0.
  const double ascent_step = 1.0 / (2.0 * ell);
  auto inner_max = [&](const Vec& x, const Vec* warm, int refine_steps) {
    InnerMaxResult best;
    auto consider = [&](const Vec& y) {
      const double v = problem.value(x, y);
      if (v > best.value) {
        best.value = v;
        best.argmax = y;
      }
    };
    if (spec.pure_grid) {
      LatticeWalker lattice(d2, spec.grid_points_per_dim, spec.y_halfwidth);
      Vec y(d2);
      while (lattice.next(y)) consider(y);
      return best;  // pure grid: no refinement
    }
    consider(Vec::Zero(d2));
    consider(y0);
    if (warm != nullptr) {
      consider(*warm);
    } else {
      for (int s = 0; s < spec.num_samples; ++s) consider(random_point(d2, spec.y_halfwidth));
    }
    Vec y = best.argmax;
    for (int s = 0; s < refine_steps; ++s) y += ascent_step * problem.grad_y(x, y);
    consider(y);
    note_box(best.argmax, spec.y_halfwidth);
    return best;
  };

  // --- Delta0 = Phi(z0) - min_x Phi(x) -------------------------------------
  InnerMaxResult phi_z0 = inner_max(z0, nullptr, spec.refine_steps);

  double phi_star = phi_z0.value;
  if (spec.pure_grid) {
    LatticeWalker lattice(d1, spec.grid_points_per_dim, spec.x_halfwidth);
    Vec x(d1);
    while (lattice.next(x)) phi_star = std::min(phi_star, inner_max(x, nullptr, 0).value);
  } else {
    const double outer_step = 1.0 / (6.0 * ell);
    std::vector<Vec> starts{Vec::Zero(d1), z0};
    for (int s = 2; s < spec.multistarts; ++s)
      starts.push_back(random_point(d1, spec.x_halfwidth / 8.0));
    for (const auto& start : starts) {
      Vec x = start;
      InnerMaxResult inner = inner_max(x, nullptr, spec.refine_steps);
      phi_star = std::min(phi_star, inner.value);
      for (int it = 0; it < spec.outer_descent_steps; ++it) {
        // Danskin direction: grad_x f at the inner maximizer.
        x -= outer_step * problem.grad_x(x, inner.argmax);
        inner = inner_max(x, &inner.argmax, spec.inner_warm_steps);
        phi_star = std::min(phi_star, inner.value);
      }
      note_box(x, spec.x_halfwidth);
    }
  }

  // --- b0 = 2 [ max_y fhat(x0, y; z0) - min_x fhat(x, y0; z0) ] -------------
  const double prox_x0 = 0.5 * p_smoothing * (x0 - z0).squaredNorm();
  const double sup_term = inner_max(x0, &phi_z0.argmax, spec.refine_steps).value + prox_x0;

  auto fhat = [&](const Vec& x) {
    return problem.value(x, y0) + 0.5 * p_smoothing * (x - z0).squaredNorm();
  };
  auto fhat_grad = [&](const Vec& x) -> Vec {
    return problem.grad_x(x, y0) + p_smoothing * (x - z0);
  };

  double inf_term = std::numeric_limits<double>::infinity();
  if (spec.pure_grid) {
    LatticeWalker lattice(d1, spec.grid_points_per_dim, spec.x_halfwidth);
    Vec x(d1);
    while (lattice.next(x)) inf_term = std::min(inf_term, fhat(x));
  } else {
    const double descent_step = 1.0 / (3.0 * (ell + p_smoothing));
    std::vector<Vec> starts{x0, z0, Vec::Zero(d1)};
    for (int s = 3; s < spec.multistarts + 3; ++s)
      starts.push_back(random_point(d1, spec.x_halfwidth / 8.0));
    for (const auto& start : starts) {
      Vec x = start;
      inf_term = std::min(inf_term, fhat(x));
      for (int it = 0; it < spec.refine_steps; ++it) {
        x -= descent_step * fhat_grad(x);
        inf_term = std::min(inf_term, fhat(x));
      }
      note_box(x, spec.x_halfwidth);
    }
  }

  Delta0B0Estimate est;
  est.phi_z0 = phi_z0.value;
  est.phi_star = phi_star;
  est.delta0 = std::max(phi_z0.value - phi_star, 0.0);
  est.b0 = 2.0 * std::max(sup_term - inf_term, 0.0);
  est.total = est.delta0 + est.b0;
  est.boundary_warning = boundary_warning;
  est.spec = spec;
  return est;
}

}  // namespace smagda
