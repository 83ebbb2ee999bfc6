#include "core/dro.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace smagda {

namespace {

// softplus(s) = log(1 + e^s), overflow-safe on both branches.
inline double softplus(double s) {
  return std::max(s, 0.0) + std::log1p(std::exp(-std::abs(s)));
}

// sigmoid(-m) = 1 / (1 + e^m)
inline double sigmoid_neg(double m) {
  if (m >= 0.0) {
    const double e = std::exp(-m);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(m));
}

// Neumaier compensated summation.
struct KahanSum {
  double s = 0.0, c = 0.0;
  void add(double v) {
    const double t = s + v;
    c += (std::abs(s) >= std::abs(v)) ? (s - t) + v : (v - t) + s;
    s = t;
  }
  double get() const { return s + c; }
};

}  // namespace

Vec project_simplex(const Vec& v) {
  if (v.size() == 0) throw std::invalid_argument("project_simplex: empty vector");
  if (!v.allFinite()) throw std::invalid_argument("project_simplex: non-finite input");

  std::vector<double> u(v.data(), v.data() + v.size());
  std::sort(u.begin(), u.end(), std::greater<double>());

  KahanSum prefix;
  double theta = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    prefix.add(u[k]);
    const double t = (prefix.get() - 1.0) / static_cast<double>(k + 1);
    if (u[k] - t > 0.0) theta = t;
  }
  return v.unaryExpr([theta](double vi) { return std::max(vi - theta, 0.0); });
}

DroOptions DroOptions::from_json(const nlohmann::json& j) {
  DroOptions o;
  o.lambda1 = j.value("lambda1", 1e-4);
  o.lambda2 = j.value("lambda2", 1.0);
  o.omega = j.value("omega", 10.0);
  o.batch_size = j.value("batch_size", 128);
  return o;
}

nlohmann::json DroOptions::to_json() const {
  return {{"lambda1", lambda1}, {"lambda2", lambda2}, {"omega", omega},
          {"batch_size", batch_size}};
}

DroProblem::DroProblem(Dataset dataset, DroOptions options)
    : dataset_(std::move(dataset)), options_(options) {
  if (dataset_.num_samples() < 1) throw ConfigError("dro: dataset is empty");
  if (options_.batch_size < 1) throw ConfigError("dro: batch_size must be >= 1");
  if (options_.batch_size > dataset_.num_samples())
    throw ConfigError("dro: batch_size exceeds the sample count");
  if (options_.lambda2 < 0.0 || options_.omega < 0.0)
    throw ConfigError("dro: lambda2 and omega must be >= 0");

  const double d2 = static_cast<double>(dataset_.num_samples());
  // Tuned, not certified: the dual regularizer dominates the curvature after
  // the 1/d2 loss scaling. lambda2 = 0 keeps a placeholder scale.
  const double curvature = options_.lambda2 > 0.0 ? options_.lambda2 * d2 : 1.0;
  constants_.pl_mu = curvature;
  constants_.lipschitz_ell = curvature;
  constants_.certified = false;

  // Coarse minibatch-noise proxies at the x = 0 reference point; nothing
  // downstream consumes them for constrained problems.
  double max_row_sq = 0.0;
  for (const auto& r : dataset_.rows) {
    double s = 0.0;
    for (double vv : r.val) s += vv * vv;
    max_row_sq = std::max(max_row_sq, s);
  }
  const double b = static_cast<double>(options_.batch_size);
  noise_.delta_x_sq = 0.25 * max_row_sq / b;
  noise_.delta_y_sq = 4.0 * std::log(2.0) * std::log(2.0) / b;
}

double DroProblem::loss_margin(std::int64_t j, const Vec& x) const {
  return static_cast<double>(dataset_.labels[static_cast<std::size_t>(j)]) *
         dataset_.rows[static_cast<std::size_t>(j)].dot(x.data());
}

double DroProblem::value(const Vec& x, const Vec& y) const {
  check_point(x, y);
  const auto d2 = dataset_.num_samples();
  KahanSum loss;
  for (std::int64_t j = 0; j < d2; ++j)
    loss.add(y[j] * softplus(-loss_margin(j, x)));

  double reg = 0.0;
  for (int i = 0; i < x.size(); ++i) {
    const double xi2 = x[i] * x[i];
    reg += options_.omega * xi2 / (1.0 + options_.omega * xi2);
  }

  const double u = 1.0 / static_cast<double>(d2);
  double dual = 0.0;
  for (std::int64_t j = 0; j < d2; ++j) {
    const double dy = y[j] - u;
    dual += dy * dy;
  }
  return loss.get() / static_cast<double>(d2) + options_.lambda1 * reg -
         0.5 * options_.lambda2 * static_cast<double>(d2) * dual;
}

Vec DroProblem::grad_x(const Vec& x, const Vec& y) const {
  check_point(x, y);
  const auto d2 = dataset_.num_samples();
  Vec g = Vec::Zero(dim_x());
  for (std::int64_t j = 0; j < d2; ++j) {
    const auto& row = dataset_.rows[static_cast<std::size_t>(j)];
    const double c = y[j] * (-static_cast<double>(dataset_.labels[static_cast<std::size_t>(j)])) *
                     sigmoid_neg(loss_margin(j, x));
    for (std::size_t k = 0; k < row.idx.size(); ++k) g[row.idx[k]] += c * row.val[k];
  }
  g /= static_cast<double>(d2);
  for (int i = 0; i < x.size(); ++i) {
    const double den = 1.0 + options_.omega * x[i] * x[i];
    g[i] += options_.lambda1 * 2.0 * options_.omega * x[i] / (den * den);
  }
  return g;
}

Vec DroProblem::grad_y(const Vec& x, const Vec& y) const {
  check_point(x, y);
  const auto d2 = dataset_.num_samples();
  const double d2d = static_cast<double>(d2);
  const double u = 1.0 / d2d;
  Vec g(dim_y());
  for (std::int64_t j = 0; j < d2; ++j)
    g[j] = softplus(-loss_margin(j, x)) / d2d - options_.lambda2 * d2d * (y[j] - u);
  return g;
}

Vec DroProblem::grad_x_stoch(const Vec& x, const Vec& y, const rng::Stream& stream,
                             std::uint64_t step) const {
  check_point(x, y);
  const auto d2 = dataset_.num_samples();
  const auto batch =
      stream.sample_without_replacement(rng::Tag::kBatchX, step, d2, options_.batch_size);
  Vec g = Vec::Zero(dim_x());
  for (const auto j : batch) {
    const auto& row = dataset_.rows[static_cast<std::size_t>(j)];
    const double c = y[j] * (-static_cast<double>(dataset_.labels[static_cast<std::size_t>(j)])) *
                     sigmoid_neg(loss_margin(j, x));
    for (std::size_t k = 0; k < row.idx.size(); ++k) g[row.idx[k]] += c * row.val[k];
  }
  g /= static_cast<double>(batch.size());
  for (int i = 0; i < x.size(); ++i) {
    const double den = 1.0 + options_.omega * x[i] * x[i];
    g[i] += options_.lambda1 * 2.0 * options_.omega * x[i] / (den * den);
  }
  return g;
}

Vec DroProblem::grad_y_stoch(const Vec& x, const Vec& y, const rng::Stream& stream,
                             std::uint64_t step) const {
  check_point(x, y);
  const auto d2 = dataset_.num_samples();
  const double d2d = static_cast<double>(d2);
  const double u = 1.0 / d2d;
  Vec g(dim_y());
  for (std::int64_t j = 0; j < d2; ++j) g[j] = -options_.lambda2 * d2d * (y[j] - u);
  const auto batch =
      stream.sample_without_replacement(rng::Tag::kBatchY, step, d2, options_.batch_size);
  const double bsz = static_cast<double>(batch.size());
  for (const auto j : batch) g[j] += softplus(-loss_margin(j, x)) / bsz;
  return g;
}

std::pair<Vec, Vec> DroProblem::grad_stoch(const Vec& x, const Vec& y,
                                           const rng::Stream& stream,
                                           std::uint64_t step) const {
  return {grad_x_stoch(x, y, stream, step), grad_y_stoch(x, y, stream, step)};
}

double DroProblem::constrained_stationarity(const Vec& x, const Vec& y, double tau2) const {
  if (!(tau2 > 0.0)) throw std::invalid_argument("constrained_stationarity: tau2 > 0");
  const Vec gx = grad_x(x, y);
  const Vec gy = grad_y(x, y);
  const Vec residual = (project_simplex(y + tau2 * gy) - y) / tau2;
  return gx.squaredNorm() + residual.squaredNorm();
}

Vec DroProblem::uniform_dual() const {
  return Vec::Constant(dim_y(), 1.0 / static_cast<double>(dataset_.num_samples()));
}

}  // namespace smagda
