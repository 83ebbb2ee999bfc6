#include "core/ncpl_game.hpp"

#include "core/spectral.hpp"

#include <cmath>
#include <iostream>

namespace smagda {

NcplGameConfig NcplGameConfig::from_json(const nlohmann::json& j) {
  NcplGameConfig c;
  if (j.contains("d")) {
    c.d1 = c.d2 = j.at("d").get<int>();
  } else {
    c.d1 = j.at("d1").get<int>();
    c.d2 = j.at("d2").get<int>();
  }
  c.m1 = j.value("m1", 1.0);
  c.m2 = j.value("m2", 1.0);
  c.sigma_sq = j.value("sigma_sq", 1.0);
  c.delta_sq = j.value("delta_sq", 1.0);
  c.matrix_seed = j.value("matrix_seed", std::uint64_t{0});
  return c;
}

nlohmann::json NcplGameConfig::to_json() const {
  return {{"d", d1},       {"m1", m1},           {"m2", m2},
          {"sigma_sq", sigma_sq}, {"delta_sq", delta_sq}, {"matrix_seed", matrix_seed}};
}

NcplGame NcplGame::make(const NcplGameConfig& config) {
  if (config.d1 != config.d2)
    throw ConfigError("ncpl: construction symmetrizes a square matrix, need d1 == d2");
  if (config.d1 < 1) throw ConfigError("ncpl: dimension must be positive");
  if (!(config.m1 > 0.0) || !(config.m2 > 0.0) || !(config.sigma_sq > 0.0))
    throw ConfigError("ncpl: m1, m2, sigma_sq must be positive");
  if (config.delta_sq < 0.0) throw ConfigError("ncpl: delta_sq must be >= 0");

  const int d = config.d1;
  Mat m(d, d);
  rng::Stream stream(config.matrix_seed);
  stream.fill_gaussian(rng::Tag::kMatrix, 0,
                       std::span<double>(m.data(), static_cast<std::size_t>(d) * d));
  m *= std::sqrt(config.sigma_sq);

  Mat ktilde = 0.5 * (m + m.transpose());
  const double norm = spectral_norm(ktilde);
  if (norm == 0.0) throw ConfigError("ncpl: degenerate interaction matrix");

  NcplGame game;
  game.config_ = config;
  game.k_ = (10.0 / norm) * ktilde;
  const double k_norm = spectral_norm(game.k_);
  game.constants_.pl_mu = 2.0 * config.m2;
  game.constants_.lipschitz_ell = std::max({12.0 * config.m1, 8.0 * config.m2, k_norm});
  game.constants_.validate();
  game.noise_.delta_x_sq = config.delta_sq;
  game.noise_.delta_y_sq = config.delta_sq;
  return game;
}

void NcplGame::override_constants(const ProblemConstants& constants) {
  constants.validate();
  std::cerr << "[smagda] warning: overriding derived NCPL constants (ell="
            << constants.lipschitz_ell << ", mu=" << constants.pl_mu
            << "); the stepsize policy depends on them\n";
  constants_ = constants;
  constants_.certified = false;
}

double NcplGame::value(const Vec& x, const Vec& y) const {
  check_point(x, y);
  const double nx2 = x.squaredNorm();
  const double ny = y.norm();
  const double sy = std::sin(ny);
  return config_.m1 * (nx2 + std::sin(3.0 * std::sqrt(nx2 + 1.0))) + x.dot(k_ * y) -
         config_.m2 * (ny * ny + 3.0 * sy * sy);
}

Vec NcplGame::grad_x(const Vec& x, const Vec& y) const {
  check_point(x, y);
  const double u = std::sqrt(x.squaredNorm() + 1.0);  // >= 1, no singularity
  const double coef = config_.m1 * (2.0 + 3.0 * std::cos(3.0 * u) / u);
  return coef * x + k_ * y;
}

Vec NcplGame::grad_y(const Vec& x, const Vec& y) const {
  check_point(x, y);
  const double r = y.norm();
  double bracket_coef;
  if (r < 1e-12) {
    // Taylor value of sin(2r)/r; removes the 0/0 with error O(r^4).
    bracket_coef = 2.0 + 3.0 * (2.0 - (4.0 / 3.0) * r * r);
  } else {
    bracket_coef = 2.0 + 3.0 * std::sin(2.0 * r) / r;
  }
  return k_.transpose() * x - config_.m2 * bracket_coef * y;
}

Vec NcplGame::grad_x_stoch(const Vec& x, const Vec& y, const rng::Stream& stream,
                           std::uint64_t step) const {
  Vec g = grad_x(x, y);
  if (config_.delta_sq > 0.0) {
    Vec noise(g.size());
    stream.fill_gaussian(rng::Tag::kNoiseX, step,
                         std::span<double>(noise.data(), static_cast<std::size_t>(noise.size())));
    g += std::sqrt(config_.delta_sq) * noise;
  }
  return g;
}

Vec NcplGame::grad_y_stoch(const Vec& x, const Vec& y, const rng::Stream& stream,
                           std::uint64_t step) const {
  Vec g = grad_y(x, y);
  if (config_.delta_sq > 0.0) {
    Vec noise(g.size());
    stream.fill_gaussian(rng::Tag::kNoiseY, step,
                         std::span<double>(noise.data(), static_cast<std::size_t>(noise.size())));
    g += std::sqrt(config_.delta_sq) * noise;
  }
  return g;
}

double NcplGame::metric_distance_sq(const Vec& x, const Vec& y) const {
  return x.squaredNorm() + y.squaredNorm();
}

}  // namespace smagda
