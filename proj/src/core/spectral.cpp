#include "core/spectral.hpp"

#include "core/rng.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace smagda {

namespace {
constexpr double kResidualTol = 1e-10;
constexpr long kMaxIterations = 100000;
constexpr int kMaxRestarts = 4;
}  // namespace

double spectral_norm(const Mat& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("spectral_norm: matrix must be square");
  const auto n = a.rows();
  if (n == 0) return 0.0;

  const double scale = a.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale)
    throw std::invalid_argument("spectral_norm: matrix is not symmetric");

  // Iterate on A^2 so that a +/- pair at the top of the spectrum cannot make
  // the iteration oscillate.
  rng::Stream seeder(0x5eedu);
  int restarts = 0;
  Vec v(n), w(n), u(n);
  auto reseed = [&](int attempt) {
    seeder.fill_gaussian(rng::Tag::kSearch, static_cast<std::uint64_t>(attempt),
                         std::span<double>(v.data(), static_cast<std::size_t>(n)));
    v /= v.norm();
  };
  reseed(restarts);

  double best_residual = std::numeric_limits<double>::infinity();
  long since_improvement = 0;
  for (long iter = 0; iter < kMaxIterations; ++iter) {
    w.noalias() = a * v;
    u.noalias() = a * w;
    const double r = w.squaredNorm();  // v' A^2 v
    const double un = u.norm();
    if (un == 0.0 || r == 0.0) {
      // Start vector fell into the kernel; try another one.
      if (++restarts > kMaxRestarts)
        throw std::runtime_error("spectral_norm: power iteration stagnated");
      reseed(restarts);
      best_residual = std::numeric_limits<double>::infinity();
      since_improvement = 0;
      continue;
    }
    const double residual = (u - r * v).norm();
    if (residual <= kResidualTol * r) return std::sqrt(r);

    if (residual < 0.9 * best_residual) {
      best_residual = residual;
      since_improvement = 0;
    } else if (++since_improvement > 1000) {
      if (++restarts > kMaxRestarts)
        throw std::runtime_error("spectral_norm: power iteration stagnated");
      reseed(restarts);
      best_residual = std::numeric_limits<double>::infinity();
      since_improvement = 0;
      continue;
    }
    v = u / un;
  }
  throw std::runtime_error("spectral_norm: no convergence within iteration limit");
}

}  // namespace smagda
