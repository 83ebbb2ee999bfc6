#ifndef SMAGDA_TESTS_TEST_SUPPORT_HPP
#define SMAGDA_TESTS_TEST_SUPPORT_HPP

#include "core/dro.hpp"
#include "core/ncpl_game.hpp"
#include "core/problem.hpp"

#include <filesystem>
#include <fstream>
#include <string>

namespace smagda::testing {

// f(x, y) = a'x + b'y. Finite differences are exact for it.
class LinearProblem final : public MinimaxProblem {
 public:
  LinearProblem(Vec a, Vec b) : a_(std::move(a)), b_(std::move(b)) {
    constants_.lipschitz_ell = 1.0;
    constants_.pl_mu = 1.0;
  }
  int dim_x() const override { return static_cast<int>(a_.size()); }
  int dim_y() const override { return static_cast<int>(b_.size()); }
  const ProblemConstants& constants() const override { return constants_; }
  const NoiseSpec& noise() const override { return noise_; }
  double value(const Vec& x, const Vec& y) const override {
    check_point(x, y);
    return a_.dot(x) + b_.dot(y);
  }
  Vec grad_x(const Vec& x, const Vec& y) const override {
    check_point(x, y);
    return a_;
  }
  Vec grad_y(const Vec& x, const Vec& y) const override {
    check_point(x, y);
    return b_;
  }
  Vec grad_x_stoch(const Vec& x, const Vec& y, const rng::Stream&,
                   std::uint64_t) const override {
    return grad_x(x, y);
  }
  Vec grad_y_stoch(const Vec& x, const Vec& y, const rng::Stream&,
                   std::uint64_t) const override {
    return grad_y(x, y);
  }

 private:
  Vec a_, b_;
  ProblemConstants constants_;
  NoiseSpec noise_;
};

// f(x, y) = |x|^2 - |y|^2, saddle at the origin.
class QuadraticSaddle final : public MinimaxProblem {
 public:
  explicit QuadraticSaddle(int dim) : dim_(dim) {
    constants_.lipschitz_ell = 2.0;
    constants_.pl_mu = 2.0;
  }
  int dim_x() const override { return dim_; }
  int dim_y() const override { return dim_; }
  const ProblemConstants& constants() const override { return constants_; }
  const NoiseSpec& noise() const override { return noise_; }
  double value(const Vec& x, const Vec& y) const override {
    check_point(x, y);
    return x.squaredNorm() - y.squaredNorm();
  }
  Vec grad_x(const Vec& x, const Vec& y) const override {
    check_point(x, y);
    return 2.0 * x;
  }
  Vec grad_y(const Vec& x, const Vec& y) const override {
    check_point(x, y);
    return -2.0 * y;
  }
  Vec grad_x_stoch(const Vec& x, const Vec& y, const rng::Stream&,
                   std::uint64_t) const override {
    return grad_x(x, y);
  }
  Vec grad_y_stoch(const Vec& x, const Vec& y, const rng::Stream&,
                   std::uint64_t) const override {
    return grad_y(x, y);
  }

 private:
  int dim_;
  ProblemConstants constants_;
  NoiseSpec noise_;
};

inline NcplGame small_game(int d = 5, double delta_sq = 1.0, std::uint64_t seed = 42) {
  NcplGameConfig config;
  config.d1 = config.d2 = d;
  config.delta_sq = delta_sq;
  config.matrix_seed = seed;
  return NcplGame::make(config);
}

inline DroProblem toy_dro(std::int64_t samples = 20, std::int32_t d1 = 5, int batch = 5,
                          std::uint64_t seed = 11) {
  DroOptions options;
  options.batch_size = batch;
  return DroProblem(make_synthetic_dataset(d1, samples, 3, seed), options);
}

class TempDir {
 public:
  explicit TempDir(const std::string& name) {
    path_ = (std::filesystem::temp_directory_path() / ("smagda_test_" + name)).string();
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  const std::string& path() const { return path_; }
  std::string file(const std::string& name) const {
    return (std::filesystem::path(path_) / name).string();
  }

 private:
  std::string path_;
};

inline std::string write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  return path;
}

}  // namespace smagda::testing

#endif  // SMAGDA_TESTS_TEST_SUPPORT_HPP
