#include "core/concentration.hpp"

#include "core/common.hpp"
#include "core/rng.hpp"

#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>
#include <vector>

namespace smagda {

GeneratorSpec GeneratorSpec::from_json(const nlohmann::json& j) {
  GeneratorSpec g;
  const std::string kind = j.value("kind", "default");
  if (kind == "default") g.kind = Kind::kDefault;
  else if (kind == "zero_noise") g.kind = Kind::kZeroNoise;
  else throw ConfigError("generator: unknown kind '" + kind + "'");
  g.sigma_c = j.value("sigma_c", 1.0);
  g.sigma_d = j.value("sigma_d", 1.0);
  g.a0 = j.value("a0", 0.0);
  g.exp_cap = j.value("exp_cap", 10.0);
  if (g.sigma_c < 0.0 || g.sigma_d < 0.0 || !(g.exp_cap > 0.0))
    throw ConfigError("generator: sigma_c, sigma_d >= 0 and exp_cap > 0 required");
  return g;
}

nlohmann::json GeneratorSpec::to_json() const {
  return {{"kind", kind == Kind::kDefault ? "default" : "zero_noise"},
          {"sigma_c", sigma_c},
          {"sigma_d", sigma_d},
          {"a0", a0},
          {"exp_cap", exp_cap}};
}

nlohmann::json ConcentrationReport::to_json() const {
  return {{"trials", trials},       {"violations", violations}, {"frequency", frequency},
          {"qbar", qbar},           {"threshold", threshold},   {"pass", pass},
          {"self_check_pass", self_check_pass}};
}

namespace {

struct Draws {
  double c = 0.0, d = 0.0;
};

Draws draw_cd(const GeneratorSpec& gen, const rng::Stream& stream, std::uint64_t step,
              double b_t) {
  if (gen.kind == GeneratorSpec::Kind::kZeroNoise) return {0.0, 0.0};
  double z[1];
  stream.fill_gaussian(rng::Tag::kTrial, step, std::span<double>(z, 1));
  const double c = gen.sigma_c * std::sqrt(2.0 * b_t) * z[0];
  const double u = stream.uniform(rng::Tag::kTrial, step, 4);
  const double e = std::min(-std::log(u), gen.exp_cap);
  const double d = gen.sigma_d * gen.sigma_d * (1.0 - e);
  return {c, d};
}

// One-sided Monte Carlo check of log E[exp(lambda X)] <= target.
void check_mgf(const GeneratorSpec& gen, std::uint64_t seed, bool check_c, double lambda,
               double target, const char* cond) {
  constexpr int kDraws = 20000;
  rng::Stream stream(seed, /*path=*/0xC0DE);
  double mean = 0.0, m2 = 0.0;
  for (int i = 0; i < kDraws; ++i) {
    const Draws d = draw_cd(gen, stream, static_cast<std::uint64_t>(i), 1.0);
    const double v = std::exp(lambda * (check_c ? d.c : d.d));
    const double delta = v - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (v - mean);
  }
  const double sem = std::sqrt(m2 / static_cast<double>(kDraws - 1) /
                               static_cast<double>(kDraws));
  const double slack = std::max(1e-9, 6.0 * sem / mean);
  if (std::log(mean) > target + slack) {
    std::ostringstream os;
    os << "concentration generator violates condition " << cond << ": log E[exp(lambda X)] = "
       << std::log(mean) << " > " << target << " at lambda = " << lambda;
    throw ConfigError(os.str());
  }
}

}  // namespace

ConcentrationReport verify_concentration(const GeneratorSpec& gen, double bound_sigma_c,
                                         double bound_sigma_d, double tau1, std::int64_t T,
                                         double qbar, std::int64_t num_trials,
                                         std::uint64_t seed) {
  if (!(tau1 > 0.0)) throw ConfigError("verify_concentration: tau1 must be positive");
  if (!(qbar > 0.0) || !(qbar < 1.0))
    throw ConfigError("verify_concentration: qbar must lie in (0, 1)");
  if (T < 1 || num_trials < 1)
    throw ConfigError("verify_concentration: T and num_trials must be >= 1");
  if (bound_sigma_c < 0.0 || bound_sigma_d < 0.0)
    throw ConfigError("verify_concentration: bound sigmas must be >= 0");

  // Moment self-checks of (ii)/(iii) against the constants plugged into the
  // bound. Condition (iii) is only required on lambda in (0, 1/sigma_D^2].
  if (gen.kind == GeneratorSpec::Kind::kDefault) {
    if (gen.sigma_c > 0.0 && bound_sigma_c >= 0.0) {
      for (double frac : {0.35, 0.7, 1.0}) {
        const double lambda = frac / (gen.sigma_c * std::sqrt(2.0));
        check_mgf(gen, seed, /*check_c=*/true, lambda,
                  lambda * lambda * bound_sigma_c * bound_sigma_c, "(ii)");
      }
    }
    if (gen.sigma_d > 0.0 && bound_sigma_d > 0.0) {
      for (double frac : {0.25, 0.6, 1.0}) {
        const double lambda = frac / (bound_sigma_d * bound_sigma_d);
        check_mgf(gen, seed, /*check_c=*/false, lambda,
                  lambda * bound_sigma_d * bound_sigma_d, "(iii)");
      }
    }
  }

  const double sc2 = bound_sigma_c * bound_sigma_c;
  const double sd2 = bound_sigma_d * bound_sigma_d;
  const double log_term = 2.0 * tau1 * std::max(2.0 * sc2, sd2) * std::log(1.0 / qbar);

  // Trials are independent with per-trial streams; the violation count is an
  // order-insensitive sum, so the parallel tally is deterministic.
  const auto run_trial = [&](std::int64_t trial) {
    rng::Stream stream(seed, static_cast<std::uint64_t>(trial) + 1);
    double a = gen.a0;
    double sum_b = 0.0;
    for (std::int64_t t = 0; t < T; ++t) {
      const double b_t = 1.0;
      sum_b += b_t;
      const Draws d = draw_cd(gen, stream, static_cast<std::uint64_t>(t), b_t);
      a += tau1 * (-b_t + d.c + d.d);  // recursion with equality
    }
    const double lhs = 0.5 * tau1 * sum_b;
    const double rhs = (gen.a0 - a) + tau1 * sd2 * static_cast<double>(T) + log_term;
    return lhs > rhs;
  };

  std::atomic<std::int64_t> violation_count{0};
  std::atomic<std::int64_t> next{0};
  const int threads = static_cast<int>(
      std::min<std::int64_t>(num_trials, std::max(1u, std::thread::hardware_concurrency())));
  std::vector<std::thread> workers;
  workers.reserve(static_cast<std::size_t>(threads));
  for (int w = 0; w < threads; ++w)
    workers.emplace_back([&] {
      std::int64_t local = 0;
      for (std::int64_t i = next.fetch_add(1); i < num_trials; i = next.fetch_add(1))
        if (run_trial(i)) ++local;
      violation_count += local;
    });
  for (auto& worker : workers) worker.join();
  const std::int64_t violations = violation_count.load();

  ConcentrationReport report;
  report.trials = num_trials;
  report.violations = violations;
  report.frequency = static_cast<double>(violations) / static_cast<double>(num_trials);
  report.qbar = qbar;
  report.threshold =
      qbar + 3.0 * std::sqrt(qbar * (1.0 - qbar) / static_cast<double>(num_trials));
  report.pass = report.frequency <= report.threshold;
  report.self_check_pass = true;
  return report;
}

}  // namespace smagda
