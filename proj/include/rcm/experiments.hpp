#pragma once

// Monte Carlo harness: replicate a statistic over an n-grid, aggregate, and
// attach the predicted limit. Independent replications (run) suit the
// distributional statements; coupled trajectories (sweep_coupled) reuse one
// ensemble along the grid for the almost-sure statements.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "rcm/connection.hpp"
#include "rcm/ensemble.hpp"
#include "rcm/errors.hpp"
#include "rcm/graph.hpp"
#include "rcm/theory.hpp"
#include "rcm/version.hpp"

namespace rcm {

struct ExperimentConfig {
  StatisticKind statistic = StatisticKind::isolated_mean;
  ConnectionFunction g = ConnectionFunction::indicator();
  int dim = 2;
  std::vector<double> n_grid;
  std::size_t replications = 1;
  std::uint64_t seed = 1;
  BuildMode mode = BuildMode::exact();
  double b = 0.0;
  double gamma = 1.0;
  double beta_prime = 0.0;
  std::optional<double> t;  // degree-tail quantile; defaults to dim
  unsigned threads = 0;     // 0: hardware concurrency
  EngineLimits limits{};

  double quantile() const { return t.value_or(static_cast<double>(dim)); }
  bool palm() const { return statistic == StatisticKind::typical_longest_edge; }
};

struct Sample {
  double n;
  std::size_t replication;
  double value;
};

struct Summary {
  double n = 0.0;
  std::size_t count = 0;
  std::size_t skipped = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased sample variance
  double std_error = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double median = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::optional<double> dispersion;  // variance / mean
};

struct ExperimentResult {
  ExperimentConfig config;
  bool coupled = false;
  std::vector<Sample> samples;  // ordered by (n, replication)
  std::vector<Summary> summaries;
  std::optional<PredictedLimit> prediction;
  std::string prediction_note;  // violated hypothesis when not applicable
  std::string version = engine_version;
  double elapsed_seconds = 0.0;
};

// Welford accumulator.
class RunningStats {
 public:
  void add(double x) noexcept {
    ++count_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta * (x - mean_);
  }
  std::size_t count() const noexcept { return count_; }
  double mean() const noexcept { return mean_; }
  double variance() const noexcept { return count_ > 1 ? m2_ / static_cast<double>(count_ - 1) : 0.0; }

 private:
  std::size_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

inline double median_of(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

inline Summary summarize(double n, const std::vector<double>& values, std::size_t skipped) {
  Summary s;
  s.n = n;
  s.count = values.size();
  s.skipped = skipped;
  if (values.empty()) return s;
  RunningStats stats;
  for (double v : values) stats.add(v);
  s.mean = stats.mean();
  s.variance = stats.variance();
  s.std_error = std::sqrt(s.variance / static_cast<double>(s.count));
  s.ci_low = s.mean - 1.96 * s.std_error;
  s.ci_high = s.mean + 1.96 * s.std_error;
  s.median = median_of(values);
  auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  s.min = *lo;
  s.max = *hi;
  if (s.mean != 0.0) s.dispersion = s.variance / s.mean;
  return s;
}

namespace detail {

inline void run_parallel(std::size_t jobs, unsigned threads, const std::function<void(std::size_t)>& body) {
  unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, jobs));
  if (workers <= 1) {
    for (std::size_t job = 0; job < jobs; ++job) body(job);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t job = next++; job < jobs; job = next++) {
        try {
          body(job);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = jobs;
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace detail

// Evaluates one statistic on one ensemble at one n.
class StatisticEvaluator {
 public:
  explicit StatisticEvaluator(const ExperimentConfig& config)
      : config_(config), engine_(config.g, config.dim, config.limits) {
    validate(config_);
    params_ = TheoryParams::make(config.g, config.dim);
    params_.gamma = config.gamma;
    params_.b = config.b;
    params_.beta_prime = config.beta_prime;
    params_.t = config.quantile();
    if (config.statistic == StatisticKind::typical_longest_edge)
      for (double n : config.n_grid)
        edge_scale_.push_back(theory::solve_a_n(n, config.gamma, config.beta_prime, config.g, config.dim));
  }

  static void validate(const ExperimentConfig& config) {
    if (config.dim < 2) throw InvalidInput("experiments require dimension d >= 2");
    config.g.validate(config.dim);
    if (config.replications < 1) throw InvalidInput("replications must be at least 1");
    if (config.n_grid.empty()) throw InvalidInput("n grid must not be empty");
    for (std::size_t i = 0; i < config.n_grid.size(); ++i) {
      if (!(config.n_grid[i] > 1.0)) throw InvalidInput("every n must exceed 1");
      if (i > 0 && !(config.n_grid[i] > config.n_grid[i - 1])) throw InvalidInput("n grid must be strictly increasing");
    }
    if (!(config.gamma > 0.0)) throw InvalidInput("gamma must be positive");
    if (config.statistic == StatisticKind::connectivity_gamma_threshold)
      throw InvalidInput("connectivity_gamma_threshold is a theory quantity, not a sampled statistic");
    if (config.statistic == StatisticKind::isolated_mean || config.statistic == StatisticKind::isolated_dispersion)
      for (double n : config.n_grid)
        if (!(std::log(n) + config.b > 0.0)) throw InvalidInput("log n + b must be positive for every n");
  }

  const TheoryParams& params() const noexcept { return params_; }
  const GraphEngine& engine() const noexcept { return engine_; }

  // Empty when the replication is degenerate (fewer than two vertices, or
  // an undefined value such as log of a zero-length longest edge).
  std::optional<double> operator()(const CoupledEnsemble& ens, std::size_t n_index) const {
    const double n = config_.n_grid[n_index];
    const int d = config_.dim;
    const PointCloud cloud = ens.points_up_to(n);
    if (cloud.size() < 2) return std::nullopt;
    const double log_n = std::log(n);
    switch (config_.statistic) {
      case StatisticKind::isolated_mean:
      case StatisticKind::isolated_dispersion: {
        const double r = theory::r_iso(n, config_.b, params_.alpha, d);
        return static_cast<double>(isolated_count(engine_.build(ens, cloud, r, config_.mode)));
      }
      case StatisticKind::dn_ratio: {
        const ThresholdResult t = engine_.isolation_threshold(ens, cloud, config_.mode);
        if (!t.finite) return std::nullopt;
        return params_.alpha * n * std::pow(t.value, d) / log_n;
      }
      case StatisticKind::connectivity_fraction: {
        const double r = theory::r_hat(n, config_.gamma, params_.alpha, d);
        return is_connected(engine_.build(ens, cloud, r, config_.mode)) ? 1.0 : 0.0;
      }
      case StatisticKind::typical_longest_edge: {
        const double r = theory::r_hat(n, config_.gamma, params_.alpha, d);
        const auto at_origin = engine_.incident_edges(ens, cloud, r, 0);
        return at_origin.longest <= edge_scale_[n_index] * r ? 1.0 : 0.0;
      }
      case StatisticKind::longest_edge_ratio: {
        const double r = theory::r_hat(n, config_.gamma, params_.alpha, d);
        const double longest = longest_edge(engine_.build(ens, cloud, r, config_.mode));
        if (config_.g.tail_class().kind != TailKind::polynomial_tail) return longest / (r * log_n);
        if (!(longest > 0.0)) return std::nullopt;
        return std::log(longest) / log_n;
      }
      case StatisticKind::degree_tail: {
        const double r = theory::r_hat(n, config_.gamma, params_.alpha, d);
        const double level = theory::degree_level(n, config_.gamma, config_.quantile(), params_.alpha, d);
        const auto k = static_cast<std::size_t>(std::ceil(level));
        const auto stats = degree_stats(engine_.build(ens, cloud, r, config_.mode), {k});
        return static_cast<double>(stats.tail_counts[0]) / n;
      }
      case StatisticKind::max_degree_ratio:
      case StatisticKind::min_degree_ratio: {
        const double r = theory::r_hat(n, config_.gamma, params_.alpha, d);
        const auto stats = degree_stats(engine_.build(ens, cloud, r, config_.mode));
        const double degree = config_.statistic == StatisticKind::max_degree_ratio ? stats.max_degree : stats.min_degree;
        return degree / log_n;
      }
      case StatisticKind::connectivity_gamma_threshold: break;
    }
    throw InvalidInput("statistic cannot be sampled");
  }

 private:
  ExperimentConfig config_;
  GraphEngine engine_;
  TheoryParams params_;
  std::vector<double> edge_scale_;  // a_n per grid point
};

namespace detail {

inline ExperimentResult assemble(const ExperimentConfig& config, const StatisticEvaluator& eval, bool coupled,
                                 const std::vector<std::vector<std::optional<double>>>& table) {
  ExperimentResult result;
  result.config = config;
  result.coupled = coupled;
  for (std::size_t i = 0; i < config.n_grid.size(); ++i) {
    std::vector<double> values;
    std::size_t skipped = 0;
    for (std::size_t k = 0; k < config.replications; ++k) {
      if (table[i][k]) {
        values.push_back(*table[i][k]);
        result.samples.push_back({config.n_grid[i], k, *table[i][k]});
      } else {
        ++skipped;
      }
    }
    result.summaries.push_back(summarize(config.n_grid[i], values, skipped));
  }
  try {
    result.prediction = theory::predict(config.statistic, eval.params());
  } catch (const NotApplicable& e) {
    result.prediction_note = e.hypothesis();
  }
  return result;
}

}  // namespace detail

// Independent replications: ensemble (n_index, k) is forked from the seed.
inline ExperimentResult run(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const StatisticEvaluator eval(config);
  const CoupledEnsemble root(config.seed, config.dim, config.palm());
  const std::size_t grid = config.n_grid.size();
  std::vector<std::vector<std::optional<double>>> table(grid, std::vector<std::optional<double>>(config.replications));
  detail::run_parallel(grid * config.replications, config.threads, [&](std::size_t job) {
    const std::size_t i = job / config.replications;
    const std::size_t k = job % config.replications;
    table[i][k] = eval(root.fork(i).fork(k), i);
  });
  ExperimentResult result = detail::assemble(config, eval, false, table);
  result.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

// One coupled ensemble per replication, evaluated along the whole n-grid.
inline ExperimentResult sweep_coupled(const ExperimentConfig& config) {
  if (config.statistic != StatisticKind::dn_ratio && config.statistic != StatisticKind::max_degree_ratio &&
      config.statistic != StatisticKind::min_degree_ratio)
    throw InvalidInput("sweep_coupled supports dn_ratio, max_degree_ratio and min_degree_ratio");
  const auto start = std::chrono::steady_clock::now();
  const StatisticEvaluator eval(config);
  const CoupledEnsemble root(config.seed, config.dim, config.palm());
  const std::size_t grid = config.n_grid.size();
  std::vector<std::vector<std::optional<double>>> table(grid, std::vector<std::optional<double>>(config.replications));
  detail::run_parallel(config.replications, config.threads, [&](std::size_t k) {
    const CoupledEnsemble ens = root.fork(k);
    for (std::size_t i = 0; i < grid; ++i) table[i][k] = eval(ens, i);
  });
  ExperimentResult result = detail::assemble(config, eval, true, table);
  result.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace rcm
