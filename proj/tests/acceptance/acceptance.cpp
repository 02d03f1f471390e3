// Acceptance run: one [PASS]/[FAIL] line per criterion. Pass criterion
// numbers as arguments to run a subset.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "rcm/rcm.hpp"

using namespace rcm;

namespace {

constexpr std::uint64_t kSeed = 20261015;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* pattern, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, x);
  return buf;
}

ExperimentConfig make(StatisticKind stat, const std::string& g, std::vector<double> grid, std::size_t reps,
                      const std::string& mode = "exact") {
  ExperimentConfig c;
  c.statistic = stat;
  c.g = ConnectionFunction::parse(g);
  c.dim = 2;
  c.n_grid = std::move(grid);
  c.replications = reps;
  c.seed = kSeed;
  c.mode = BuildMode::parse(mode);
  return c;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Shared with criterion 2.
ExperimentResult rgg_isolated;

Outcome isolated_mean() {
  auto start = std::chrono::steady_clock::now();
  rgg_isolated = run(make(StatisticKind::isolated_mean, "indicator", {5000}, 400));
  const double rgg_time = seconds_since(start);
  const double rgg_mean = rgg_isolated.summaries[0].mean;
  bool pass = std::abs(rgg_mean - 1.0) <= 0.15 && rgg_time < 120.0;
  std::string detail = "indicator mean=" + fmt("%.4f", rgg_mean) + " (target 1 +/- 0.15, " + fmt("%.1fs", rgg_time) + ")";
  for (double b : {0.0, 1.0}) {
    auto cfg = make(StatisticKind::isolated_mean, "exp:1", {5000}, 400);
    cfg.b = b;
    const double mean = run(cfg).summaries[0].mean;
    const double want = std::exp(-b);
    pass = pass && std::abs(mean - want) <= 0.20;
    detail += "; exp:1 b=" + fmt("%g", b) + " mean=" + fmt("%.4f", mean) + " (target " + fmt("%.4f", want) + " +/- 0.20)";
  }
  return {pass, detail};
}

Outcome isolated_dispersion() {
  if (rgg_isolated.summaries.empty()) rgg_isolated = run(make(StatisticKind::isolated_mean, "indicator", {5000}, 400));
  const auto& s = rgg_isolated.summaries[0];
  const double ratio = s.variance / s.mean;
  return {ratio >= 0.7 && ratio <= 1.3, "variance/mean=" + fmt("%.4f", ratio) + " (target [0.7, 1.3])"};
}

Outcome dn_strong_law() {
  auto result = sweep_coupled(make(StatisticKind::dn_ratio, "exp:1", {1e3, 1e4, 1e5}, 50, "trunc:1e-3"));
  std::vector<double> medians;
  for (const auto& s : result.summaries) medians.push_back(s.median);
  bool toward = true;
  for (std::size_t i = 1; i < medians.size(); ++i)
    toward = toward && std::abs(medians[i] - 1.0) <= std::abs(medians[i - 1] - 1.0);
  const double last = medians.back();
  std::string detail = "medians";
  for (double m : medians) detail += " " + fmt("%.4f", m);
  detail += " (monotone toward 1: " + std::string(toward ? "yes" : "no") + "; last in [0.70, 1.35])";
  return {toward && last >= 0.70 && last <= 1.35, detail};
}

Outcome dn_power_band() {
  auto result = sweep_coupled(make(StatisticKind::dn_ratio, "pow:8", {1e5}, 50, "trunc:1e-3"));
  const double median = result.summaries[0].median;
  bool band_ok = result.prediction && result.prediction->band &&
                 std::abs(result.prediction->band->first - 1.0 / 3.0) < 1e-12 && result.prediction->band->second == 1.0;
  const std::string band = band_ok ? "[1/3, 1]" : "missing or wrong";
  return {band_ok && median >= 0.25 && median <= 1.30,
          "median=" + fmt("%.4f", median) + " (target [0.25, 1.30]); recorded band " + band};
}

Outcome connectivity() {
  auto fraction = [](const std::string& g, double gamma) {
    auto cfg = make(StatisticKind::connectivity_fraction, g, {1e4}, 100);
    cfg.gamma = gamma;
    return run(cfg).summaries[0].mean;
  };
  const double high = fraction("indicator", 1.5);
  const double low = fraction("indicator", 0.5);
  const auto g = ConnectionFunction::exponential(1.0);
  const double beta = theory::beta_solve(g, 2);
  const double expo = fraction("exp:1", 2.0 * beta);
  return {high >= 0.95 && low <= 0.20 && expo >= 0.80,
          "indicator gamma=1.5: " + fmt("%.2f", high) + " (>= 0.95), gamma=0.5: " + fmt("%.2f", low) +
              " (<= 0.20); exp:1 gamma=2beta=" + fmt("%.4f", 2.0 * beta) + ": " + fmt("%.2f", expo) + " (>= 0.80)"};
}

Outcome typical_longest_edge() {
  auto cfg = make(StatisticKind::typical_longest_edge, "exp:1", {1e4}, 1000);
  cfg.gamma = 2.0;
  cfg.beta_prime = 0.0;
  const double p = run(cfg).summaries[0].mean;
  const double want = std::exp(-1.0);
  return {std::abs(p - want) <= 0.06, "P=" + fmt("%.4f", p) + " (target " + fmt("%.5f", want) + " +/- 0.06)"};
}

Outcome longest_edge_exponential() {
  auto cfg = make(StatisticKind::longest_edge_ratio, "exp:1", {1e5}, 20, "trunc:1e-3");
  cfg.gamma = 1.0;
  auto result = run(cfg);
  const auto& s = result.summaries[0];
  return {s.count == 20 && s.max <= 1.5,
          "max=" + fmt("%.4f", s.max) + " median=" + fmt("%.4f", s.median) + " over " + std::to_string(s.count) +
              " replications (every value <= 1.5)"};
}

Outcome degree_tail() {
  auto cfg = make(StatisticKind::degree_tail, "exp:1", {1e4}, 100);
  cfg.gamma = 2.0;
  cfg.t = 2.0;
  const double mean = run(cfg).summaries[0].mean;
  const double want = 1.0 - theory::normal_cdf(2.0);
  return {std::abs(mean - want) <= 0.03, "mean=" + fmt("%.5f", mean) + " (target " + fmt("%.5f", want) + " +/- 0.03)"};
}

// Dense-grid inverse of H on one monotone branch, for cross-checking.
double grid_inverse(double y, double lo, double hi) {
  const int steps = 2'000'000;
  double best = lo;
  double best_gap = INFINITY;
  for (int k = 0; k <= steps; ++k) {
    const double x = lo + (hi - lo) * k / steps;
    const double gap = std::abs(theory::chernoff_H(x) - y);
    if (gap < best_gap) {
      best_gap = gap;
      best = x;
    }
  }
  return best;
}

Outcome extreme_degrees() {
  const double up = 2.0 * theory::H_plus_inv(0.5);
  const double down = 2.0 * theory::H_minus_inv(0.5);
  const bool refs_agree = std::abs(up - 2.0 * grid_inverse(0.5, 1.0, 6.0)) < 1e-5 &&
                          std::abs(down - 2.0 * grid_inverse(0.5, 0.0, 1.0)) < 1e-5;
  auto median = [](StatisticKind kind) {
    auto cfg = make(kind, "indicator", {1e5}, 20, "trunc:1e-3");
    cfg.gamma = 2.0;
    return sweep_coupled(cfg).summaries[0].median;
  };
  const double max_ratio = median(StatisticKind::max_degree_ratio);
  const double min_ratio = median(StatisticKind::min_degree_ratio);
  const bool pass = refs_agree && std::abs(max_ratio - up) <= 0.30 * up && std::abs(min_ratio - down) <= 0.35 * down;
  return {pass, "max median=" + fmt("%.4f", max_ratio) + " (ref " + fmt("%.4f", up) + " +/- 30%); min median=" +
                    fmt("%.4f", min_ratio) + " (ref " + fmt("%.4f", down) + " +/- 35%); grid cross-check " +
                    (refs_agree ? "ok" : "FAILED")};
}

Outcome oracle_suite() {
  std::size_t checks = 0;
  std::size_t failures = 0;
  std::string first;
  for (const char* g : {"indicator", "scaled_indicator:0.5", "exp:1", "pow:8", "gauss"}) {
    const auto report = oracle::run_suite(ConnectionFunction::parse(g), 2, 100, 50.0, kSeed);
    checks += report.checks;
    failures += report.failures;
    if (first.empty() && !report.messages.empty()) first = report.messages.front();
  }
  std::string detail = std::to_string(checks) + " checks, " + std::to_string(failures) + " failures";
  if (!first.empty()) detail += " (first: " + first + ")";
  return {failures == 0, detail};
}

Outcome numeric_engine() {
  double worst_quad = 0.0;
  for (const char* name : {"indicator", "scaled_indicator:0.5", "exp:1", "exp:2.5", "pow:8", "pow:4.5", "gauss"}) {
    const auto g = ConnectionFunction::parse(name);
    for (int d : {2, 3}) {
      for (double a : {0.0, 0.25, 0.5, 1.0, 2.0, 5.0}) {
        const double closed = g.tail_mass(d, a);
        const double quad = g.tail_mass_quadrature(d, a);
        if (closed == 0.0 && quad == 0.0) continue;
        worst_quad = std::max(worst_quad, std::abs(closed - quad) / std::abs(closed));
      }
    }
  }
  double worst_h = 0.0;
  for (int k = 0; k <= 40; ++k) {
    const double y = 0.05 * k;
    worst_h = std::max(worst_h, std::abs(theory::chernoff_H(theory::H_plus_inv(y)) - y));
    if (y <= 1.0) worst_h = std::max(worst_h, std::abs(theory::chernoff_H(theory::H_minus_inv(y)) - y));
  }
  double worst_defect = 0.0;
  for (const char* name : {"exp:1", "gauss", "pow:8"})
    for (double n : {1e3, 1e4, 1e5})
      for (double beta_prime : {-1.0, 0.0, 1.0}) {
        const auto g = ConnectionFunction::parse(name);
        const double alpha = g.alpha(2);
        const double a = theory::solve_a_n(n, 2.0, beta_prime, g, 2);
        const double lhs = n * std::pow(theory::r_hat(n, 2.0, alpha, 2), 2) * g.tail_mass(2, a);
        worst_defect = std::max(worst_defect, std::abs(lhs - std::exp(-beta_prime)) / std::exp(-beta_prime));
      }
  return {worst_quad <= 1e-8 && worst_h <= 1e-10 && worst_defect <= 1e-9,
          "quadrature rel err " + fmt("%.2e", worst_quad) + " (<= 1e-8); H round trip " + fmt("%.2e", worst_h) +
              " (<= 1e-10); a_n defect " + fmt("%.2e", worst_defect) + " (<= 1e-9)"};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> check;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "isolated-node mean", isolated_mean},
      {2, "isolated-node dispersion", isolated_dispersion},
      {3, "isolation threshold strong law", dn_strong_law},
      {4, "isolation threshold power-law band", dn_power_band},
      {5, "connectivity at r_hat", connectivity},
      {6, "typical longest edge", typical_longest_edge},
      {7, "longest edge, exponential tail", longest_edge_exponential},
      {8, "degree tail", degree_tail},
      {9, "extreme degrees", extreme_degrees},
      {10, "oracle equivalence suite", oracle_suite},
      {11, "numeric engine", numeric_engine},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.check();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    if (!out.pass) ++failed;
    std::printf("[%s] %2d %s: %s [%.1fs]\n", out.pass ? "PASS" : "FAIL", c.id, c.name, out.detail.c_str(),
                seconds_since(start));
    std::fflush(stdout);
  }
  std::printf("%d criteria failed\n", failed);
  return failed ? 1 : 0;
}
