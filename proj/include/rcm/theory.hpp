#pragma once

// Closed-form and numerically solved reference quantities for the random
// connection model in the connectivity regime, and the predicted limit of
// every experiment statistic.

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "rcm/connection.hpp"
#include "rcm/errors.hpp"
#include "rcm/geometry.hpp"
#include "rcm/numeric.hpp"

namespace rcm {

enum class StatisticKind {
  isolated_mean,
  isolated_dispersion,
  dn_ratio,
  connectivity_fraction,
  typical_longest_edge,
  longest_edge_ratio,
  degree_tail,
  max_degree_ratio,
  min_degree_ratio,
  connectivity_gamma_threshold,
};

inline std::string to_string(StatisticKind kind) {
  switch (kind) {
    case StatisticKind::isolated_mean: return "isolated_mean";
    case StatisticKind::isolated_dispersion: return "isolated_dispersion";
    case StatisticKind::dn_ratio: return "dn_ratio";
    case StatisticKind::connectivity_fraction: return "connectivity_fraction";
    case StatisticKind::typical_longest_edge: return "typical_longest_edge";
    case StatisticKind::longest_edge_ratio: return "longest_edge_ratio";
    case StatisticKind::degree_tail: return "degree_tail";
    case StatisticKind::max_degree_ratio: return "max_degree_ratio";
    case StatisticKind::min_degree_ratio: return "min_degree_ratio";
    case StatisticKind::connectivity_gamma_threshold: return "connectivity_gamma_threshold";
  }
  return "unknown";
}

inline StatisticKind parse_statistic(std::string_view name) {
  for (auto kind : {StatisticKind::isolated_mean, StatisticKind::isolated_dispersion, StatisticKind::dn_ratio,
                    StatisticKind::connectivity_fraction, StatisticKind::typical_longest_edge,
                    StatisticKind::longest_edge_ratio, StatisticKind::degree_tail, StatisticKind::max_degree_ratio,
                    StatisticKind::min_degree_ratio, StatisticKind::connectivity_gamma_threshold})
    if (to_string(kind) == name) return kind;
  throw InvalidInput("unknown statistic '" + std::string(name) + "'");
}

namespace theory {

// beta = inf{x > 0 : x g(alpha / (x theta)) > 1}; always >= 1.
inline double beta_solve(const ConnectionFunction& g, int dim) {
  const double alpha = g.alpha(dim);
  const double theta = unit_ball_volume(dim);
  auto exceeds = [&](double x) { return x * g.eval_unchecked(alpha / (x * theta)) > 1.0; };
  if (exceeds(std::nextafter(1.0, 2.0))) return 1.0;
  double hi = 2.0;
  while (!exceeds(hi)) {
    hi *= 2.0;
    if (hi > 1e300) throw ModelInvalid("beta_solve: predicate never holds");
  }
  return numeric::bisect_predicate(exceeds, 1.0, hi, 1e-12);
}

// r_hat_n(gamma) with r^d = gamma log n / (alpha n).
inline double r_hat(double n, double gamma, double alpha, int dim) {
  if (!(n > 1.0)) throw InvalidInput("r_hat: n must exceed 1");
  if (!(gamma > 0.0)) throw InvalidInput("r_hat: gamma must be positive");
  if (!(alpha > 0.0)) throw InvalidInput("r_hat: alpha must be positive");
  return std::pow(gamma * std::log(n) / (alpha * n), 1.0 / dim);
}

// r_n(b) with r^d = (log n + b) / (alpha n).
inline double r_iso(double n, double b, double alpha, int dim) {
  if (!(n > 0.0)) throw InvalidInput("r_iso: n must be positive");
  const double top = std::log(n) + b;
  if (!(top > 0.0)) throw InvalidInput("r_iso: log n + b must be positive");
  return std::pow(top / (alpha * n), 1.0 / dim);
}

// a_n solving n r_hat^d G(a_n) = e^{-beta'}.
inline double solve_a_n(double n, double gamma, double beta_prime, const ConnectionFunction& g, int dim) {
  const double alpha = g.alpha(dim);
  const double scale = n * std::pow(r_hat(n, gamma, alpha, dim), dim);
  const double target = std::exp(-beta_prime);
  if (!(scale * alpha > target))
    throw InvalidInput("solve_a_n: n r_hat^d alpha must exceed e^{-beta'} for a positive root");
  auto defect = [&](double a) { return scale * g.tail_mass(dim, a) - target; };
  double hi = 1.0;
  while (defect(hi) > 0.0) {
    hi *= 2.0;
    if (hi > 1e300) throw InvalidInput("solve_a_n: no root found");
  }
  return numeric::bisect_root(defect, 0.0, hi);
}

// Chernoff rate function H(x) = 1 - x + x log x, H(0) = 1.
inline double chernoff_H(double x) {
  if (!(x >= 0.0)) throw InvalidInput("H: argument must be nonnegative");
  if (x == 0.0) return 1.0;
  return 1.0 - x + x * std::log(x);
}

// Inverse of H restricted to [1, inf).
inline double H_plus_inv(double y) {
  if (!(y >= 0.0)) throw InvalidInput("H_plus_inv: argument must be nonnegative");
  if (y == 0.0) return 1.0;
  double hi = 2.0;
  while (chernoff_H(hi) < y) hi *= 2.0;
  return numeric::bisect_root([y](double x) { return chernoff_H(x) - y; }, 1.0, hi, 1e-15);
}

// Inverse of H restricted to [0, 1].
inline double H_minus_inv(double y) {
  if (!(y >= 0.0 && y <= 1.0)) throw InvalidInput("H_minus_inv: argument must lie in [0, 1]");
  if (y == 1.0) return 0.0;
  if (y == 0.0) return 1.0;
  return numeric::bisect_root([y](double x) { return chernoff_H(x) - y; }, 0.0, 1.0, 1e-15);
}

// Standard normal distribution function.
inline double normal_cdf(double t) { return 0.5 * std::erfc(-t / std::numbers::sqrt2); }

// Threshold level k_n(t) = m + t sqrt(m), m = alpha n r_hat^d.
inline double degree_level(double n, double gamma, double t, double alpha, int dim) {
  const double mean = alpha * n * std::pow(r_hat(n, gamma, alpha, dim), dim);
  return mean + t * std::sqrt(mean);
}

}  // namespace theory

struct TheoryParams {
  int dim = 2;
  ConnectionFunction g = ConnectionFunction::indicator();
  double alpha = 0.0;
  double theta = 0.0;
  double beta = 1.0;
  double gamma = 1.0;
  double b = 0.0;
  double beta_prime = 0.0;
  double t = 2.0;  // normal quantile for the degree-tail level

  static TheoryParams make(const ConnectionFunction& g, int dim) {
    g.validate(dim);
    TheoryParams p;
    p.dim = dim;
    p.g = g;
    p.alpha = g.alpha(dim);
    p.theta = unit_ball_volume(dim);
    p.beta = theory::beta_solve(g, dim);
    p.t = dim;
    return p;
  }
};

enum class ClaimType { exact_limit, upper_bound, lower_bound };

inline std::string to_string(ClaimType claim) {
  switch (claim) {
    case ClaimType::exact_limit: return "exact_limit";
    case ClaimType::upper_bound: return "upper_bound";
    case ClaimType::lower_bound: return "lower_bound";
  }
  return "unknown";
}

struct PredictedLimit {
  double value;
  ClaimType claim;
  // Two-sided range when the theory brackets the limit (lower, upper).
  std::optional<std::pair<double, double>> band;
  std::string basis;
};

namespace theory {

namespace detail {

// Tail decays like o(r^-c) for some c > threshold.
inline bool polynomial_exceeds(const ConnectionFunction& g, double threshold) {
  TailClass tail = g.tail_class();
  return tail.kind != TailKind::polynomial_tail || tail.rate > threshold;
}

inline bool exponential_tail(const ConnectionFunction& g) {
  return g.tail_class().kind != TailKind::polynomial_tail;
}

}  // namespace detail

inline PredictedLimit predict(StatisticKind kind, const TheoryParams& p) {
  const double d = p.dim;
  const TailClass tail = p.g.tail_class();
  const double c = tail.rate;
  if (p.dim < 2) throw NotApplicable("dimension d >= 2");
  if (!detail::polynomial_exceeds(p.g, d)) throw NotApplicable("g(r) = o(r^-c) for some c > d");
  switch (kind) {
    case StatisticKind::isolated_mean:
      return {std::exp(-p.b), ClaimType::exact_limit, std::nullopt, "expected isolated count tends to e^-b"};
    case StatisticKind::isolated_dispersion:
      return {1.0, ClaimType::exact_limit, std::nullopt, "isolated count is asymptotically Poisson"};
    case StatisticKind::dn_ratio:
      if (detail::exponential_tail(p.g))
        return {1.0, ClaimType::exact_limit, std::nullopt, "exponential tail: alpha n d_n^d / log n -> 1 a.s."};
      if (c > 3.0 * d) {
        double lower = (c - 3.0 * d) / (c - d);
        return {lower, ClaimType::lower_bound, std::make_pair(lower, 1.0),
                "polynomial tail c > 3d: liminf >= (c-3d)/(c-d), limsup <= 1"};
      }
      return {1.0, ClaimType::upper_bound, std::nullopt, "polynomial tail c > d: limsup <= 1"};
    case StatisticKind::connectivity_fraction:
      if (!(p.gamma > p.beta)) throw NotApplicable("gamma > beta (beta = " + format_real(p.beta) + ")");
      return {1.0, ClaimType::exact_limit, std::nullopt, "gamma > beta: connected with high probability"};
    case StatisticKind::connectivity_gamma_threshold:
      return {p.beta, p.g.kind() == ConnectionFunction::Kind::indicator ? ClaimType::exact_limit : ClaimType::upper_bound,
              std::nullopt, "connectivity holds whp for every gamma > beta"};
    case StatisticKind::typical_longest_edge:
      return {std::exp(-std::exp(-p.beta_prime)), ClaimType::exact_limit, std::nullopt,
              "P(L_n^o <= a_n r_hat_n) -> exp(-e^-beta')"};
    case StatisticKind::longest_edge_ratio:
      if (detail::exponential_tail(p.g))
        return {std::isinf(c) ? 0.0 : 1.0 / c, ClaimType::upper_bound, std::nullopt,
                "exponential tail: limsup L_n / (r_hat_n log n) <= 1/c"};
      if (c > 2.0 * d)
        return {-(c - 2.0 * d) / (d * (c - d)), ClaimType::upper_bound, std::nullopt,
                "polynomial tail c > 2d: limsup log L_n / log n <= -(c-2d)/(d(c-d))"};
      throw NotApplicable("g(r) = o(r^-c) with c > 2d, or an exponential tail");
    case StatisticKind::degree_tail:
      return {1.0 - normal_cdf(p.t), ClaimType::exact_limit, std::nullopt, "E[D_n(k_n)/n] -> 1 - Phi(t)"};
    case StatisticKind::max_degree_ratio: {
      double limit = p.gamma * H_plus_inv(1.0 / p.gamma);
      if (detail::exponential_tail(p.g))
        return {limit, ClaimType::exact_limit, std::nullopt, "Delta_n / log n -> gamma H+^-1(1/gamma)"};
      if (c > 3.0 * d) {
        double lower = p.gamma * H_plus_inv((c - 3.0 * d) / (p.gamma * (c - d)));
        return {lower, ClaimType::lower_bound, std::make_pair(lower, limit),
                "polynomial tail c > 3d: bracketed by gamma H+^-1"};
      }
      return {limit, ClaimType::upper_bound, std::nullopt, "polynomial tail: limsup <= gamma H+^-1(1/gamma)"};
    }
    case StatisticKind::min_degree_ratio: {
      if (p.gamma < 1.0) {
        if (detail::exponential_tail(p.g))
          return {0.0, ClaimType::exact_limit, std::nullopt, "gamma < 1: minimum degree tends to 0"};
        throw NotApplicable("gamma >= 1 or an exponential tail");
      }
      double limit = p.gamma * H_minus_inv(1.0 / p.gamma);
      if (detail::exponential_tail(p.g))
        return {limit, ClaimType::exact_limit, std::nullopt, "delta_n / log n -> gamma H-^-1(1/gamma)"};
      if (c > 3.0 * d && p.gamma > (c - 3.0 * d) / (c - d)) {
        double upper = p.gamma * H_minus_inv((c - 3.0 * d) / (p.gamma * (c - d)));
        return {limit, ClaimType::lower_bound, std::make_pair(limit, upper),
                "polynomial tail c > 3d: bracketed by gamma H-^-1"};
      }
      return {limit, ClaimType::lower_bound, std::nullopt, "polynomial tail: liminf >= gamma H-^-1(1/gamma)"};
    }
  }
  throw InvalidInput("predict: unknown statistic");
}

}  // namespace theory
}  // namespace rcm
