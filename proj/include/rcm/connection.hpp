#pragma once

// Connection functions g: [0, inf) -> [0, 1], non-increasing and
// right-continuous, with their radial integrals and generalized inverse.

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <string_view>

#include "rcm/errors.hpp"
#include "rcm/geometry.hpp"
#include "rcm/numeric.hpp"

namespace rcm {

enum class TailKind { bounded_support, exponential_tail, polynomial_tail };

struct TailClass {
  TailKind kind;
  // Decay rate c in e^{-cs} or s^{-c}; infinite when g decays faster than
  // every member of its family (gaussian) or vanishes (bounded support).
  double rate;
};

inline std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

class ConnectionFunction {
 public:
  enum class Kind { indicator, scaled_indicator, exponential, power_law, gaussian };

  static ConnectionFunction indicator() { return {Kind::indicator, 1.0}; }

  static ConnectionFunction scaled_indicator(double p) {
    if (!(p > 0.0 && p <= 1.0)) throw InvalidInput("scaled_indicator: p must lie in (0, 1]");
    return {Kind::scaled_indicator, p};
  }

  static ConnectionFunction exponential(double c) {
    if (!(c > 0.0) || !std::isfinite(c)) throw InvalidInput("exp: rate c must be positive");
    return {Kind::exponential, c};
  }

  static ConnectionFunction power_law(double c) {
    if (!(c > 0.0) || !std::isfinite(c)) throw InvalidInput("pow: exponent c must be positive");
    return {Kind::power_law, c};
  }

  static ConnectionFunction gaussian() { return {Kind::gaussian, 1.0}; }

  // "indicator", "scaled_indicator:p", "exp:c", "pow:c", "gauss".
  static ConnectionFunction parse(std::string_view text) {
    auto colon = text.find(':');
    std::string_view head = text.substr(0, colon);
    auto param = [&]() -> double {
      if (colon == std::string_view::npos) throw InvalidInput("connection function '" + std::string(text) + "' needs a parameter");
      std::string tail(text.substr(colon + 1));
      std::size_t used = 0;
      double value = 0.0;
      try {
        value = std::stod(tail, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != tail.size()) throw InvalidInput("bad parameter in connection function '" + std::string(text) + "'");
      return value;
    };
    auto no_param = [&]() {
      if (colon != std::string_view::npos) throw InvalidInput("connection function '" + std::string(head) + "' takes no parameter");
    };
    if (head == "indicator") {
      no_param();
      return indicator();
    }
    if (head == "gauss") {
      no_param();
      return gaussian();
    }
    if (head == "scaled_indicator") return scaled_indicator(param());
    if (head == "exp") return exponential(param());
    if (head == "pow") return power_law(param());
    throw InvalidInput("unknown connection function '" + std::string(text) + "'");
  }

  Kind kind() const noexcept { return kind_; }
  double parameter() const noexcept { return param_; }

  std::string name() const {
    switch (kind_) {
      case Kind::indicator: return "indicator";
      case Kind::scaled_indicator: return "scaled_indicator:" + format_real(param_);
      case Kind::exponential: return "exp:" + format_real(param_);
      case Kind::power_law: return "pow:" + format_real(param_);
      case Kind::gaussian: return "gauss";
    }
    return {};
  }

  TailClass tail_class() const noexcept {
    constexpr double inf = std::numeric_limits<double>::infinity();
    switch (kind_) {
      case Kind::indicator:
      case Kind::scaled_indicator: return {TailKind::bounded_support, inf};
      case Kind::exponential: return {TailKind::exponential_tail, param_};
      case Kind::gaussian: return {TailKind::exponential_tail, inf};
      case Kind::power_law: return {TailKind::polynomial_tail, param_};
    }
    return {TailKind::bounded_support, inf};
  }

  // Largest s with g(s) > 0; infinite for unbounded support.
  double support_radius() const noexcept {
    return tail_class().kind == TailKind::bounded_support ? 1.0 : std::numeric_limits<double>::infinity();
  }

  double value_at_zero() const noexcept { return kind_ == Kind::scaled_indicator ? param_ : 1.0; }

  // g(s). Accepts s = +inf (returns 0).
  double operator()(double s) const {
    if (!(s >= 0.0)) throw InvalidInput("g: argument must be nonnegative");
    return eval_unchecked(s);
  }

  double eval_unchecked(double s) const noexcept {
    switch (kind_) {
      case Kind::indicator: return s <= 1.0 ? 1.0 : 0.0;
      case Kind::scaled_indicator: return s <= 1.0 ? param_ : 0.0;
      case Kind::exponential: return std::exp(-param_ * s);
      case Kind::power_law: return s <= 1.0 ? 1.0 : std::pow(s, -param_);
      case Kind::gaussian: return std::exp(-s * s);
    }
    return 0.0;
  }

  // s*(u) = sup{s >= 0 : g(s) >= u}, with sup of the empty set taken as 0.
  double inverse(double u) const {
    if (!(u > 0.0 && u <= 1.0)) throw InvalidInput("generalized inverse: u must lie in (0, 1]");
    return inverse_unchecked(u);
  }

  double inverse_unchecked(double u) const noexcept {
    switch (kind_) {
      case Kind::indicator: return 1.0;
      case Kind::scaled_indicator: return u <= param_ ? 1.0 : 0.0;
      case Kind::exponential: return -std::log(u) / param_;
      case Kind::power_law: return std::pow(u, -1.0 / param_);
      case Kind::gaussian: return std::sqrt(-std::log(u));
    }
    return 0.0;
  }

  void validate(int dim) const {
    check_dimension(dim);
    if (kind_ == Kind::power_law && !(param_ > dim))
      throw ModelInvalid("pow:" + format_real(param_) + " has a divergent integral in dimension " +
                         std::to_string(dim) + " (needs c > d)");
  }

  // alpha = integral of g(|x|) over R^d, closed form.
  double alpha(int dim) const { return tail_mass(dim, 0.0); }

  // G(a) = integral of g(|z|) over |z| > a, closed form.
  double tail_mass(int dim, double a) const {
    validate(dim);
    if (!(a >= 0.0)) throw InvalidInput("tail_mass: a must be nonnegative");
    const double d = dim;
    const double theta = unit_ball_volume(dim);
    switch (kind_) {
      case Kind::indicator:
      case Kind::scaled_indicator:
        return a >= 1.0 ? 0.0 : param_ * theta * (1.0 - std::pow(a, d));
      case Kind::exponential:
        if (std::isinf(a)) return 0.0;
        return d * theta * numeric::upper_incomplete_gamma(d, param_ * a) / std::pow(param_, d);
      case Kind::power_law:
        if (a < 1.0) return d * theta * ((1.0 - std::pow(a, d)) / d + 1.0 / (param_ - d));
        return d * theta * std::pow(a, d - param_) / (param_ - d);
      case Kind::gaussian:
        if (std::isinf(a)) return 0.0;
        return 0.5 * d * theta * numeric::upper_incomplete_gamma(0.5 * d, a * a);
    }
    return 0.0;
  }

  // Quadrature route for alpha and G(a): adaptive Gauss-Kronrod on a
  // finite window, analytic remainder beyond it chosen by tail class.
  double alpha_quadrature(int dim) const { return tail_mass_quadrature(dim, 0.0); }

  double tail_mass_quadrature(int dim, double a) const {
    validate(dim);
    if (!(a >= 0.0)) throw InvalidInput("tail_mass: a must be nonnegative");
    const double d = dim;
    const double shell = d * unit_ball_volume(dim);
    auto radial = [&](double s) { return std::pow(s, d - 1.0) * eval_unchecked(s); };
    auto piece = [&](double lo, double hi) {
      if (hi <= lo) return 0.0;
      // Split at the kink s = 1 where g may lose smoothness.
      if (lo < 1.0 && hi > 1.0) return numeric::integrate(radial, lo, 1.0, 1e-13) + numeric::integrate(radial, 1.0, hi, 1e-13);
      return numeric::integrate(radial, lo, hi, 1e-13);
    };
    switch (tail_class().kind) {
      case TailKind::bounded_support:
        return shell * piece(a, 1.0);
      case TailKind::exponential_tail: {
        // Beyond the window the remainder is below 1e-30 relative.
        double scale = kind_ == Kind::gaussian ? 1.0 : 1.0 / param_;
        double window = kind_ == Kind::gaussian ? a + 12.0 : a + (80.0 + 4.0 * d) * scale;
        double total = 0.0;
        double step = kind_ == Kind::gaussian ? 1.0 : 4.0 * scale;
        for (double lo = a; lo < window; lo += step) total += piece(lo, std::min(lo + step, window));
        return shell * total;
      }
      case TailKind::polynomial_tail: {
        double start = std::max(a, 1.0);
        double window = 16.0 * start;
        double remainder = std::pow(window, d - param_) / (param_ - d);
        return shell * (piece(a, start) + piece(start, window) + remainder);
      }
    }
    return 0.0;
  }

  friend bool operator==(const ConnectionFunction& x, const ConnectionFunction& y) noexcept {
    return x.kind_ == y.kind_ && x.param_ == y.param_;
  }

 private:
  ConnectionFunction(Kind kind, double param) : kind_(kind), param_(param) {}

  Kind kind_;
  double param_;
};

}  // namespace rcm
