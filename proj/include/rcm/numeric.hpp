#pragma once

// Adaptive Gauss-Kronrod quadrature, monotone bisection, and the upper
// incomplete gamma function at integer and half-integer orders.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "rcm/errors.hpp"

namespace rcm::numeric {

namespace detail {

// 15-point Kronrod nodes/weights with the embedded 7-point Gauss rule (QUADPACK qk15).
inline constexpr std::array<double, 8> kronrod_nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr std::array<double, 8> kronrod_weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> gauss_weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Estimate {
  double value;
  double error;
};

template <class F>
Estimate kronrod15(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kronrod_weights[7];
  double gauss = fc * gauss_weights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kronrod_nodes[j];
    const double sum = f(center - dx) + f(center + dx);
    kronrod += kronrod_weights[j] * sum;
    if (j % 2 == 1) gauss += gauss_weights[j / 2] * sum;
  }
  return {kronrod * half, std::abs((kronrod - gauss) * half)};
}

template <class F>
double adapt(F& f, double a, double b, Estimate whole, double abs_tol, int depth) {
  if (whole.error <= abs_tol || depth <= 0 || b - a < 1e-15 * (std::abs(a) + std::abs(b)))
    return whole.value;
  const double mid = 0.5 * (a + b);
  Estimate left = kronrod15(f, a, mid);
  Estimate right = kronrod15(f, mid, b);
  if (left.error + right.error <= abs_tol) return left.value + right.value;
  return adapt(f, a, mid, left, 0.5 * abs_tol, depth - 1) +
         adapt(f, mid, b, right, 0.5 * abs_tol, depth - 1);
}

}  // namespace detail

// Integrate f over [a, b] to roughly max(abs_tol, rel_tol * |I|).
template <class F>
double integrate(F&& f, double a, double b, double rel_tol = 1e-12, double abs_tol = 0.0) {
  if (a == b) return 0.0;
  if (b < a) return -integrate(f, b, a, rel_tol, abs_tol);
  detail::Estimate whole = detail::kronrod15(f, a, b);
  double tol = std::max(abs_tol, rel_tol * std::abs(whole.value));
  if (tol == 0.0) tol = std::numeric_limits<double>::min();
  return detail::adapt(f, a, b, whole, tol, 50);
}

// Smallest x in [lo, hi] (to `tol`) with pred(x) true, given pred is
// monotone false -> true and pred(hi) holds.
template <class Pred>
double bisect_predicate(Pred&& pred, double lo, double hi, double tol) {
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (pred(mid))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

// Root of a monotone function on [lo, hi] with f(lo), f(hi) of opposite
// signs. Runs until the bracket collapses to adjacent doubles or `tol`.
template <class F>
double bisect_root(F&& f, double lo, double hi, double tol = 0.0) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) throw InvalidInput("bisect_root: root is not bracketed");
  for (int iter = 0; iter < 2000; ++iter) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi || hi - lo <= tol) break;
    double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
  }
  return std::abs(flo) <= std::abs(fhi) ? lo : hi;
}

// Upper incomplete gamma Gamma(s, x) for s a positive multiple of 1/2,
// via Gamma(s + 1, x) = s Gamma(s, x) + x^s e^{-x}.
inline double upper_incomplete_gamma(double s, double x) {
  const double twice = 2.0 * s;
  if (!(s > 0.0) || twice != std::floor(twice))
    throw InvalidInput("upper_incomplete_gamma: order must be a positive multiple of 1/2");
  if (x < 0.0) throw InvalidInput("upper_incomplete_gamma: x must be nonnegative");
  double order;
  double value;
  if (static_cast<long>(twice) % 2 == 0) {
    order = 1.0;
    value = std::exp(-x);
  } else {
    order = 0.5;
    value = std::sqrt(std::numbers::pi) * std::erfc(std::sqrt(x));
  }
  const double ex = std::exp(-x);
  while (order < s) {
    value = order * value + std::pow(x, order) * ex;
    order += 1.0;
  }
  return value;
}

}  // namespace rcm::numeric
