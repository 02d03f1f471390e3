#pragma once

// The unit torus S = (-1/2, 1/2]^d with the toroidal metric, and a
// wraparound cell grid for fixed-radius candidate pair generation.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "rcm/errors.hpp"

namespace rcm {

inline constexpr int max_dimension = 8;

inline void check_dimension(int dim) {
  if (dim < 1 || dim > max_dimension)
    throw InvalidInput("dimension must be in [1, " + std::to_string(max_dimension) +
                       "], got " + std::to_string(dim));
}

// Wrap a real coordinate into (-1/2, 1/2].
inline double wrap_coordinate(double x) noexcept { return x - std::ceil(x - 0.5); }

class TorusPoint {
 public:
  TorusPoint() = default;

  explicit TorusPoint(std::span<const double> coords) : dim_(static_cast<int>(coords.size())) {
    check_dimension(dim_);
    for (int i = 0; i < dim_; ++i) coords_[i] = wrap_coordinate(coords[i]);
  }

  TorusPoint(std::initializer_list<double> coords)
      : TorusPoint(std::span<const double>(coords.begin(), coords.size())) {}

  static TorusPoint origin(int dim) {
    check_dimension(dim);
    TorusPoint p;
    p.dim_ = dim;
    return p;
  }

  int dim() const noexcept { return dim_; }
  double operator[](int i) const noexcept { return coords_[i]; }
  std::span<const double> coords() const noexcept { return {coords_.data(), static_cast<std::size_t>(dim_)}; }

  // Translate by t and wrap back onto the torus.
  TorusPoint shifted(std::span<const double> t) const {
    if (static_cast<int>(t.size()) != dim_) throw InvalidInput("shift dimension mismatch");
    std::array<double, max_dimension> moved{};
    for (int i = 0; i < dim_; ++i) moved[i] = coords_[i] + t[i];
    return TorusPoint(std::span<const double>(moved.data(), static_cast<std::size_t>(dim_)));
  }

  friend bool operator==(const TorusPoint& a, const TorusPoint& b) noexcept {
    return a.dim_ == b.dim_ && std::equal(a.coords_.begin(), a.coords_.begin() + a.dim_, b.coords_.begin());
  }

 private:
  int dim_ = 0;
  std::array<double, max_dimension> coords_{};
};

namespace detail {

inline double wrapped_delta(double a, double b) noexcept {
  double delta = std::abs(a - b);
  return delta > 0.5 ? 1.0 - delta : delta;
}

template <int Dim>
inline double torus_dist_sq(const double* a, const double* b) noexcept {
  double sum = 0.0;
  for (int k = 0; k < Dim; ++k) {
    double delta = wrapped_delta(a[k], b[k]);
    sum += delta * delta;
  }
  return sum;
}

inline double torus_dist_sq(const double* a, const double* b, int dim) noexcept {
  double sum = 0.0;
  for (int k = 0; k < dim; ++k) {
    double delta = wrapped_delta(a[k], b[k]);
    sum += delta * delta;
  }
  return sum;
}

// Calls fn(std::integral_constant<int, dim>) for dim in [1, max_dimension].
template <class Fn>
decltype(auto) dispatch_dimension(int dim, Fn&& fn) {
  switch (dim) {
    case 1: return fn(std::integral_constant<int, 1>{});
    case 2: return fn(std::integral_constant<int, 2>{});
    case 3: return fn(std::integral_constant<int, 3>{});
    case 4: return fn(std::integral_constant<int, 4>{});
    case 5: return fn(std::integral_constant<int, 5>{});
    case 6: return fn(std::integral_constant<int, 6>{});
    case 7: return fn(std::integral_constant<int, 7>{});
    case 8: return fn(std::integral_constant<int, 8>{});
    default: throw InvalidInput("unsupported dimension " + std::to_string(dim));
  }
}

}  // namespace detail

inline double toroidal_distance(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidInput("toroidal_distance: dimension mismatch");
  return std::sqrt(detail::torus_dist_sq(x.data(), y.data(), static_cast<int>(x.size())));
}

inline double toroidal_distance(const TorusPoint& x, const TorusPoint& y) {
  return toroidal_distance(x.coords(), y.coords());
}

// Largest possible toroidal distance, sqrt(d)/2.
inline double torus_diameter(int dim) { return 0.5 * std::sqrt(static_cast<double>(dim)); }

// Volume of the Euclidean unit ball in R^d.
inline double unit_ball_volume(int dim) {
  if (dim < 1) throw InvalidInput("unit_ball_volume: dimension must be positive");
  double half = 0.5 * dim;
  return std::pow(std::numbers::pi, half) / std::tgamma(half + 1.0);
}

// Visit every unordered pair {i, j}, i < j, of a flat coordinate array.
// fn(i, j, distance).
template <class Fn>
void for_each_pair(std::span<const double> coords, int dim, Fn&& fn) {
  const std::size_t count = coords.size() / static_cast<std::size_t>(dim);
  detail::dispatch_dimension(dim, [&](auto dim_tag) {
    constexpr int D = decltype(dim_tag)::value;
    const double* base = coords.data();
    for (std::size_t i = 0; i < count; ++i) {
      const double* xi = base + i * D;
      for (std::size_t j = i + 1; j < count; ++j)
        fn(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j),
           std::sqrt(detail::torus_dist_sq<D>(xi, base + j * D)));
    }
  });
}

// Uniform wraparound grid over S. Cells tile each axis into `width` equal
// slabs of side 1/width >= the requested cell size; the total cell count
// is capped so memory stays bounded in high dimension.
class CellGrid {
 public:
  static constexpr std::size_t max_cells = std::size_t{1} << 22;

  CellGrid(std::span<const double> coords, int dim, double cell_size) : dim_(dim) {
    check_dimension(dim);
    if (!(cell_size > 0.0) || cell_size > 1.0) throw InvalidInput("cell_size must lie in (0, 1]");
    if (coords.size() % static_cast<std::size_t>(dim) != 0) throw InvalidInput("coordinate array length is not a multiple of dim");
    width_ = std::max(1, static_cast<int>(std::floor(1.0 / cell_size)));
    while (width_ > 1 && std::pow(static_cast<double>(width_), dim) > static_cast<double>(max_cells)) --width_;
    cell_count_ = 1;
    for (int k = 0; k < dim; ++k) cell_count_ *= static_cast<std::size_t>(width_);

    const std::size_t count = coords.size() / static_cast<std::size_t>(dim);
    std::vector<std::size_t> cell_of(count);
    cell_start_.assign(cell_count_ + 1, 0);
    for (std::size_t i = 0; i < count; ++i) {
      cell_of[i] = flat_cell(coords.subspan(i * dim, dim));
      ++cell_start_[cell_of[i] + 1];
    }
    for (std::size_t c = 0; c < cell_count_; ++c) cell_start_[c + 1] += cell_start_[c];
    order_.resize(count);
    sorted_.resize(coords.size());
    std::vector<std::size_t> fill(cell_start_.begin(), cell_start_.end() - 1);
    for (std::size_t i = 0; i < count; ++i) {
      std::size_t slot = fill[cell_of[i]]++;
      order_[slot] = static_cast<std::uint32_t>(i);
      std::copy_n(coords.begin() + i * dim, dim, sorted_.begin() + slot * dim);
    }
  }

  int dim() const noexcept { return dim_; }
  int width() const noexcept { return width_; }
  double cell_side() const noexcept { return 1.0 / width_; }
  std::size_t cell_count() const noexcept { return cell_count_; }
  std::size_t point_count() const noexcept { return order_.size(); }

  std::span<const std::uint32_t> cell(std::size_t flat) const {
    return {order_.data() + cell_start_[flat], cell_start_[flat + 1] - cell_start_[flat]};
  }

  std::size_t flat_cell(std::span<const double> point) const {
    std::size_t flat = 0;
    for (int k = 0; k < dim_; ++k) flat = flat * width_ + axis_cell(point[k]);
    return flat;
  }

  // All point indices in cells that may hold a point within `radius` of
  // `point`; a superset of the true toroidal ball.
  std::vector<std::uint32_t> candidates(std::span<const double> point, double radius) const {
    std::array<int, max_dimension> home{};
    for (int k = 0; k < dim_; ++k) home[k] = axis_cell(point[k]);
    std::vector<std::uint32_t> out;
    for_each_neighbor_cell(home, reach(radius), [&](std::size_t flat) {
      auto members = cell(flat);
      out.insert(out.end(), members.begin(), members.end());
    });
    return out;
  }

  // Visit each unordered pair {i, j} (original indices, i < j) at toroidal
  // distance <= radius exactly once. fn(i, j, distance).
  template <class Fn>
  void for_each_pair_within(double radius, Fn&& fn) const {
    const int r = reach(radius);
    // Slightly widened so the final cut is on the rounded distance itself.
    const double radius_sq = radius * radius * (1.0 + 1e-12);
    detail::dispatch_dimension(dim_, [&](auto dim_tag) {
      constexpr int D = decltype(dim_tag)::value;
      std::array<int, max_dimension> home{};
      for (std::size_t c = 0; c < cell_count_; ++c) {
        if (cell_start_[c] == cell_start_[c + 1]) continue;
        unflatten(c, home);
        for_each_neighbor_cell(home, r, [&](std::size_t nb) {
          if (nb < c) return;
          const std::size_t a_begin = cell_start_[c], a_end = cell_start_[c + 1];
          const std::size_t b_end = cell_start_[nb + 1];
          for (std::size_t a = a_begin; a < a_end; ++a) {
            const double* xa = sorted_.data() + a * D;
            const std::size_t b_begin = nb == c ? a + 1 : cell_start_[nb];
            for (std::size_t b = b_begin; b < b_end; ++b) {
              double dsq = detail::torus_dist_sq<D>(xa, sorted_.data() + b * D);
              if (dsq > radius_sq) continue;
              const double dist = std::sqrt(dsq);
              if (dist > radius) continue;
              std::uint32_t i = order_[a], j = order_[b];
              if (i > j) std::swap(i, j);
              fn(i, j, dist);
            }
          }
        });
      }
    });
  }

 private:
  int axis_cell(double x) const noexcept {
    int k = static_cast<int>(std::floor((x + 0.5) * width_));
    if (k >= width_) k -= width_;
    if (k < 0) k = 0;
    return k;
  }

  int reach(double radius) const noexcept {
    double cells = std::floor(radius * width_) + 1.0;
    return cells >= width_ ? width_ : static_cast<int>(cells);
  }

  void unflatten(std::size_t flat, std::array<int, max_dimension>& idx) const noexcept {
    for (int k = dim_ - 1; k >= 0; --k) {
      idx[k] = static_cast<int>(flat % width_);
      flat /= width_;
    }
  }

  // Odometer over the wrapped box home +- reach; an axis whose box covers
  // the whole ring is scanned once without duplicates.
  template <class Fn>
  void for_each_neighbor_cell(const std::array<int, max_dimension>& home, int r, Fn&& fn) const {
    const bool full = 2 * r + 1 >= width_;
    const int lo = full ? 0 : -r;
    const int hi = full ? width_ - 1 : r;
    std::array<int, max_dimension> offset{};
    offset.fill(lo);
    while (true) {
      std::size_t flat = 0;
      for (int k = 0; k < dim_; ++k) {
        int idx = full ? offset[k] : home[k] + offset[k];
        idx %= width_;
        if (idx < 0) idx += width_;
        flat = flat * width_ + static_cast<std::size_t>(idx);
      }
      fn(flat);
      int k = dim_ - 1;
      while (k >= 0 && offset[k] == hi) offset[k--] = lo;
      if (k < 0) break;
      ++offset[k];
    }
  }

  int dim_;
  int width_ = 1;
  std::size_t cell_count_ = 1;
  std::vector<std::size_t> cell_start_;
  std::vector<std::uint32_t> order_;
  std::vector<double> sorted_;
};

}  // namespace rcm
