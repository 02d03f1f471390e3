#pragma once

// Seeded realization of the coupled Poisson family. Point X_i, the unit-rate
// arrival times that define N_n, and the pair uniforms U_ij are all pure
// functions of (seed, index), so every P_n is a prefix of every P_m, m > n.
//
// Labels: X_i carries label i >= 1; the Palm origin carries label 0. Graph
// vertices are positions in a PointCloud and map to labels via label().

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "rcm/errors.hpp"
#include "rcm/geometry.hpp"
#include "rcm/random.hpp"

namespace rcm {

// Vertex coordinates of one P_n (plus the origin in Palm mode).
struct PointCloud {
  int dim = 2;
  double n = 0.0;
  std::size_t poisson_count = 0;
  bool palm = false;
  std::vector<double> coords;  // vertex-major, size() * dim entries

  std::size_t size() const noexcept { return poisson_count + (palm ? 1 : 0); }
  std::span<const double> coords_of(std::size_t vertex) const {
    return std::span<const double>(coords).subspan(vertex * dim, dim);
  }
  TorusPoint point(std::size_t vertex) const { return TorusPoint(coords_of(vertex)); }
  std::uint64_t label(std::size_t vertex) const noexcept { return palm ? vertex : vertex + 1; }
};

class CoupledEnsemble {
 public:
  CoupledEnsemble(std::uint64_t seed, int dim, bool palm = false)
      : seed_(seed),
        dim_(dim),
        palm_(palm),
        arrival_key_(random::stream_key(seed, random::Stream::arrivals)),
        point_key_(random::stream_key(seed, random::Stream::points)),
        pair_key_(random::stream_key(seed, random::Stream::pairs)),
        cache_(std::make_shared<Cache>()) {
    check_dimension(dim);
  }

  std::uint64_t seed() const noexcept { return seed_; }
  int dim() const noexcept { return dim_; }
  bool palm() const noexcept { return palm_; }
  std::uint64_t pair_key() const noexcept { return pair_key_; }

  // Same realization with the origin added (or removed); all X_i and U_ij
  // for labels >= 1 are unchanged.
  CoupledEnsemble with_palm(bool palm) const {
    CoupledEnsemble copy = *this;
    copy.palm_ = palm;
    return copy;
  }

  // Independent ensemble for replication `index`.
  CoupledEnsemble fork(std::uint64_t index) const {
    return CoupledEnsemble(random::derive_seed(seed_, index), dim_, palm_);
  }

  // k-th arrival time (k >= 1) of the unit-rate process.
  double arrival_time(std::size_t k) const {
    if (k == 0) throw InvalidInput("arrival index starts at 1");
    std::lock_guard lock(cache_->mutex);
    while (cache_->arrivals.size() < k) extend_arrivals();
    return cache_->arrivals[k - 1];
  }

  // N_n = #{arrivals <= n}; Poisson(n) and non-decreasing in n.
  std::size_t poisson_count(double n) const {
    if (!(n > 0.0)) throw InvalidInput("n must be positive");
    std::lock_guard lock(cache_->mutex);
    return count_locked(n);
  }

  // X_label for label >= 1; the origin for label 0.
  TorusPoint point(std::uint64_t label) const {
    if (label == 0) return TorusPoint::origin(dim_);
    std::array<double, max_dimension> c{};
    for (int k = 0; k < dim_; ++k) c[k] = coordinate(label, k);
    return TorusPoint(std::span<const double>(c.data(), static_cast<std::size_t>(dim_)));
  }

  PointCloud points_up_to(double n) const {
    if (!(n > 0.0)) throw InvalidInput("n must be positive");
    PointCloud cloud;
    cloud.dim = dim_;
    cloud.n = n;
    cloud.palm = palm_;
    std::lock_guard lock(cache_->mutex);
    cloud.poisson_count = count_locked(n);
    const std::size_t have = cache_->coords.size() / dim_;
    cache_->coords.reserve(cloud.poisson_count * dim_);
    for (std::size_t label = have + 1; label <= cloud.poisson_count; ++label)
      for (int k = 0; k < dim_; ++k) cache_->coords.push_back(coordinate(label, k));
    cloud.coords.reserve(cloud.size() * dim_);
    if (palm_) cloud.coords.insert(cloud.coords.end(), dim_, 0.0);
    cloud.coords.insert(cloud.coords.end(), cache_->coords.begin(),
                        cache_->coords.begin() + static_cast<std::ptrdiff_t>(cloud.poisson_count * dim_));
    return cloud;
  }

  // U_ij keyed by the unordered label pair.
  double pair_uniform(std::uint64_t label_i, std::uint64_t label_j) const {
    if (label_i == label_j) throw InvalidInput("pair_uniform: labels must differ");
    return uniform_for(pair_key_, label_i, label_j);
  }

  static double uniform_for(std::uint64_t key, std::uint64_t label_i, std::uint64_t label_j) noexcept {
    if (label_i > label_j) std::swap(label_i, label_j);
    return random::to_open_unit(random::hash(key, label_i, label_j));
  }

 private:
  struct Cache {
    std::mutex mutex;
    std::vector<double> arrivals;
    std::vector<double> coords;
  };

  double coordinate(std::uint64_t label, int axis) const noexcept {
    return random::to_open_unit(random::hash(point_key_, label, static_cast<std::uint64_t>(axis))) - 0.5;
  }

  void extend_arrivals() const {
    auto& arrivals = cache_->arrivals;
    const std::size_t k = arrivals.size();
    const double gap = -std::log(random::to_open_unit(random::hash(arrival_key_, k)));
    arrivals.push_back((k == 0 ? 0.0 : arrivals.back()) + gap);
  }

  std::size_t count_locked(double n) const {
    auto& arrivals = cache_->arrivals;
    while (arrivals.empty() || arrivals.back() <= n) extend_arrivals();
    return static_cast<std::size_t>(std::upper_bound(arrivals.begin(), arrivals.end(), n) - arrivals.begin());
  }

  std::uint64_t seed_;
  int dim_;
  bool palm_;
  std::uint64_t arrival_key_;
  std::uint64_t point_key_;
  std::uint64_t pair_key_;
  // Memoized arrivals and coordinates; shared by copies of the same seed.
  std::shared_ptr<Cache> cache_;
};

}  // namespace rcm
