#pragma once

// Materializes G_n(r) from a coupled ensemble and computes its statistics.
//
// Every pair carries a critical radius rho_ij = d_ij / s*(U_ij): the pair is
// an edge of G_n(r) exactly for r >= rho_ij. The isolation threshold d_n is
// then max_i min_j rho_ij and the connectivity threshold is the bottleneck
// of a minimum spanning tree over rho. Edge membership at a given radius is
// always settled by the direct test U_ij <= g(d_ij / r).
//
// Truncated builds only look at pairs within a cutoff L and certify the
// expected number of omitted edges by (N^2 / 2) r^d G(L / r).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "rcm/connection.hpp"
#include "rcm/ensemble.hpp"
#include "rcm/errors.hpp"
#include "rcm/geometry.hpp"
#include "rcm/union_find.hpp"

namespace rcm {

inline constexpr double infinity = std::numeric_limits<double>::infinity();

enum class BuildKind { exact, truncated };

struct BuildMode {
  BuildKind kind = BuildKind::exact;
  double epsilon = 1e-3;
  // Truncated only: explicit cutoff L, or 0 to use the minimal admissible L.
  double cutoff = 0.0;

  static BuildMode exact() { return {}; }

  static BuildMode truncated(double epsilon, double cutoff = 0.0) {
    if (!(epsilon > 0.0)) throw InvalidInput("truncation epsilon must be positive");
    if (cutoff < 0.0) throw InvalidInput("truncation cutoff must be positive");
    return {BuildKind::truncated, epsilon, cutoff};
  }

  // "exact" or "trunc:<epsilon>".
  static BuildMode parse(const std::string& text) {
    if (text == "exact") return exact();
    if (text.rfind("trunc:", 0) == 0) {
      std::size_t used = 0;
      double eps = 0.0;
      try {
        eps = std::stod(text.substr(6), &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != text.size() - 6) throw InvalidInput("bad mode '" + text + "'");
      return truncated(eps);
    }
    throw InvalidInput("mode must be 'exact' or 'trunc:<epsilon>', got '" + text + "'");
  }

  std::string name() const { return kind == BuildKind::exact ? "exact" : "trunc:" + format_real(epsilon); }
};

struct EngineLimits {
  // Largest vertex count accepted by exact (all-pairs) mode.
  std::size_t exact_vertex_limit = 30000;
};

struct Edge {
  std::uint32_t u;
  std::uint32_t v;
  double length;
};

struct PairEvent {
  std::uint32_t i;
  std::uint32_t j;
  double distance;
  double critical_radius;
};

struct GraphSnapshot {
  double n_param = 0.0;
  double radius = 0.0;
  std::size_t vertex_count = 0;
  std::vector<Edge> edges;  // sorted by (u, v), u < v
  std::vector<std::uint32_t> degrees;
  BuildKind mode = BuildKind::exact;
  double cutoff = infinity;
  double certified_bound = 0.0;
};

struct ThresholdResult {
  double value = infinity;
  bool finite = false;
  double cutoff = infinity;
  double certified_bound = 0.0;
};

struct DegreeStats {
  std::uint32_t max_degree = 0;
  std::uint32_t min_degree = 0;
  std::vector<std::size_t> tail_counts;  // D(k) for each requested k
};

// Smallest r (as a double) with u <= g(distance / r); infinite if none.
inline double critical_radius(const ConnectionFunction& g, double distance, double u) {
  const double reach = g.inverse_unchecked(u);
  if (!(reach > 0.0)) return infinity;
  double rho = distance / reach;
  if (!(rho > 0.0)) return rho;
  auto passes = [&](double r) { return u <= g.eval_unchecked(distance / r); };
  for (int step = 0; step < 64 && !passes(rho); ++step) rho = std::nextafter(rho, infinity);
  for (int step = 0; step < 64; ++step) {
    const double below = std::nextafter(rho, 0.0);
    if (!(below > 0.0) || !passes(below)) break;
    rho = below;
  }
  return rho;
}

// Expected number of edges longer than `cutoff` in G(r) on `vertices` points.
inline double truncation_bound(std::size_t vertices, double r, double cutoff, const ConnectionFunction& g, int dim) {
  if (r <= 0.0 || cutoff >= torus_diameter(dim)) return 0.0;
  const double pairs = 0.5 * static_cast<double>(vertices) * static_cast<double>(vertices);
  if (std::isinf(r)) return pairs > 0.0 ? infinity : 0.0;
  return pairs * std::pow(r, dim) * g.tail_mass(dim, cutoff / r);
}

// Minimal cutoff L in (0, sqrt(d)/2] certifying at most `epsilon` omitted edges.
inline double admissible_cutoff(std::size_t vertices, double r, double epsilon, const ConnectionFunction& g, int dim) {
  const double diameter = torus_diameter(dim);
  if (r <= 0.0) return std::min(diameter, 1e-12);
  if (std::isinf(r)) return diameter;
  if (g.tail_class().kind == TailKind::bounded_support) return std::min(diameter, r * g.support_radius());
  const double pairs = 0.5 * static_cast<double>(vertices) * static_cast<double>(vertices);
  auto bound = [&](double cutoff) { return pairs * std::pow(r, dim) * g.tail_mass(dim, cutoff / r); };
  if (bound(diameter) > epsilon) return diameter;
  return numeric::bisect_predicate([&](double cutoff) { return bound(cutoff) <= epsilon; }, 0.0, diameter,
                                   1e-12 * diameter);
}

namespace detail {

// Upper envelope of x -> g(x / r) on a fixed grid, so most non-edges are
// rejected without evaluating g. Exact: the final decision is u <= g(x / r).
class EdgeTest {
 public:
  static constexpr std::size_t bins = 8192;

  EdgeTest(const ConnectionFunction& g, double radius, double max_distance) : g_(g), radius_(radius) {
    if (radius <= 0.0) {
      never_ = true;
      return;
    }
    if (std::isinf(radius)) {
      at_zero_ = g.value_at_zero();
      return;
    }
    step_ = std::max(max_distance, 1e-300) / radius / bins;
    table_.resize(bins + 1);
    for (std::size_t k = 0; k <= bins; ++k) table_[k] = g.eval_unchecked(static_cast<double>(k) * step_);
  }

  // Upper bound on g(distance / radius); 0 means no edge is possible.
  double envelope(double distance) const noexcept {
    if (never_) return 0.0;
    if (table_.empty()) return at_zero_;
    const double x = distance / radius_;
    const double slot = x / step_;
    return slot >= static_cast<double>(bins) ? table_[bins] : table_[static_cast<std::size_t>(slot)];
  }

  bool connects(double distance, double u) const noexcept {
    if (never_) return false;
    if (table_.empty()) return u <= at_zero_;
    return u <= g_.eval_unchecked(distance / radius_);
  }

 private:
  const ConnectionFunction& g_;
  double radius_;
  bool never_ = false;
  double at_zero_ = 0.0;
  double step_ = 1.0;
  std::vector<double> table_;
};

// Visit candidate pairs within `cutoff` (all pairs when the cutoff spans the torus).
template <class Fn>
void visit_pairs(const PointCloud& cloud, double cutoff, Fn&& fn) {
  if (cloud.size() < 2) return;
  if (cutoff >= torus_diameter(cloud.dim)) {
    for_each_pair(cloud.coords, cloud.dim, fn);
    return;
  }
  CellGrid grid(cloud.coords, cloud.dim, std::clamp(0.5 * cutoff, 1e-9, 1.0));
  grid.for_each_pair_within(cutoff, fn);
}

inline bool edge_order(const Edge& a, const Edge& b) noexcept { return a.u != b.u ? a.u < b.u : a.v < b.v; }

}  // namespace detail

class GraphEngine {
 public:
  GraphEngine(ConnectionFunction g, int dim, EngineLimits limits = {}) : g_(g), dim_(dim), limits_(limits) {
    g_.validate(dim);
    alpha_ = g_.alpha(dim);
  }

  const ConnectionFunction& connection() const noexcept { return g_; }
  int dim() const noexcept { return dim_; }
  double alpha() const noexcept { return alpha_; }
  const EngineLimits& limits() const noexcept { return limits_; }

  GraphSnapshot build(const CoupledEnsemble& ens, double n, double r, const BuildMode& mode) const {
    return build(ens, ens.points_up_to(n), r, mode);
  }

  GraphSnapshot build(const CoupledEnsemble& ens, const PointCloud& cloud, double r, const BuildMode& mode) const {
    check_cloud(ens, cloud);
    if (!(r >= 0.0)) throw InvalidInput("build_graph: radius must be nonnegative");
    const std::size_t count = cloud.size();
    GraphSnapshot graph;
    graph.n_param = cloud.n;
    graph.radius = r;
    graph.vertex_count = count;
    graph.mode = mode.kind;
    graph.degrees.assign(count, 0);

    const Resolved plan = resolve(mode, count, r);
    graph.cutoff = plan.cutoff;
    graph.certified_bound = plan.bound;
    if (r == 0.0 || count < 2) return graph;

    // Pairs beyond r times the support radius never connect.
    const double scan = std::min(plan.cutoff, r * g_.support_radius());
    detail::EdgeTest test(g_, r, std::min(scan, torus_diameter(dim_)));
    const std::uint64_t key = ens.pair_key();
    detail::visit_pairs(cloud, scan, [&](std::uint32_t i, std::uint32_t j, double dist) {
      const double env = test.envelope(dist);
      if (env <= 0.0) return;
      const double u = CoupledEnsemble::uniform_for(key, cloud.label(i), cloud.label(j));
      if (u > env || !test.connects(dist, u)) return;
      graph.edges.push_back({i, j, dist});
    });
    std::sort(graph.edges.begin(), graph.edges.end(), detail::edge_order);
    for (const Edge& e : graph.edges) {
      ++graph.degrees[e.u];
      ++graph.degrees[e.v];
    }
    return graph;
  }

  // Pairs with critical radius <= cap among the mode's candidate pairs.
  std::vector<PairEvent> pair_events(const CoupledEnsemble& ens, const PointCloud& cloud, double cap,
                                     double cutoff) const {
    check_cloud(ens, cloud);
    std::vector<PairEvent> events;
    if (!(cap > 0.0)) return events;
    const double widened = std::isinf(cap) ? cap : cap * (1.0 + 1e-9);
    const double scan = std::min(cutoff, widened * g_.support_radius());
    detail::EdgeTest test(g_, widened, std::min(scan, torus_diameter(dim_)));
    const std::uint64_t key = ens.pair_key();
    detail::visit_pairs(cloud, scan, [&](std::uint32_t i, std::uint32_t j, double dist) {
      const double env = test.envelope(dist);
      if (env <= 0.0) return;
      const double u = CoupledEnsemble::uniform_for(key, cloud.label(i), cloud.label(j));
      if (u > env || !test.connects(dist, u)) return;
      const double rho = critical_radius(g_, dist, u);
      if (rho <= cap) events.push_back({i, j, dist, rho});
    });
    return events;
  }

  // d_n = inf{r > 0 : W_n(r) = 0} = max_i min_j rho_ij.
  ThresholdResult isolation_threshold(const CoupledEnsemble& ens, double n, const BuildMode& mode) const {
    return isolation_threshold(ens, ens.points_up_to(n), mode);
  }

  ThresholdResult isolation_threshold(const CoupledEnsemble& ens, const PointCloud& cloud, const BuildMode& mode) const {
    const std::size_t count = cloud.size();
    if (count < 2) throw InvalidInput("isolation_threshold: needs at least two vertices");
    double cap = initial_cap(cloud.n);
    std::vector<double> nearest(count);
    while (true) {
      const Resolved plan = resolve_for_threshold(mode, count, cap);
      std::fill(nearest.begin(), nearest.end(), infinity);
      for (const PairEvent& e : pair_events(ens, cloud, cap, plan.cutoff)) {
        nearest[e.i] = std::min(nearest[e.i], e.critical_radius);
        nearest[e.j] = std::min(nearest[e.j], e.critical_radius);
      }
      const double worst = *std::max_element(nearest.begin(), nearest.end());
      if (worst <= cap) return finish(mode, count, worst, plan.cutoff);
      if (std::isinf(cap)) return {infinity, false, plan.cutoff, 0.0};
      cap = grow(cap);
    }
  }

  // Smallest r at which G_n(r) is connected: the MST bottleneck over rho.
  ThresholdResult connectivity_threshold(const CoupledEnsemble& ens, double n, const BuildMode& mode) const {
    return connectivity_threshold(ens, ens.points_up_to(n), mode);
  }

  ThresholdResult connectivity_threshold(const CoupledEnsemble& ens, const PointCloud& cloud,
                                         const BuildMode& mode) const {
    const std::size_t count = cloud.size();
    if (count < 2) throw InvalidInput("connectivity_threshold: needs at least two vertices");
    double cap = initial_cap(cloud.n);
    while (true) {
      const Resolved plan = resolve_for_threshold(mode, count, cap);
      std::vector<PairEvent> events = pair_events(ens, cloud, cap, plan.cutoff);
      std::sort(events.begin(), events.end(), [](const PairEvent& a, const PairEvent& b) {
        if (a.critical_radius != b.critical_radius) return a.critical_radius < b.critical_radius;
        return a.i != b.i ? a.i < b.i : a.j < b.j;
      });
      DisjointSet sets(count);
      double bottleneck = 0.0;
      for (const PairEvent& e : events) {
        if (sets.unite(e.i, e.j)) bottleneck = e.critical_radius;
        if (sets.components() == 1) break;
      }
      if (sets.components() == 1) return finish(mode, count, bottleneck, plan.cutoff);
      if (std::isinf(cap)) return {infinity, false, plan.cutoff, 0.0};
      cap = grow(cap);
    }
  }

  struct IncidentEdges {
    std::uint32_t degree = 0;
    double longest = 0.0;
  };

  // Edges of G(r) at one vertex by a direct scan over all other vertices.
  IncidentEdges incident_edges(const CoupledEnsemble& ens, const PointCloud& cloud, double r,
                               std::size_t vertex) const {
    check_cloud(ens, cloud);
    if (vertex >= cloud.size()) throw InvalidInput("incident_edges: vertex out of range");
    IncidentEdges out;
    if (!(r > 0.0)) return out;
    detail::EdgeTest test(g_, r, torus_diameter(dim_));
    const std::uint64_t key = ens.pair_key();
    const double* x = cloud.coords.data() + vertex * dim_;
    for (std::size_t j = 0; j < cloud.size(); ++j) {
      if (j == vertex) continue;
      const double dist = std::sqrt(rcm::detail::torus_dist_sq(x, cloud.coords.data() + j * dim_, dim_));
      const double env = test.envelope(dist);
      if (env <= 0.0) continue;
      const double u = CoupledEnsemble::uniform_for(key, cloud.label(vertex), cloud.label(j));
      if (u > env || !test.connects(dist, u)) continue;
      ++out.degree;
      out.longest = std::max(out.longest, dist);
    }
    return out;
  }

 private:
  struct Resolved {
    double cutoff;
    double bound;
  };

  void check_cloud(const CoupledEnsemble& ens, const PointCloud& cloud) const {
    if (cloud.dim != dim_ || ens.dim() != dim_) throw InvalidInput("ensemble dimension does not match the engine");
  }

  void check_exact(std::size_t count) const {
    if (count > limits_.exact_vertex_limit)
      throw InvalidInput("exact mode is limited to " + std::to_string(limits_.exact_vertex_limit) +
                         " vertices (got " + std::to_string(count) + "); use truncated mode");
  }

  Resolved resolve(const BuildMode& mode, std::size_t count, double r) const {
    if (mode.kind == BuildKind::exact) {
      check_exact(count);
      return {infinity, 0.0};
    }
    if (mode.cutoff > 0.0) {
      if (mode.cutoff > torus_diameter(dim_)) throw InvalidInput("truncation cutoff exceeds sqrt(d)/2");
      const double bound = truncation_bound(count, r, mode.cutoff, g_, dim_);
      if (bound > mode.epsilon)
        throw TruncationRefused(bound, mode.epsilon, admissible_cutoff(count, r, mode.epsilon, g_, dim_));
      return {mode.cutoff, bound};
    }
    const double cutoff = admissible_cutoff(count, r, mode.epsilon, g_, dim_);
    return {cutoff, truncation_bound(count, r, cutoff, g_, dim_)};
  }

  Resolved resolve_for_threshold(const BuildMode& mode, std::size_t count, double cap) const {
    if (mode.kind == BuildKind::exact) {
      check_exact(count);
      return {infinity, 0.0};
    }
    if (mode.cutoff > 0.0) return {mode.cutoff, 0.0};
    return {admissible_cutoff(count, cap, mode.epsilon, g_, dim_), 0.0};
  }

  // Certificate at the threshold itself; the bound is increasing in r.
  ThresholdResult finish(const BuildMode& mode, std::size_t count, double value, double cutoff) const {
    ThresholdResult out{value, true, cutoff, 0.0};
    if (mode.kind == BuildKind::truncated) {
      out.certified_bound = truncation_bound(count, value, cutoff, g_, dim_);
      if (out.certified_bound > mode.epsilon)
        throw TruncationRefused(out.certified_bound, mode.epsilon,
                                admissible_cutoff(count, value, mode.epsilon, g_, dim_));
    }
    return out;
  }

  // Radius where the expected isolated count is e^-6: usually above d_n.
  double initial_cap(double n) const {
    const double m = std::max(n, 3.0);
    return std::pow((std::log(m) + 6.0) / (alpha_ * m), 1.0 / dim_);
  }

  double grow(double cap) const { return cap > 1e6 * torus_diameter(dim_) ? infinity : cap * 4.0; }

  ConnectionFunction g_;
  int dim_;
  EngineLimits limits_;
  double alpha_;
};

inline std::size_t isolated_count(const GraphSnapshot& graph) {
  return static_cast<std::size_t>(std::count(graph.degrees.begin(), graph.degrees.end(), 0u));
}

inline DegreeStats degree_stats(const GraphSnapshot& graph, const std::vector<std::size_t>& levels = {}) {
  DegreeStats stats;
  if (!graph.degrees.empty()) {
    auto [lo, hi] = std::minmax_element(graph.degrees.begin(), graph.degrees.end());
    stats.min_degree = *lo;
    stats.max_degree = *hi;
  }
  stats.tail_counts.reserve(levels.size());
  for (std::size_t k : levels)
    stats.tail_counts.push_back(static_cast<std::size_t>(
        std::count_if(graph.degrees.begin(), graph.degrees.end(), [k](std::uint32_t deg) { return deg >= k; })));
  return stats;
}

inline double longest_edge(const GraphSnapshot& graph) {
  double longest = 0.0;
  for (const Edge& e : graph.edges) longest = std::max(longest, e.length);
  return longest;
}

inline double longest_edge_at(const GraphSnapshot& graph, std::size_t vertex) {
  if (vertex >= graph.vertex_count) throw InvalidInput("longest_edge_at: vertex out of range");
  double longest = 0.0;
  for (const Edge& e : graph.edges)
    if (e.u == vertex || e.v == vertex) longest = std::max(longest, e.length);
  return longest;
}

inline std::size_t component_count(const GraphSnapshot& graph) {
  DisjointSet sets(graph.vertex_count);
  for (const Edge& e : graph.edges) sets.unite(e.u, e.v);
  return sets.components();
}

inline bool is_connected(const GraphSnapshot& graph) { return component_count(graph) <= 1; }

}  // namespace rcm
