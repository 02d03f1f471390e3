#pragma once

// Brute-force reference computations on small instances. Everything here
// evaluates U_ij <= g(d(X_i, X_j) / r) pair by pair and never touches
// critical radii, cell grids, or truncation, so it can referee the engine.

#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "rcm/connection.hpp"
#include "rcm/ensemble.hpp"
#include "rcm/graph.hpp"
#include "rcm/theory.hpp"
#include "rcm/union_find.hpp"

namespace rcm::oracle {

using EdgeSet = std::set<std::pair<std::uint32_t, std::uint32_t>>;

inline EdgeSet direct_edges(const CoupledEnsemble& ens, const PointCloud& cloud, const ConnectionFunction& g, double r) {
  EdgeSet edges;
  if (!(r > 0.0)) return edges;
  for (std::size_t i = 0; i < cloud.size(); ++i)
    for (std::size_t j = i + 1; j < cloud.size(); ++j) {
      const double dist = toroidal_distance(cloud.point(i), cloud.point(j));
      const double u = ens.pair_uniform(cloud.label(i), cloud.label(j));
      if (u <= g(dist / r)) edges.emplace(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
    }
  return edges;
}

struct Recount {
  std::size_t isolated = 0;
  std::uint32_t max_degree = 0;
  std::uint32_t min_degree = 0;
  double longest = 0.0;
  bool connected = false;
};

inline Recount recount(const PointCloud& cloud, const EdgeSet& edges) {
  Recount out;
  std::vector<std::uint32_t> degree(cloud.size(), 0);
  DisjointSet sets(cloud.size());
  for (auto [i, j] : edges) {
    ++degree[i];
    ++degree[j];
    sets.unite(i, j);
    out.longest = std::max(out.longest, toroidal_distance(cloud.point(i), cloud.point(j)));
  }
  out.min_degree = degree.empty() ? 0 : degree[0];
  for (std::uint32_t deg : degree) {
    if (deg == 0) ++out.isolated;
    out.max_degree = std::max(out.max_degree, deg);
    out.min_degree = std::min(out.min_degree, deg);
  }
  out.connected = sets.components() <= 1;
  return out;
}

// Smallest r at which `holds(r)` becomes true, for a property monotone in r.
template <class Pred>
double threshold_by_bisection(Pred&& holds, double start) {
  double hi = start;
  while (!holds(hi)) {
    hi *= 2.0;
    if (hi > 1e12) return infinity;
  }
  double lo = 0.0;
  while (hi - lo > 1e-13 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (holds(mid))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

inline double isolation_threshold(const CoupledEnsemble& ens, const PointCloud& cloud, const ConnectionFunction& g) {
  return threshold_by_bisection(
      [&](double r) { return recount(cloud, direct_edges(ens, cloud, g, r)).isolated == 0; },
      torus_diameter(cloud.dim));
}

inline double connectivity_threshold(const CoupledEnsemble& ens, const PointCloud& cloud, const ConnectionFunction& g) {
  return threshold_by_bisection(
      [&](double r) { return recount(cloud, direct_edges(ens, cloud, g, r)).connected; },
      torus_diameter(cloud.dim));
}

inline bool close_relative(double a, double b, double tol) {
  if (std::isinf(a) || std::isinf(b)) return a == b;
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

struct Report {
  std::size_t checks = 0;
  std::size_t failures = 0;
  std::size_t edge_set_failures = 0;
  std::size_t isolation_failures = 0;
  std::size_t connectivity_failures = 0;
  std::size_t recount_failures = 0;
  std::vector<std::string> messages;  // first few failures
};

// Engine-vs-brute-force equivalence over `seeds` independent ensembles.
inline Report run_suite(const ConnectionFunction& g, int dim, std::size_t seeds, double n, std::uint64_t base_seed,
                        double tolerance = 1e-9) {
  Report report;
  GraphEngine engine(g, dim);
  const double alpha = g.alpha(dim);
  const double scale = theory::r_hat(std::max(n, 3.0), 1.0, alpha, dim);
  const double radii[] = {0.5 * scale, scale, 1.5 * scale, 2.0 * scale, 3.0 * scale};
  auto fail = [&](std::size_t& bucket, const std::string& what) {
    ++bucket;
    ++report.failures;
    if (report.messages.size() < 20) report.messages.push_back(what);
  };
  const CoupledEnsemble root(base_seed, dim);
  for (std::size_t s = 0; s < seeds; ++s) {
    const CoupledEnsemble ens = root.fork(s);
    const PointCloud cloud = ens.points_up_to(n);
    const std::string tag = g.name() + " seed#" + std::to_string(s);
    const auto events = engine.pair_events(ens, cloud, infinity, infinity);
    for (double r : radii) {
      const EdgeSet direct = direct_edges(ens, cloud, g, r);
      EdgeSet by_radius;
      for (const PairEvent& e : events)
        if (e.critical_radius <= r) by_radius.emplace(e.i, e.j);
      ++report.checks;
      if (by_radius != direct) fail(report.edge_set_failures, tag + ": critical-radius edge set differs at r=" + format_real(r));

      const GraphSnapshot graph = engine.build(ens, cloud, r, BuildMode::exact());
      const Recount want = recount(cloud, direct);
      ++report.checks;
      if (isolated_count(graph) != want.isolated || degree_stats(graph).max_degree != want.max_degree ||
          degree_stats(graph).min_degree != want.min_degree || longest_edge(graph) != want.longest ||
          graph.edges.size() != direct.size())
        fail(report.recount_failures, tag + ": W/degree/longest recount differs at r=" + format_real(r));
    }
    if (cloud.size() < 2) continue;
    ++report.checks;
    const double iso = engine.isolation_threshold(ens, cloud, BuildMode::exact()).value;
    const double iso_ref = isolation_threshold(ens, cloud, g);
    if (!close_relative(iso, iso_ref, tolerance))
      fail(report.isolation_failures, tag + ": isolation threshold " + format_real(iso) + " vs " + format_real(iso_ref));
    ++report.checks;
    const double conn = engine.connectivity_threshold(ens, cloud, BuildMode::exact()).value;
    const double conn_ref = connectivity_threshold(ens, cloud, g);
    if (!close_relative(conn, conn_ref, tolerance))
      fail(report.connectivity_failures, tag + ": connectivity threshold " + format_real(conn) + " vs " + format_real(conn_ref));
  }
  return report;
}

}  // namespace rcm::oracle
