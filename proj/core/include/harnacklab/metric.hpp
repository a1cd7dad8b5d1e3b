#pragma once

#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "harnacklab/graph.hpp"

namespace hlab {

/// Slack used in every comparison of path lengths.
inline constexpr double kDistTol = 1e-9;

enum class BallKind { open, closed };

/// A weighted graph together with its shortest-path metric. Rows of the
/// distance matrix are computed with Dijkstra; for graphs up to
/// kEagerLimit vertices all rows are filled at construction (in parallel),
/// larger graphs fill rows lazily.
class MetricGraph {
 public:
  static constexpr std::size_t kEagerLimit = 2000;

  explicit MetricGraph(WeightedGraph g);
  MetricGraph(MetricGraph&&) noexcept;
  MetricGraph& operator=(MetricGraph&&) noexcept;
  ~MetricGraph();

  const WeightedGraph& graph() const noexcept { return graph_; }
  std::size_t size() const noexcept { return graph_.size(); }

  const std::vector<double>& distances_from(Vertex x) const;
  double distance(Vertex x, Vertex y) const { return distances_from(x)[y]; }

  /// B(x,r) = {y : d(x,y) < r} (open) or {y : d(x,y) <= r} (closed), sorted.
  std::vector<Vertex> ball(Vertex x, double r, BallKind kind = BallKind::open) const;
  bool in_ball(Vertex x, double r, Vertex y, BallKind kind = BallKind::open) const;

  double eccentricity(Vertex x) const;
  double diameter() const;

 private:
  WeightedGraph graph_;
  mutable std::vector<std::vector<double>> rows_;
  mutable std::unique_ptr<std::once_flag[]> once_;
};

/// Single-source shortest paths (Dijkstra on edge lengths).
std::vector<double> dijkstra(const WeightedGraph& g, Vertex source);

std::vector<Vertex> set_union(std::span<const Vertex> a, std::span<const Vertex> b);
std::vector<Vertex> set_difference(std::span<const Vertex> a, std::span<const Vertex> b);
bool is_subset(std::span<const Vertex> inner, std::span<const Vertex> outer);

// ---------------------------------------------------------------------------
// Nets

struct Net {
  double scale = 0.0;
  std::vector<Vertex> points;  // in selection order
};

/// Greedy maximal eps-separated subset of `region` (all vertices when empty).
/// Seeds are offered first in the given order, then the remaining vertices in
/// ascending index. A candidate is accepted when it lies at distance >= eps
/// from every accepted point.
Net epsilon_net(const MetricGraph& mg, double eps, std::span<const Vertex> region = {},
                std::span<const Vertex> seeds = {});

bool net_is_separated(const MetricGraph& mg, const Net& net);
/// Every vertex of `region` is at distance < eps from some net point.
bool net_is_covering(const MetricGraph& mg, const Net& net, std::span<const Vertex> region = {});

// ---------------------------------------------------------------------------
// Purely metric reports

struct PackingCell {
  double radius = 0.0;
  std::size_t max_packing = 0;   // max over centers
  Vertex witness_center = 0;
  std::vector<Vertex> witness_points;
  bool lower_bound_only = false;  // some center needed the greedy bound
};

struct DoublingReport {
  std::vector<PackingCell> cells;
  bool grows_with_r = false;  // packing count strictly larger at the largest radius than at the smallest
};

/// For each radius r: the largest number of points of B(x,r) pairwise >= r/2
/// apart, maximized over centers x. Balls with at most kExhaustiveLimit points
/// are searched exhaustively; larger balls use a greedy lower bound.
DoublingReport metric_doubling_report(const MetricGraph& mg, std::span<const double> radii);
inline constexpr std::size_t kExhaustivePackingLimit = 12;

struct PerfectnessReport {
  double C = 0.0;
  bool pass = true;
  double smallest_passing_C = 1.0;
  Vertex worst_center = 0;
  double worst_radius = 0.0;
  std::size_t cells_checked = 0;
};

/// Checks B(x,r) \ B(x,r/C) != {} for every x and dyadic r = 2, 4, ... up to
/// the diameter with X \ B(x,r) nonempty.
PerfectnessReport uniform_perfectness_report(const MetricGraph& mg, double C);

struct ControlledWeights {
  double p0 = 1.0;
  Vertex x = 0;
  Vertex y = 0;
};
ControlledWeights controlled_weights_report(const WeightedGraph& g);

struct MetricAxiomReport {
  bool ok = true;
  double worst_triangle_violation = 0.0;
  double worst_asymmetry = 0.0;
  bool identity_ok = true;
};
/// Exhaustive check of a dense distance matrix (row-major n x n).
MetricAxiomReport check_metric_axioms(std::span<const double> d, std::size_t n, double tol = kDistTol);

}  // namespace hlab
