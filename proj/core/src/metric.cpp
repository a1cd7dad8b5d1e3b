#include "harnacklab/metric.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>

#include "harnacklab/errors.hpp"
#include "harnacklab/parallel.hpp"

namespace hlab {

std::vector<double> dijkstra(const WeightedGraph& g, Vertex source) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(g.size(), inf);
  using Item = std::pair<double, Vertex>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[source] = 0.0;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    auto [d, v] = heap.top();
    heap.pop();
    if (d > dist[v]) continue;
    for (const Neighbor& nb : g.neighbors(v)) {
      const double nd = d + nb.length;
      if (nd < dist[nb.vertex]) {
        dist[nb.vertex] = nd;
        heap.emplace(nd, nb.vertex);
      }
    }
  }
  return dist;
}

MetricGraph::MetricGraph(WeightedGraph g)
    : graph_(std::move(g)), rows_(graph_.size()), once_(new std::once_flag[graph_.size()]) {
  if (graph_.size() <= kEagerLimit) {
    parallel_for(graph_.size(), [&](std::size_t x) { distances_from(x); });
  }
}

MetricGraph::MetricGraph(MetricGraph&&) noexcept = default;
MetricGraph& MetricGraph::operator=(MetricGraph&&) noexcept = default;
MetricGraph::~MetricGraph() = default;

const std::vector<double>& MetricGraph::distances_from(Vertex x) const {
  std::call_once(once_[x], [&] { rows_[x] = dijkstra(graph_, x); });
  return rows_[x];
}

std::vector<Vertex> MetricGraph::ball(Vertex x, double r, BallKind kind) const {
  const auto& d = distances_from(x);
  std::vector<Vertex> out;
  for (Vertex y = 0; y < d.size(); ++y)
    if (kind == BallKind::open ? d[y] < r - kDistTol : d[y] <= r + kDistTol) out.push_back(y);
  return out;
}

bool MetricGraph::in_ball(Vertex x, double r, Vertex y, BallKind kind) const {
  const double d = distance(x, y);
  return kind == BallKind::open ? d < r - kDistTol : d <= r + kDistTol;
}

double MetricGraph::eccentricity(Vertex x) const {
  const auto& d = distances_from(x);
  return *std::max_element(d.begin(), d.end());
}

double MetricGraph::diameter() const {
  double best = 0.0;
  for (Vertex x = 0; x < size(); ++x) best = std::max(best, eccentricity(x));
  return best;
}

std::vector<Vertex> set_union(std::span<const Vertex> a, std::span<const Vertex> b) {
  std::vector<Vertex> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<Vertex> set_difference(std::span<const Vertex> a, std::span<const Vertex> b) {
  std::vector<Vertex> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool is_subset(std::span<const Vertex> inner, std::span<const Vertex> outer) {
  return std::includes(outer.begin(), outer.end(), inner.begin(), inner.end());
}

Net epsilon_net(const MetricGraph& mg, double eps, std::span<const Vertex> region,
                std::span<const Vertex> seeds) {
  if (!(eps > 0.0)) throw ParameterError("net scale must be positive");
  std::vector<char> allowed(mg.size(), region.empty() ? 1 : 0);
  for (Vertex v : region) allowed[v] = 1;
  Net net{eps, {}};
  std::vector<char> taken(mg.size(), 0);
  auto offer = [&](Vertex v) {
    if (!allowed[v] || taken[v]) return;
    for (Vertex p : net.points)
      if (mg.distance(p, v) < eps - kDistTol) return;
    taken[v] = 1;
    net.points.push_back(v);
  };
  for (Vertex s : seeds) offer(s);
  for (Vertex v = 0; v < mg.size(); ++v) offer(v);
  return net;
}

bool net_is_separated(const MetricGraph& mg, const Net& net) {
  for (std::size_t i = 0; i < net.points.size(); ++i)
    for (std::size_t j = i + 1; j < net.points.size(); ++j)
      if (mg.distance(net.points[i], net.points[j]) < net.scale - kDistTol) return false;
  return true;
}

bool net_is_covering(const MetricGraph& mg, const Net& net, std::span<const Vertex> region) {
  auto covered = [&](Vertex v) {
    for (Vertex p : net.points)
      if (mg.distance(p, v) < net.scale - kDistTol) return true;
    return false;
  };
  if (region.empty()) {
    for (Vertex v = 0; v < mg.size(); ++v)
      if (!covered(v)) return false;
  } else {
    for (Vertex v : region)
      if (!covered(v)) return false;
  }
  return true;
}

namespace {

struct Packing {
  std::vector<Vertex> points;
  bool exact = true;
};

Packing max_packing(const MetricGraph& mg, std::span<const Vertex> ball, double sep) {
  Packing best;
  const std::size_t m = ball.size();
  if (m <= kExhaustivePackingLimit) {
    std::vector<std::uint32_t> conflict(m, 0);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        if (i != j && mg.distance(ball[i], ball[j]) < sep - kDistTol) conflict[i] |= 1u << j;
    std::uint32_t best_mask = 0;
    int best_count = 0;
    for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
      const int count = std::popcount(mask);
      if (count <= best_count) continue;
      bool ok = true;
      for (std::size_t i = 0; i < m && ok; ++i)
        if ((mask >> i & 1u) && (conflict[i] & mask)) ok = false;
      if (ok) {
        best_mask = mask;
        best_count = count;
      }
    }
    for (std::size_t i = 0; i < m; ++i)
      if (best_mask >> i & 1u) best.points.push_back(ball[i]);
    return best;
  }
  best.exact = false;
  for (Vertex v : ball) {
    bool ok = true;
    for (Vertex p : best.points)
      if (mg.distance(p, v) < sep - kDistTol) {
        ok = false;
        break;
      }
    if (ok) best.points.push_back(v);
  }
  return best;
}

}  // namespace

DoublingReport metric_doubling_report(const MetricGraph& mg, std::span<const double> radii) {
  DoublingReport report;
  for (double r : radii) {
    if (!(r > 0.0)) throw ParameterError("radii must be positive");
    std::vector<Packing> per_center(mg.size());
    parallel_for(mg.size(), [&](std::size_t x) {
      per_center[x] = max_packing(mg, mg.ball(x, r), r / 2.0);
    });
    PackingCell cell;
    cell.radius = r;
    for (Vertex x = 0; x < mg.size(); ++x) {
      if (!per_center[x].exact) cell.lower_bound_only = true;
      if (per_center[x].points.size() > cell.max_packing) {
        cell.max_packing = per_center[x].points.size();
        cell.witness_center = x;
        cell.witness_points = per_center[x].points;
      }
    }
    report.cells.push_back(std::move(cell));
  }
  if (report.cells.size() >= 2) {
    auto by_radius = report.cells;
    std::sort(by_radius.begin(), by_radius.end(),
              [](const PackingCell& a, const PackingCell& b) { return a.radius < b.radius; });
    report.grows_with_r = by_radius.back().max_packing > by_radius.front().max_packing;
  }
  return report;
}

PerfectnessReport uniform_perfectness_report(const MetricGraph& mg, double C) {
  if (!(C > 1.0)) throw ParameterError("perfectness constant must exceed 1");
  PerfectnessReport report;
  report.C = C;
  const double diam = mg.diameter();
  const double unit = mg.graph().min_edge_length();
  for (Vertex x = 0; x < mg.size(); ++x) {
    const auto& d = mg.distances_from(x);
    for (double r = 2.0 * unit; r <= diam + kDistTol; r *= 2.0) {
      double inner_max = 0.0;
      bool exterior = false;
      for (double dy : d) {
        if (dy < r - kDistTol) inner_max = std::max(inner_max, dy);
        else exterior = true;
      }
      if (!exterior) continue;
      ++report.cells_checked;
      const double needed = inner_max > 0.0 ? r / inner_max : std::numeric_limits<double>::infinity();
      if (needed > report.smallest_passing_C) {
        report.smallest_passing_C = needed;
        report.worst_center = x;
        report.worst_radius = r;
      }
    }
  }
  // B(x,r) \ B(x,r/C) != {} iff some y has r/C <= d(x,y) < r, i.e. C >= r / max d.
  report.pass = report.smallest_passing_C <= C + kDistTol;
  return report;
}

ControlledWeights controlled_weights_report(const WeightedGraph& g) {
  ControlledWeights out;
  out.p0 = std::numeric_limits<double>::infinity();
  for (Vertex x = 0; x < g.size(); ++x)
    for (const Neighbor& nb : g.neighbors(x)) {
      const double p = nb.weight / g.vertex_weight(x);
      if (p < out.p0) out = {p, x, nb.vertex};
    }
  if (!std::isfinite(out.p0)) out.p0 = 1.0;
  return out;
}

MetricAxiomReport check_metric_axioms(std::span<const double> d, std::size_t n, double tol) {
  MetricAxiomReport rep;
  auto at = [&](std::size_t i, std::size_t j) { return d[i * n + j]; };
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(at(i, i)) > tol) rep.identity_ok = false;
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && !(at(i, j) > tol)) rep.identity_ok = false;
      rep.worst_asymmetry = std::max(rep.worst_asymmetry, std::abs(at(i, j) - at(j, i)));
      for (std::size_t k = 0; k < n; ++k)
        rep.worst_triangle_violation = std::max(rep.worst_triangle_violation, at(i, j) - at(i, k) - at(k, j));
    }
  }
  const double scale = std::max(1.0, *std::max_element(d.begin(), d.end()));
  rep.ok = rep.identity_ok && rep.worst_asymmetry <= tol * scale && rep.worst_triangle_violation <= tol * scale;
  return rep;
}

}  // namespace hlab
