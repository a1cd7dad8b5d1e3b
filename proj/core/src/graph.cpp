#include "harnacklab/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <utility>

#include "harnacklab/errors.hpp"

namespace hlab {

WeightedGraph::WeightedGraph(std::size_t vertex_count, std::vector<Edge> edges,
                             std::vector<std::int64_t> labels)
    : edges_(std::move(edges)), labels_(std::move(labels)) {
  if (vertex_count == 0) throw ParameterError("graph must have at least one vertex");
  if (labels_.empty()) {
    labels_.resize(vertex_count);
    std::iota(labels_.begin(), labels_.end(), std::int64_t{0});
  }
  if (labels_.size() != vertex_count) throw ParameterError("label count does not match vertex count");
  {
    std::vector<std::int64_t> sorted = labels_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw ParameterError("duplicate vertex label");
  }

  std::set<std::pair<Vertex, Vertex>> seen;
  std::vector<std::size_t> degree(vertex_count, 0);
  min_length_ = edges_.empty() ? 1.0 : std::numeric_limits<double>::infinity();
  for (const Edge& e : edges_) {
    if (e.u >= vertex_count || e.v >= vertex_count) throw ParameterError("edge endpoint out of range");
    if (e.u == e.v) throw ParameterError("self-loop at vertex " + std::to_string(e.u));
    if (!(e.weight > 0.0) || !std::isfinite(e.weight)) throw ParameterError("edge weight must be positive");
    if (!(e.length > 0.0) || !std::isfinite(e.length)) throw ParameterError("edge length must be positive");
    if (!seen.emplace(std::min(e.u, e.v), std::max(e.u, e.v)).second)
      throw ParameterError("parallel edge between " + std::to_string(e.u) + " and " + std::to_string(e.v));
    ++degree[e.u];
    ++degree[e.v];
    min_length_ = std::min(min_length_, e.length);
  }

  offsets_.assign(vertex_count + 1, 0);
  for (std::size_t v = 0; v < vertex_count; ++v) offsets_[v + 1] = offsets_[v] + degree[v];
  adjacency_.resize(offsets_.back());
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  vertex_weight_.assign(vertex_count, 0.0);
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const Edge& e = edges_[i];
    adjacency_[cursor[e.u]++] = {e.v, e.weight, e.length, i};
    adjacency_[cursor[e.v]++] = {e.u, e.weight, e.length, i};
    vertex_weight_[e.u] += e.weight;
    vertex_weight_[e.v] += e.weight;
  }
  for (std::size_t v = 0; v < vertex_count; ++v)
    std::sort(adjacency_.begin() + offsets_[v], adjacency_.begin() + offsets_[v + 1],
              [](const Neighbor& a, const Neighbor& b) { return a.vertex < b.vertex; });

  // connectivity
  std::vector<char> mark(vertex_count, 0);
  std::vector<Vertex> stack{0};
  mark[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    Vertex v = stack.back();
    stack.pop_back();
    for (const Neighbor& nb : neighbors(v))
      if (!mark[nb.vertex]) {
        mark[nb.vertex] = 1;
        ++reached;
        stack.push_back(nb.vertex);
      }
  }
  if (reached != vertex_count) throw TopologyError("graph is not connected");
}

double WeightedGraph::weight_between(Vertex u, Vertex v) const {
  auto nbs = neighbors(u);
  auto it = std::lower_bound(nbs.begin(), nbs.end(), v,
                             [](const Neighbor& a, Vertex x) { return a.vertex < x; });
  return (it != nbs.end() && it->vertex == v) ? it->weight : 0.0;
}

std::optional<Vertex> WeightedGraph::find_label(std::int64_t label) const {
  for (std::size_t v = 0; v < labels_.size(); ++v)
    if (labels_[v] == label) return v;
  return std::nullopt;
}

std::size_t WeightedGraph::max_degree() const noexcept {
  std::size_t d = 0;
  for (std::size_t v = 0; v < size(); ++v) d = std::max(d, degree(v));
  return d;
}

WeightedGraph WeightedGraph::with_edge_weights(std::span<const double> weights) const {
  if (weights.size() != edges_.size()) throw ParameterError("weight vector size does not match edge count");
  std::vector<Edge> edges = edges_;
  for (std::size_t i = 0; i < edges.size(); ++i) edges[i].weight = weights[i];
  return WeightedGraph(size(), std::move(edges), labels_);
}

WeightedGraph WeightedGraph::scaled(double factor) const {
  if (!(factor > 0.0)) throw ParameterError("scale factor must be positive");
  std::vector<double> w(edges_.size());
  for (std::size_t i = 0; i < edges_.size(); ++i) w[i] = edges_[i].weight * factor;
  return with_edge_weights(w);
}

bool WeightedGraph::vertex_weights_consistent(double tolerance) const {
  std::vector<double> rebuilt(size(), 0.0);
  for (const Edge& e : edges_) {
    rebuilt[e.u] += e.weight;
    rebuilt[e.v] += e.weight;
  }
  for (std::size_t v = 0; v < size(); ++v)
    if (std::abs(rebuilt[v] - vertex_weight_[v]) > tolerance) return false;
  return true;
}

std::vector<Vertex> normalized_set(std::span<const Vertex> vertices) {
  std::vector<Vertex> out(vertices.begin(), vertices.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<Vertex> outer_boundary(const WeightedGraph& g, std::span<const Vertex> domain) {
  std::vector<char> in(g.size(), 0), bd(g.size(), 0);
  for (Vertex v : domain) in[v] = 1;
  for (Vertex v : domain)
    for (const Neighbor& nb : g.neighbors(v))
      if (!in[nb.vertex]) bd[nb.vertex] = 1;
  std::vector<Vertex> out;
  for (Vertex v = 0; v < g.size(); ++v)
    if (bd[v]) out.push_back(v);
  return out;
}

std::vector<std::vector<Vertex>> induced_components(const WeightedGraph& g,
                                                    std::span<const Vertex> subset) {
  std::vector<char> in(g.size(), 0), mark(g.size(), 0);
  for (Vertex v : subset) in[v] = 1;
  std::vector<std::vector<Vertex>> comps;
  for (Vertex s : normalized_set(subset)) {
    if (mark[s]) continue;
    std::vector<Vertex> comp{s}, stack{s};
    mark[s] = 1;
    while (!stack.empty()) {
      Vertex v = stack.back();
      stack.pop_back();
      for (const Neighbor& nb : g.neighbors(v))
        if (in[nb.vertex] && !mark[nb.vertex]) {
          mark[nb.vertex] = 1;
          comp.push_back(nb.vertex);
          stack.push_back(nb.vertex);
        }
    }
    std::sort(comp.begin(), comp.end());
    comps.push_back(std::move(comp));
  }
  return comps;
}

WeightedGraph subdivide_edges(const WeightedGraph& g, std::size_t k) {
  if (k == 0) throw ParameterError("subdivision factor must be at least 1");
  if (k == 1) return g;
  std::vector<Edge> edges;
  std::vector<std::int64_t> labels(g.labels().begin(), g.labels().end());
  std::int64_t next_label = *std::max_element(labels.begin(), labels.end()) + 1;
  std::size_t n = g.size();
  const double kk = static_cast<double>(k);
  for (const Edge& e : g.edges()) {
    Vertex prev = e.u;
    for (std::size_t j = 1; j < k; ++j) {
      Vertex mid = n++;
      labels.push_back(next_label++);
      edges.push_back({prev, mid, e.weight * kk, e.length / kk});
      prev = mid;
    }
    edges.push_back({prev, e.v, e.weight * kk, e.length / kk});
  }
  return WeightedGraph(n, std::move(edges), std::move(labels));
}

}  // namespace hlab
