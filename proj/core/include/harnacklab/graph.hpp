#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hlab {

using Vertex = std::size_t;

struct Edge {
  Vertex u = 0;
  Vertex v = 0;
  double weight = 1.0;  // conductance w_e > 0
  double length = 1.0;  // metric length l_e > 0
};

struct Neighbor {
  Vertex vertex = 0;
  double weight = 1.0;
  double length = 1.0;
  std::size_t edge = 0;
};

/// Finite connected weighted graph: the carrier of the discrete Dirichlet form
/// E(f,f) = sum_e w_e (f(u) - f(v))^2.
///
/// Vertices are dense indices 0..size()-1; each may carry an external integer
/// label (the id used in graph files). Construction validates the invariants:
/// positive weights and lengths, no self-loops, no parallel edges, connected.
class WeightedGraph {
 public:
  WeightedGraph(std::size_t vertex_count, std::vector<Edge> edges,
                std::vector<std::int64_t> labels = {});

  std::size_t size() const noexcept { return vertex_weight_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  std::span<const Edge> edges() const noexcept { return edges_; }

  std::span<const Neighbor> neighbors(Vertex v) const {
    return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
  }
  std::size_t degree(Vertex v) const { return offsets_[v + 1] - offsets_[v]; }

  /// w_x = sum of incident edge weights.
  double vertex_weight(Vertex v) const { return vertex_weight_[v]; }
  std::span<const double> vertex_weights() const noexcept { return vertex_weight_; }

  /// Weight of edge {u,v}, or 0 when u and v are not adjacent.
  double weight_between(Vertex u, Vertex v) const;

  std::int64_t label(Vertex v) const { return labels_[v]; }
  std::span<const std::int64_t> labels() const noexcept { return labels_; }
  std::optional<Vertex> find_label(std::int64_t label) const;

  double min_edge_length() const noexcept { return min_length_; }
  std::size_t max_degree() const noexcept;

  /// Same topology and lengths with the given per-edge weights (edge order).
  WeightedGraph with_edge_weights(std::span<const double> weights) const;
  /// Every edge weight multiplied by `factor`.
  WeightedGraph scaled(double factor) const;

  /// Recomputes every w_x from the edge list and compares against the cache.
  bool vertex_weights_consistent(double tolerance = 0.0) const;

 private:
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_;
  std::vector<Neighbor> adjacency_;
  std::vector<double> vertex_weight_;
  std::vector<std::int64_t> labels_;
  double min_length_ = 0.0;
};

/// Sorted, deduplicated copy of a vertex list.
std::vector<Vertex> normalized_set(std::span<const Vertex> vertices);

/// Vertices outside `domain` adjacent to some vertex of `domain` (sorted).
std::vector<Vertex> outer_boundary(const WeightedGraph& g, std::span<const Vertex> domain);

/// Connected components of the subgraph induced by `subset`, each sorted.
std::vector<std::vector<Vertex>> induced_components(const WeightedGraph& g,
                                                    std::span<const Vertex> subset);

// ---------------------------------------------------------------------------
// Generators

enum class GraphKind {
  path,
  cycle,
  star,
  lattice2d,
  sierpinski_gasket_graph,
  spherically_symmetric_tree,
  graph_join,
};

/// Parameters of a deterministic generator. Only the fields relevant to the
/// kind are read.
struct GeneratorSpec {
  GraphKind kind = GraphKind::path;
  std::size_t size = 1;                  // path/cycle length, lattice side, star arms, gasket level
  std::vector<std::size_t> degrees;      // children per level for trees
  std::optional<std::size_t> depth;      // tree depth (default: kDefaultTreeDepth)
  std::vector<double> weights;           // optional per-edge weights (edge order)
  std::vector<GeneratorSpec> parts;      // the two pieces of a graph_join

  static constexpr std::size_t kDefaultTreeDepth = 17;
};

WeightedGraph make_path(std::size_t n);
WeightedGraph make_cycle(std::size_t n);
/// Star with `arms` leaves; `weights` (optional) gives the center-leaf weights.
WeightedGraph make_star(std::size_t arms, std::span<const double> weights = {});
WeightedGraph make_lattice2d(std::size_t n);
/// Sierpinski gasket graph of the given level, vertex 0 at the apex corner.
WeightedGraph make_sierpinski_gasket(std::size_t level);
/// Spherically symmetric tree: a vertex at depth k has degrees[k] children
/// (1 child once the list is exhausted). Vertex 0 is the root; vertices are
/// numbered level by level.
WeightedGraph make_spherical_tree(std::span<const std::size_t> degrees, std::size_t depth);
/// Glues two graphs by identifying their vertex 0. The shared vertex is 0 in
/// the result, the first graph keeps its indices and the second follows.
WeightedGraph make_join(const WeightedGraph& first, const WeightedGraph& second);

/// Level sizes of make_spherical_tree(degrees, depth).
std::vector<std::size_t> spherical_tree_level_sizes(std::span<const std::size_t> degrees,
                                                    std::size_t depth);

WeightedGraph generate(const GeneratorSpec& spec);

/// Parses specs such as "path:9", "lattice2d:33", "sst:2,3,4,5",
/// "sst:2,3,4,5/20" (explicit depth), "gasket:4", "star:3",
/// "join:gasket:3+lattice2d:5".
GeneratorSpec parse_generator_spec(const std::string& text);
std::string format_generator_spec(const GeneratorSpec& spec);

/// The natural center of a generated graph: the lattice/path midpoint and
/// vertex 0 for every other kind.
Vertex natural_center(const GeneratorSpec& spec);

/// Cable-system refinement: every edge (w, l) becomes k edges of weight k*w
/// and length l/k. Original vertices keep their indices; interior points
/// follow, edge by edge.
WeightedGraph subdivide_edges(const WeightedGraph& g, std::size_t k);

// ---------------------------------------------------------------------------
// Text format: "v <id>" and "e <id1> <id2> <weight> <length>", '#' comments.

WeightedGraph read_graph(std::istream& in);
WeightedGraph read_graph_file(const std::string& path);
void write_graph(std::ostream& out, const WeightedGraph& g);

}  // namespace hlab
