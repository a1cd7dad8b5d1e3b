#include <algorithm>
#include <array>
#include <charconv>
#include <map>
#include <sstream>
#include <utility>

#include "harnacklab/errors.hpp"
#include "harnacklab/graph.hpp"

namespace hlab {

namespace {

std::size_t parse_count(const std::string& s, const std::string& what) {
  std::size_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw ParameterError("invalid " + what + ": '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

WeightedGraph make_path(std::size_t n) {
  if (n == 0) throw ParameterError("path needs at least one vertex");
  std::vector<Edge> edges;
  for (std::size_t i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1});
  return WeightedGraph(n, std::move(edges));
}

WeightedGraph make_cycle(std::size_t n) {
  if (n < 3) throw ParameterError("cycle needs at least three vertices");
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n});
  return WeightedGraph(n, std::move(edges));
}

WeightedGraph make_star(std::size_t arms, std::span<const double> weights) {
  if (arms == 0) throw ParameterError("star needs at least one arm");
  if (!weights.empty() && weights.size() != arms) throw ParameterError("star weights must match arm count");
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < arms; ++i) edges.push_back({0, i + 1, weights.empty() ? 1.0 : weights[i]});
  return WeightedGraph(arms + 1, std::move(edges));
}

WeightedGraph make_lattice2d(std::size_t n) {
  if (n == 0) throw ParameterError("lattice side must be at least 1");
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t v = i * n + j;
      if (j + 1 < n) edges.push_back({v, v + 1});
      if (i + 1 < n) edges.push_back({v, v + n});
    }
  return WeightedGraph(n * n, std::move(edges));
}

WeightedGraph make_sierpinski_gasket(std::size_t level) {
  if (level > 12) throw ParameterError("gasket level too large");
  const std::size_t side = std::size_t{1} << level;
  // Triangular coordinates (i, j); unit up-triangles sit at (a, b) with a & b == 0.
  std::map<std::pair<std::size_t, std::size_t>, Vertex> index;
  std::vector<std::pair<std::size_t, std::size_t>> points;
  auto key = [](std::size_t i, std::size_t j) { return std::make_pair(i + j, i); };
  std::vector<std::array<std::pair<std::size_t, std::size_t>, 3>> triangles;
  for (std::size_t a = 0; a < side; ++a)
    for (std::size_t b = 0; a + b < side; ++b)
      if ((a & b) == 0) triangles.push_back({{{a, b}, {a + 1, b}, {a, b + 1}}});
  std::map<std::pair<std::size_t, std::size_t>, std::pair<std::size_t, std::size_t>> ordered;
  for (const auto& t : triangles)
    for (const auto& p : t) ordered.emplace(key(p.first, p.second), p);
  for (const auto& [k, p] : ordered) {
    index.emplace(p, points.size());
    points.push_back(p);
  }
  std::vector<Edge> edges;
  for (const auto& t : triangles)
    for (int s = 0; s < 3; ++s) {
      Vertex u = index.at(t[s]), v = index.at(t[(s + 1) % 3]);
      edges.push_back({std::min(u, v), std::max(u, v)});
    }
  return WeightedGraph(points.size(), std::move(edges));
}

std::vector<std::size_t> spherical_tree_level_sizes(std::span<const std::size_t> degrees,
                                                    std::size_t depth) {
  std::vector<std::size_t> sizes{1};
  for (std::size_t k = 0; k < depth; ++k) {
    const std::size_t d = k < degrees.size() ? degrees[k] : 1;
    sizes.push_back(sizes.back() * d);
    if (sizes.back() > 5'000'000) throw ParameterError("spherically symmetric tree too large");
  }
  return sizes;
}

WeightedGraph make_spherical_tree(std::span<const std::size_t> degrees, std::size_t depth) {
  for (std::size_t d : degrees)
    if (d == 0) throw ParameterError("tree degrees must be at least 1");
  const auto sizes = spherical_tree_level_sizes(degrees, depth);
  std::vector<Edge> edges;
  std::size_t level_start = 0, next = 1;
  for (std::size_t k = 0; k < depth; ++k) {
    const std::size_t d = k < degrees.size() ? degrees[k] : 1;
    for (std::size_t p = 0; p < sizes[k]; ++p)
      for (std::size_t c = 0; c < d; ++c) edges.push_back({level_start + p, next++});
    level_start += sizes[k];
  }
  return WeightedGraph(next, std::move(edges));
}

WeightedGraph make_join(const WeightedGraph& first, const WeightedGraph& second) {
  std::vector<Edge> edges(first.edges().begin(), first.edges().end());
  const std::size_t offset = first.size() - 1;
  auto remap = [&](Vertex v) { return v == 0 ? Vertex{0} : v + offset; };
  for (const Edge& e : second.edges()) edges.push_back({remap(e.u), remap(e.v), e.weight, e.length});
  return WeightedGraph(first.size() + second.size() - 1, std::move(edges));
}

WeightedGraph generate(const GeneratorSpec& spec) {
  WeightedGraph g = [&] {
    switch (spec.kind) {
      case GraphKind::path: return make_path(spec.size);
      case GraphKind::cycle: return make_cycle(spec.size);
      case GraphKind::star: return make_star(spec.size);
      case GraphKind::lattice2d: return make_lattice2d(spec.size);
      case GraphKind::sierpinski_gasket_graph: return make_sierpinski_gasket(spec.size);
      case GraphKind::spherically_symmetric_tree:
        if (spec.degrees.empty()) throw ParameterError("tree needs a degree sequence");
        return make_spherical_tree(spec.degrees, spec.depth.value_or(GeneratorSpec::kDefaultTreeDepth));
      case GraphKind::graph_join:
        if (spec.parts.size() != 2) throw ParameterError("join needs exactly two parts");
        return make_join(generate(spec.parts[0]), generate(spec.parts[1]));
    }
    throw ParameterError("unknown graph kind");
  }();
  if (!spec.weights.empty()) return g.with_edge_weights(spec.weights);
  return g;
}

GeneratorSpec parse_generator_spec(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ParameterError("generator spec needs 'kind:params': " + text);
  const std::string kind = text.substr(0, colon);
  const std::string params = text.substr(colon + 1);
  GeneratorSpec spec;
  if (kind == "join") {
    spec.kind = GraphKind::graph_join;
    const auto plus = params.find('+');
    if (plus == std::string::npos) throw ParameterError("join spec is 'join:A+B'");
    spec.parts = {parse_generator_spec(params.substr(0, plus)), parse_generator_spec(params.substr(plus + 1))};
    return spec;
  }
  if (kind == "sst" || kind == "tree" || kind == "spherically_symmetric_tree") {
    spec.kind = GraphKind::spherically_symmetric_tree;
    std::string list = params;
    if (auto slash = params.find('/'); slash != std::string::npos) {
      list = params.substr(0, slash);
      spec.depth = parse_count(params.substr(slash + 1), "tree depth");
    }
    for (const auto& d : split(list, ',')) spec.degrees.push_back(parse_count(d, "tree degree"));
    if (spec.degrees.empty()) throw ParameterError("tree needs a degree sequence");
    return spec;
  }
  if (kind == "star") {
    spec.kind = GraphKind::star;
    if (params.find(',') != std::string::npos) {
      for (const auto& w : split(params, ',')) {
        try {
          spec.weights.push_back(std::stod(w));
        } catch (const std::exception&) {
          throw ParameterError("invalid star weight: '" + w + "'");
        }
      }
      spec.size = spec.weights.size();
    } else {
      spec.size = parse_count(params, "star arms");
    }
    return spec;
  }
  if (kind == "path") spec.kind = GraphKind::path;
  else if (kind == "cycle") spec.kind = GraphKind::cycle;
  else if (kind == "lattice2d" || kind == "grid") spec.kind = GraphKind::lattice2d;
  else if (kind == "gasket" || kind == "sierpinski" || kind == "sierpinski_gasket_graph")
    spec.kind = GraphKind::sierpinski_gasket_graph;
  else throw ParameterError("unknown graph kind '" + kind + "'");
  spec.size = parse_count(params, "size");
  return spec;
}

std::string format_generator_spec(const GeneratorSpec& spec) {
  std::ostringstream out;
  switch (spec.kind) {
    case GraphKind::path: out << "path:" << spec.size; break;
    case GraphKind::cycle: out << "cycle:" << spec.size; break;
    case GraphKind::lattice2d: out << "lattice2d:" << spec.size; break;
    case GraphKind::sierpinski_gasket_graph: out << "gasket:" << spec.size; break;
    case GraphKind::star:
      out << "star:";
      if (spec.weights.empty()) {
        out << spec.size;
      } else {
        for (std::size_t i = 0; i < spec.weights.size(); ++i) out << (i ? "," : "") << spec.weights[i];
      }
      break;
    case GraphKind::spherically_symmetric_tree:
      out << "sst:";
      for (std::size_t i = 0; i < spec.degrees.size(); ++i) out << (i ? "," : "") << spec.degrees[i];
      if (spec.depth) out << "/" << *spec.depth;
      break;
    case GraphKind::graph_join:
      out << "join:" << format_generator_spec(spec.parts.at(0)) << "+" << format_generator_spec(spec.parts.at(1));
      break;
  }
  return out.str();
}

Vertex natural_center(const GeneratorSpec& spec) {
  switch (spec.kind) {
    case GraphKind::path: return spec.size / 2;
    case GraphKind::lattice2d: return (spec.size / 2) * spec.size + spec.size / 2;
    default: return 0;
  }
}

}  // namespace hlab
