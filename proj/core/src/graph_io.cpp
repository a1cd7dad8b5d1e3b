#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

#include "harnacklab/errors.hpp"
#include "harnacklab/graph.hpp"

namespace hlab {

WeightedGraph read_graph(std::istream& in) {
  std::vector<std::int64_t> labels;
  std::map<std::int64_t, Vertex> index;
  std::vector<Edge> edges;
  auto vertex_of = [&](std::int64_t id) {
    auto [it, inserted] = index.emplace(id, labels.size());
    if (inserted) labels.push_back(id);
    return it->second;
  };

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    auto fail = [&](const std::string& msg) {
      return ParameterError("graph line " + std::to_string(lineno) + ": " + msg);
    };
    if (tag == "v") {
      std::int64_t id;
      if (!(ls >> id)) throw fail("expected 'v <id>'");
      if (index.count(id)) throw fail("vertex " + std::to_string(id) + " declared twice");
      vertex_of(id);
    } else if (tag == "e") {
      std::int64_t a, b;
      if (!(ls >> a >> b)) throw fail("expected 'e <id1> <id2> <weight> <length>'");
      Edge e{vertex_of(a), vertex_of(b)};
      if (ls >> e.weight) {
        if (!(ls >> e.length)) e.length = 1.0;
      } else {
        e.weight = 1.0;
      }
      edges.push_back(e);
    } else {
      throw fail("unknown record '" + tag + "'");
    }
  }
  if (labels.empty()) throw ParameterError("graph file has no vertices");
  const std::size_t n = labels.size();
  return WeightedGraph(n, std::move(edges), std::move(labels));
}

WeightedGraph read_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open graph file '" + path + "'");
  return read_graph(in);
}

void write_graph(std::ostream& out, const WeightedGraph& g) {
  const auto old = out.precision(std::numeric_limits<double>::max_digits10);
  for (Vertex v = 0; v < g.size(); ++v) out << "v " << g.label(v) << "\n";
  for (const Edge& e : g.edges())
    out << "e " << g.label(e.u) << " " << g.label(e.v) << " " << e.weight << " " << e.length << "\n";
  out.precision(old);
}

}  // namespace hlab
