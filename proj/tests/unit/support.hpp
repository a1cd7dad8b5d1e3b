#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "harnacklab/graph.hpp"
#include "oracle/dense.hpp"

namespace testing {

using hlab::Vertex;

inline Vertex grid(std::size_t n, std::size_t i, std::size_t j) { return i * n + j; }

inline std::vector<Vertex> range(Vertex lo, Vertex hi) {
  std::vector<Vertex> out;
  for (Vertex v = lo; v <= hi; ++v) out.push_back(v);
  return out;
}

inline std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> f(n);
  for (auto& x : f) x = u(rng);
  return f;
}

/// A connected random subset grown from `seed` by breadth-first search.
inline std::vector<Vertex> random_region(const hlab::WeightedGraph& g, Vertex seed, std::size_t size,
                                         std::mt19937_64& rng) {
  std::vector<char> in(g.size(), 0);
  std::vector<Vertex> out{seed}, frontier{seed};
  in[seed] = 1;
  while (out.size() < size && !frontier.empty()) {
    const std::size_t pick = std::uniform_int_distribution<std::size_t>(0, frontier.size() - 1)(rng);
    const Vertex v = frontier[pick];
    bool grew = false;
    for (const auto& nb : g.neighbors(v))
      if (!in[nb.vertex]) {
        in[nb.vertex] = 1;
        out.push_back(nb.vertex);
        frontier.push_back(nb.vertex);
        grew = true;
        break;
      }
    if (!grew) frontier.erase(frontier.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace testing
