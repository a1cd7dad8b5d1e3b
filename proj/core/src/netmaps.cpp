#include "harnacklab/netmaps.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

#include "harnacklab/errors.hpp"
#include "harnacklab/parallel.hpp"
#include "harnacklab/potential.hpp"
#include "harnacklab/rng.hpp"

namespace hlab {

namespace {

using RowSparse = Eigen::SparseMatrix<double, Eigen::RowMajor>;

std::vector<double> apply(const RowSparse& M, std::span<const double> f) {
  const Eigen::Map<const Eigen::VectorXd> x(f.data(), static_cast<Eigen::Index>(f.size()));
  const Eigen::VectorXd y = M * x;
  return {y.data(), y.data() + y.size()};
}

WeightedGraph net_graph(const MetricGraph& mg, const std::vector<Vertex>& points,
                        const std::vector<double>& mass, double eps) {
  std::vector<Edge> edges;
  std::vector<std::int64_t> labels;
  for (std::size_t i = 0; i < points.size(); ++i) {
    labels.push_back(mg.graph().label(points[i]));
    const auto& di = mg.distances_from(points[i]);
    for (std::size_t j = i + 1; j < points.size(); ++j)
      if (di[points[j]] <= 3.0 * eps + kDistTol) edges.push_back({i, j, mass[i] + mass[j], 1.0});
  }
  return WeightedGraph(points.size(), std::move(edges), std::move(labels));
}

}  // namespace

std::vector<double> NetGraph::restrict_fn(std::span<const double> f) const { return apply(rst, f); }
std::vector<double> NetGraph::extend_fn(std::span<const double> h) const { return apply(ext, h); }

NetGraph discretize(const MetricGraph& mg, const VertexMeasure& m, double eps, PartitionKind kind) {
  if (!(eps > 0.0)) throw ParameterError("net scale must be positive");
  if (m.size() != mg.size()) throw ParameterError("measure size does not match the graph");
  const auto& g = mg.graph();
  const std::size_t n = mg.size();
  const bool identity = eps <= g.min_edge_length() + kDistTol;

  std::vector<Vertex> points;
  if (identity) {
    for (Vertex v = 0; v < n; ++v) points.push_back(v);
  } else {
    points = epsilon_net(mg, eps).points;
  }
  std::vector<double> mass(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) mass[i] = measure_of(m, mg.ball(points[i], eps));

  NetGraph net{eps, identity, kind, points, mass,
               identity ? g : net_graph(mg, points, mass, eps), {}, {}, {}};
  const auto k = static_cast<Eigen::Index>(points.size());
  net.rst.resize(k, static_cast<Eigen::Index>(n));
  net.ext.resize(static_cast<Eigen::Index>(n), k);

  std::vector<Eigen::Triplet<double>> rt, et;
  for (std::size_t i = 0; i < points.size(); ++i)
    for (Vertex y : mg.ball(points[i], eps))
      rt.emplace_back(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(y), m[y] / mass[i]);
  if (identity) {
    for (Vertex v = 0; v < n; ++v) et.emplace_back(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(v), 1.0);
  } else {
    std::vector<double> total(n, 0.0);
    std::vector<std::vector<std::pair<std::size_t, double>>> raw(n);
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto& d = mg.distances_from(points[i]);
      std::vector<double> bump(n, 0.0);
      if (kind == PartitionKind::tent) {
        for (Vertex y = 0; y < n; ++y) bump[y] = std::max(0.0, 1.0 - d[y] / (2.0 * eps));
      } else {
        const auto D = mg.ball(points[i], 2.0 * eps);
        if (D.size() == n) {
          for (Vertex y = 0; y < n; ++y) bump[y] = 1.0;
        } else {
          bump = capacity(g, mg.ball(points[i], eps / 2.0, BallKind::closed), D).h;
        }
      }
      for (Vertex y = 0; y < n; ++y) {
        const double t = bump[y];
        if (t > kDistTol) {
          raw[y].emplace_back(i, t);
          total[y] += t;
        }
      }
    }
    for (Vertex y = 0; y < n; ++y)
      for (const auto& [i, t] : raw[y])
        et.emplace_back(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(i), t / total[y]);
  }
  net.rst.setFromTriplets(rt.begin(), rt.end());
  net.ext.setFromTriplets(et.begin(), et.end());

  // partition of unity properties
  const Eigen::VectorXd sums = net.ext * Eigen::VectorXd::Ones(k);
  net.partition.sum_error = (sums.array() - 1.0).abs().maxCoeff();
  const Eigen::SparseMatrix<double> cols = net.ext;  // column access
  for (std::size_t i = 0; i < points.size(); ++i) {
    std::vector<double> chi(n, 0.0);
    for (Eigen::SparseMatrix<double>::InnerIterator it(cols, static_cast<Eigen::Index>(i)); it; ++it)
      chi[static_cast<Vertex>(it.row())] = it.value();
    const auto& d = mg.distances_from(points[i]);
    for (Vertex y = 0; y < n; ++y) {
      if (d[y] < eps / 2.0 - kDistTol) net.partition.c = std::min(net.partition.c, chi[y]);
      if (d[y] >= 2.0 * eps - kDistTol && chi[y] != 0.0) net.partition.support_ok = false;
    }
    net.partition.C = std::max(net.partition.C, energy(g, chi) / mass[i]);
  }
  return net;
}

std::vector<Vertex> nearest_net_map(const MetricGraph& mg, const NetGraph& net) {
  std::vector<Vertex> phi(mg.size(), 0);
  std::vector<double> best(mg.size(), std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < net.points.size(); ++i) {
    const auto& d = mg.distances_from(net.points[i]);
    for (Vertex y = 0; y < mg.size(); ++y)
      if (d[y] < best[y] - kDistTol) {
        best[y] = d[y];
        phi[y] = i;
      }
  }
  return phi;
}

RoughIsometryWitness rough_isometry_check(const MetricGraph& g1, const VertexMeasure& m1, const MetricGraph& g2,
                                          const VertexMeasure& m2, std::span<const Vertex> phi, double C1) {
  if (phi.size() != g1.size()) throw ParameterError("map must be defined on every source vertex");
  if (!(C1 > 0.0)) throw ParameterError("covering radius must be positive");
  for (Vertex t : phi)
    if (t >= g2.size()) throw ParameterError("map sends a vertex outside the target");
  RoughIsometryWitness w;
  w.C1 = C1;

  std::vector<char> covered(g2.size(), 0);
  std::vector<Vertex> image(phi.begin(), phi.end());
  std::sort(image.begin(), image.end());
  image.erase(std::unique(image.begin(), image.end()), image.end());
  for (Vertex t : image)
    for (Vertex y : g2.ball(t, C1)) covered[y] = 1;
  for (Vertex y = 0; y < g2.size(); ++y)
    if (!covered[y])
      throw ConstructionError("image of the map does not cover the target", {{"uncovered", g2.graph().label(y)}});

  for (Vertex x = 0; x < g1.size(); ++x) {
    const auto& d1 = g1.distances_from(x);
    const auto& d2 = g2.distances_from(phi[x]);
    for (Vertex y = x + 1; y < g1.size(); ++y) {
      const double a = d1[y], b = d2[phi[y]];
      double need = b / (a + C1);
      if (a - C1 > 0.0) need = std::max(need, b > 0.0 ? (a - C1) / b : std::numeric_limits<double>::infinity());
      if (need > w.C2) {
        w.C2 = need;
        w.qi2_x = x;
        w.qi2_y = y;
      }
    }
    const double q = measure_of(m2, g2.ball(phi[x], C1)) / measure_of(m1, g1.ball(x, C1));
    if (std::max(q, 1.0 / q) > w.C3) {
      w.C3 = std::max(q, 1.0 / q);
      w.qi3_x = x;
    }
  }
  return w;
}

void RatioRange::add(double num, double den) {
  if (!(den > 1e-300)) return;
  const double q = num / den;
  if (samples == 0) {
    lo = hi = q;
  } else {
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }
  ++samples;
}

TransferTable transfer_inequality_experiment(const MetricGraph& mg, const VertexMeasure& m, double eps, Vertex x0,
                                             double R, std::size_t samples, std::uint64_t seed) {
  const auto net = discretize(mg, m, eps);
  const auto& g = mg.graph();
  const auto& ng = net.graph;
  const auto B = mg.ball(x0, R);
  std::vector<std::size_t> netB;
  for (std::size_t i = 0; i < net.points.size(); ++i)
    if (mg.in_ball(x0, R, net.points[i])) netB.push_back(i);
  auto norm_src = [&](std::span<const double> f) {
    double s = 0.0;
    for (Vertex v : B) s += f[v] * f[v] * m[v];
    return s;
  };
  auto norm_net = [&](std::span<const double> h) {
    double s = 0.0;
    for (std::size_t i : netB) s += h[i] * h[i] * net.ball_mass[i];
    return s;
  };

  TransferTable t;
  t.eps = eps;
  const CounterRng rng(seed);
  for (std::size_t s = 0; s <= samples; ++s) {
    std::vector<double> f(g.size());
    if (s == 0) {
      f = mg.distances_from(x0);
    } else {
      const auto sub = rng.substream(s);
      for (Vertex v = 0; v < g.size(); ++v) f[v] = sub.uniform(v, -1.0, 1.0);
    }
    const auto rf = net.restrict_fn(f);
    t.energy.add(energy(ng, rf), energy(g, f));
    t.norm.add(norm_net(rf), norm_src(f));

    std::vector<double> h(ng.size());
    if (s == 0) {
      for (std::size_t i = 0; i < h.size(); ++i) h[i] = f[net.points[i]];
    } else {
      const auto sub = rng.substream(samples + s);
      for (std::size_t i = 0; i < h.size(); ++i) h[i] = sub.uniform(i, -1.0, 1.0);
    }
    const auto eh = net.extend_fn(h);
    t.ext_energy.add(energy(g, eh), energy(ng, h));
    t.ext_norm.add(norm_src(eh), norm_net(h));
    t.roundtrip.add(energy(ng, net.restrict_fn(eh)), energy(ng, h));
  }
  return t;
}

DumbbellReport dumbbell_report(const MetricGraph& mg, Vertex x0, double R) {
  if (!(R >= 8.0)) throw ParameterError("dumbbell report needs R >= 8");
  const auto& g = mg.graph();
  const auto D = mg.ball(x0, R);
  const auto half = mg.ball(x0, R / 2.0);
  std::vector<std::pair<Vertex, Vertex>> pairs;
  for (std::size_t i = 0; i < half.size(); ++i)
    for (std::size_t j = i + 1; j < half.size(); ++j)
      if (mg.distance(half[i], half[j]) >= R / 3.0 - kDistTol) pairs.emplace_back(half[i], half[j]);
  if (pairs.empty()) throw ParameterError("no admissible dumbbell pairs");

  // Neumann Laplacian of the subgraph induced by D and its pseudo-inverse.
  std::vector<std::size_t> idx(g.size(), std::numeric_limits<std::size_t>::max());
  for (std::size_t i = 0; i < D.size(); ++i) idx[D[i]] = i;
  const auto nd = static_cast<Eigen::Index>(D.size());
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(nd, nd);
  for (const Edge& e : g.edges()) {
    const auto a = idx[e.u], b = idx[e.v];
    if (a == std::numeric_limits<std::size_t>::max() || b == std::numeric_limits<std::size_t>::max()) continue;
    const auto A = static_cast<Eigen::Index>(a), Bi = static_cast<Eigen::Index>(b);
    L(A, A) += e.weight;
    L(Bi, Bi) += e.weight;
    L(A, Bi) -= e.weight;
    L(Bi, A) -= e.weight;
  }
  const Eigen::MatrixXd J = Eigen::MatrixXd::Constant(nd, nd, 1.0 / static_cast<double>(nd));
  const Eigen::MatrixXd Lp = (L + J).llt().solve(Eigen::MatrixXd::Identity(nd, nd)) - J;

  std::vector<double> ceff(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t p) {
    const auto A1 = mg.ball(pairs[p].first, R / 8.0);
    const auto A2 = mg.ball(pairs[p].second, R / 8.0);
    std::vector<Eigen::Index> S;
    for (Vertex v : A1) S.push_back(static_cast<Eigen::Index>(idx[v]));
    for (Vertex v : A2) S.push_back(static_cast<Eigen::Index>(idx[v]));
    const auto k = static_cast<Eigen::Index>(S.size());
    // Kron reduction onto S: K^+ = P Lp_SS P
    Eigen::MatrixXd Kp(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
      for (Eigen::Index j = 0; j < k; ++j) Kp(i, j) = Lp(S[static_cast<std::size_t>(i)], S[static_cast<std::size_t>(j)]);
    const Eigen::MatrixXd P =
        Eigen::MatrixXd::Identity(k, k) - Eigen::MatrixXd::Constant(k, k, 1.0 / static_cast<double>(k));
    Kp = P * Kp * P;
    const Eigen::MatrixXd Jk = Eigen::MatrixXd::Constant(k, k, 1.0 / static_cast<double>(k));
    const Eigen::MatrixXd K = (Kp + Jk).ldlt().solve(Eigen::MatrixXd::Identity(k, k)) - Jk;
    double c = 0.0;
    const auto n1 = static_cast<Eigen::Index>(A1.size());
    for (Eigen::Index i = 0; i < n1; ++i)
      for (Eigen::Index j = n1; j < k; ++j) c -= K(i, j);
    ceff[p] = c;
  });

  DumbbellReport rep;
  rep.x0 = x0;
  rep.R = R;
  rep.pairs = pairs.size();
  rep.sup = 0.0;
  rep.inf = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    if (ceff[p] > rep.sup) {
      rep.sup = ceff[p];
      rep.sup_x = pairs[p].first;
      rep.sup_y = pairs[p].second;
    }
    if (ceff[p] < rep.inf) {
      rep.inf = ceff[p];
      rep.inf_x = pairs[p].first;
      rep.inf_y = pairs[p].second;
    }
  }
  rep.ratio = rep.sup / rep.inf;
  return rep;
}

}  // namespace hlab
