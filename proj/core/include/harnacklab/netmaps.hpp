#pragma once

#include <Eigen/Sparse>

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "harnacklab/dirichlet.hpp"
#include "harnacklab/metric.hpp"

namespace hlab {

struct PartitionCheck {
  double sum_error = 0.0;   // max |sum_v chi_v - 1|
  double c = 1.0;           // min of chi_v on B(v, eps/2)
  double C = 0.0;           // max E(chi_v) / m(B(v, eps))
  bool support_ok = true;   // chi_v = 0 off B(v, 2 eps)
};

enum class PartitionKind {
  tent,         // max(0, 1 - d(v,.)/(2 eps)), renormalized
  equilibrium,  // equilibrium potential of B(v, eps/2) in B(v, 2 eps), renormalized
};

/// Maximal eps-net of a graph seen as a graph of its own: u ~ v iff
/// d(u,v) <= 3 eps, with weight m(B(u,eps)) + m(B(v,eps)).
struct NetGraph {
  double eps = 0.0;
  bool identity = false;  // eps at or below the shortest edge
  PartitionKind kind = PartitionKind::tent;
  std::vector<Vertex> points;      // net vertex i sits at source vertex points[i]
  std::vector<double> ball_mass;   // m(B(points[i], eps))
  WeightedGraph graph;
  Eigen::SparseMatrix<double, Eigen::RowMajor> rst;  // n x |V|
  Eigen::SparseMatrix<double, Eigen::RowMajor> ext;  // |V| x n, column i is chi_i
  PartitionCheck partition;

  std::vector<double> restrict_fn(std::span<const double> f) const;
  std::vector<double> extend_fn(std::span<const double> h) const;
};

NetGraph discretize(const MetricGraph& mg, const VertexMeasure& m, double eps,
                    PartitionKind kind = PartitionKind::tent);

/// Index of the nearest net point (lowest index on ties) for every source vertex.
std::vector<Vertex> nearest_net_map(const MetricGraph& mg, const NetGraph& net);

struct RoughIsometryWitness {
  double C1 = 1.0;
  double C2 = 1.0;
  double C3 = 1.0;
  Vertex qi2_x = 0, qi2_y = 0;
  Vertex qi3_x = 0;
};

/// Smallest C2, C3 for the map phi: V1 -> V2 at covering radius C1. Throws
/// ConstructionError naming an uncovered vertex of the target.
RoughIsometryWitness rough_isometry_check(const MetricGraph& g1, const VertexMeasure& m1, const MetricGraph& g2,
                                          const VertexMeasure& m2, std::span<const Vertex> phi, double C1);

struct RatioRange {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t samples = 0;
  void add(double num, double den);
};

struct TransferTable {
  double eps = 0.0;
  RatioRange energy;      // E_net(rst f) / E(f)
  RatioRange norm;        // sum_net (rst f)^2 w / sum_B f^2 m
  RatioRange ext_energy;  // E(ext h) / E_net(h)
  RatioRange ext_norm;    // sum_B (ext h)^2 m / sum_net h^2 w
  RatioRange roundtrip;   // E_net(rst ext h) / E_net(h)
};

/// Two-sided comparison of energies and ball norms through rst and ext over a
/// batch of random functions (plus the distance function from x0).
TransferTable transfer_inequality_experiment(const MetricGraph& mg, const VertexMeasure& m, double eps, Vertex x0,
                                             double R, std::size_t samples = 32, std::uint64_t seed = 0);

struct DumbbellReport {
  Vertex x0 = 0;
  double R = 0.0;
  std::size_t pairs = 0;
  double sup = 0.0;
  double inf = 0.0;
  double ratio = 1.0;
  Vertex sup_x = 0, sup_y = 0, inf_x = 0, inf_y = 0;
};

/// Neumann conductances C_eff(B(x,R/8), B(y,R/8); B(x0,R)) over all pairs
/// x, y in B(x0,R/2) with d(x,y) >= R/3.
DumbbellReport dumbbell_report(const MetricGraph& mg, Vertex x0, double R);

}  // namespace hlab
