#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "harnacklab/dirichlet.hpp"
#include "harnacklab/metric.hpp"

namespace hlab {

inline constexpr Vertex kNoVertex = std::numeric_limits<Vertex>::max();

/// Nested nets N_0 = {x0} c N_1 c ... c N_l of the open ball B0 = B(x0, r) at
/// scales r A^{-k}, with the cube partition they induce. Each point of
/// N_{k+1} hangs below the nearest point of N_k (itself when already in N_k),
/// and a cube is the union of its children's cubes, so the partitions are
/// nested by construction. The bottom level has scale at most the shortest
/// edge, where every cube is a single vertex.
struct CubeHierarchy {
  Vertex x0 = 0;
  double r = 0.0;
  double A = 8.0;
  std::size_t depth = 0;  // l
  std::vector<Vertex> B0;
  std::vector<std::vector<Vertex>> nets;          // N_k in selection order
  std::vector<std::vector<Vertex>> parent;        // [k][v]: P_k(v) for v in N_k, k >= 1
  std::vector<std::vector<std::vector<Vertex>>> children;  // [k][v]: S_k(v) for v in N_k
  std::vector<std::vector<Vertex>> center_of;     // [k][v]: E_k(v) for v in B0

  double scale(std::size_t k) const;
  double c_A() const { return 0.5 - 1.0 / (A - 1.0); }
  std::vector<Vertex> cube(std::size_t k, Vertex center) const;
  std::size_t branching_bound() const;  // C_M
};

CubeHierarchy build_cube_hierarchy(const MetricGraph& mg, Vertex x0, double r, double A = 8.0);

struct HierarchyCheck {
  bool partition = true;
  bool nested = true;
  bool nets_increasing = true;
  bool nets_separated = true;
  bool nets_covering = true;
  bool inner_sandwich = true;  // B(x, c_A r A^{-k}) n B0 inside Q
  bool outer_sandwich = true;  // Q inside B(x, r A^{-k})
  double worst_outer_ratio = 0.0;  // max d(x, q) / (r A^{-k}) over cube members
  std::size_t single_child_cells = 0;
};

HierarchyCheck check_hierarchy(const MetricGraph& mg, const CubeHierarchy& h);

struct CubeCapacities {
  std::vector<std::vector<double>> c;  // [k][v] for v in N_k, NaN when degenerate
  std::vector<std::vector<char>> clipped;
  std::size_t clipped_cells = 0;
  std::size_t degenerate_cells = 0;
  double ce1 = 1.0;  // worst neighbour ratio
  Vertex ce1_x = 0, ce1_y = 0;
  std::size_t ce1_level = 0;
  double ce2 = 1.0;  // worst parent/child ratio
  Vertex ce2_parent = 0, ce2_child = 0;
  std::size_t ce2_level = 0;
  double C1() const { return std::max(ce1, ce2); }
};

/// c_k(x) = Cap_{B(x, A^{-k+1} r)}(Q_k(x)). A capacity domain that covers the
/// graph is replaced by B(x, ecc(x)) and flagged; when Q_k(x) is not inside the
/// replacement the cell is degenerate.
CubeCapacities cube_capacities(const MetricGraph& mg, const CubeHierarchy& h);

struct SubadditivityCell {
  std::size_t level = 0;
  Vertex x = 0;
  double delta = 0.0;
};

struct CubeSubadditivity {
  std::vector<SubadditivityCell> cells;
  double min_delta = 1.0;
  SubadditivityCell worst;
  std::size_t skipped_single_child = 0;
  std::size_t skipped_degenerate = 0;
};

CubeSubadditivity check_cube_subadditivity(const CubeHierarchy& h, const CubeCapacities& caps);

struct Transfer {
  Vertex from = 0;
  Vertex to = 0;
  double amount = 0.0;
  double distance = 0.0;  // d(P(from), from) + d(from, to)
};

struct TransferResult {
  std::size_t level = 0;  // k: masses move from N_k to N_{k+1}
  std::vector<double> mass;  // mu_{k+1}, indexed by vertex
  std::vector<Transfer> ledger;
  double mass_error = 0.0;
  double worst_mure1 = 0.0;      // max ratio / C2^2 over close pairs
  double worst_mure2_low = 0.0;  // max (C2^{-1} parent ratio) / child ratio
  double worst_mure2_high = 0.0; // max child ratio / (factor * parent ratio)
  double max_distance_ratio = 0.0;  // max ledger distance / ((1+4/A) A^{-k} r)
};

/// One step of the mass transfer from N_k to N_{k+1}. `mass` is mu_k indexed by
/// vertex. Throws ConstructionError carrying the offending pair when one of the
/// asserted properties fails.
TransferResult transfer_step(const MetricGraph& mg, const CubeHierarchy& h, const CubeCapacities& caps,
                             std::size_t k, std::span<const double> mass, double C2, double delta);

struct CapacityGoodReport {
  double C0 = 1.0;
  double C_m01 = 1.0;
  double C_m03 = 1.0;
  double C_m04 = 1.0;
  double beta1 = 0.0;
  double beta2 = 0.0;
  bool capacity_good = false;  // beta1 > 0 and C0 finite
  // witnesses
  Vertex m01_x = 0;
  double m01_s = 0.0;
  Vertex m03_x = 0;
  Vertex m04_y = 0;
  Vertex beta1_x = 0, beta2_x = 0;
  double beta1_s1 = 0.0, beta1_s2 = 0.0, beta2_s1 = 0.0, beta2_s2 = 0.0;
  std::size_t m02_samples = 0;
  std::size_t clipped_domains = 0;
};

struct GoodMeasure {
  CubeHierarchy hierarchy;
  CubeCapacities capacities;
  CubeSubadditivity subadditivity;
  std::size_t C_M = 1;
  double C1 = 1.0;
  double C2 = 1.0;
  double delta = 0.0;
  std::vector<std::vector<double>> level_mass;  // mu_k indexed by vertex
  std::vector<TransferResult> steps;
  std::vector<double> density;  // f, 0 outside B0
  std::vector<double> mass;     // f * m
};

GoodMeasure build_ball_measure(const MetricGraph& mg, const VertexMeasure& m, Vertex x0, double r,
                               double A = 8.0);

struct CapacityGoodOptions {
  std::vector<Vertex> centers;  // default: every vertex of the domain
  std::vector<double> radii;    // default: 1, 2, 4, ... below the domain radius
};

/// Smallest (C0, beta1, beta2) for which the sampled inequalities of capacity
/// goodness hold for nu = density * m on the open ball D = B(x0, r).
CapacityGoodReport verify_capacity_good(const MetricGraph& mg, const VertexMeasure& m,
                                        std::span<const double> density, Vertex x0, double r,
                                        const CapacityGoodOptions& options = {});

struct RvdReport {
  double alpha = 0.0;
  double C0 = 1.0;
  std::size_t samples = 0;
};

/// Reverse doubling fit: log(nu(B(x,R))/nu(B(x,s))) ~ alpha log(R/s) through
/// the origin; C0 is the smallest prefactor making every sample hold.
RvdReport rvd_report(const MetricGraph& mg, std::span<const double> nu, std::span<const Vertex> centers,
                     std::span<const double> radii);

/// Mass of B(x,s) under a vertex mass vector.
double ball_mass(const MetricGraph& mg, std::span<const double> nu, Vertex x, double s,
                 BallKind kind = BallKind::open);

}  // namespace hlab
