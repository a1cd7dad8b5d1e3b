#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "harnacklab/dirichlet.hpp"
#include "harnacklab/metric.hpp"

namespace hlab {

/// Which balls enter the EHI. `cable`: the open cable-system balls, seen on
/// vertices as the closed ball {d <= R} for the sup/inf and the harmonic
/// domain {v : d(x,v) + longest incident edge <= AR}. `graph`: open vertex
/// balls {d < R} and harmonicity at every vertex of {d < AR}.
enum class HarnackBalls { cable, graph };

struct HarnackReport {
  HarnackBalls balls = HarnackBalls::cable;
  Vertex x = 0;
  double R = 0.0;
  double A = 0.0;
  double C_H = 1.0;
  Vertex y = 0;  // where the extremal harmonic function is largest
  Vertex z = 0;  // where it is smallest
  Vertex b = 0;  // boundary vertex carrying the point mass
  std::size_t inner_size = 0;
  std::size_t domain_size = 0;
};

/// Vertices whose unit cable neighbourhood lies in B(x, AR): d(x,v) plus the
/// longest incident edge is at most AR.
std::vector<Vertex> harnack_domain(const MetricGraph& mg, Vertex x, double outer_radius);

/// Worst ratio max_{y,z in inner, b in boundary(D)} K(y,b)/K(z,b).
HarnackReport harnack_constant_on(const WeightedGraph& g, std::span<const Vertex> inner,
                                  std::span<const Vertex> D);

/// C_H(x,R,A) for the chosen ball convention.
HarnackReport harnack_constant(const MetricGraph& mg, Vertex x, double R, double A,
                               HarnackBalls balls = HarnackBalls::cable);

/// Largest ratio h(y)/h(z) over the inner set for the harmonic extension of the
/// given nonnegative boundary data (the quantity the point masses dominate).
double harnack_ratio_for_data(const WeightedGraph& g, std::span<const Vertex> inner,
                              std::span<const Vertex> D, std::span<const double> boundary_data);

struct ProfileCell {
  Vertex x = 0;
  double R = 0.0;
  double A = 0.0;
  bool admissible = true;
  std::string reason;
  HarnackReport report;
};

struct EhiProfile {
  std::vector<ProfileCell> cells;
  double max_C_H = 1.0;
  std::size_t skipped = 0;
  /// max C_H among admissible cells with the given radius (0 when none).
  double max_at(double R) const;
};

EhiProfile ehi_profile(const MetricGraph& mg, std::span<const Vertex> centers,
                       std::span<const double> radii, double A, HarnackBalls balls = HarnackBalls::cable);

struct BgReport {
  double vds_constant = 1.0;  // worst m(B(x,2r))/m(B(x,r))
  Vertex vds_x = 0;
  double vds_r = 0.0;
  double gamma2 = 0.0;
  double eois_constant = 1.0;  // C_L for the fitted gamma2
  Vertex eois_x = 0;
  double eois_s = 0.0, eois_r = 0.0;
  std::size_t flagged_cells = 0;
};

/// Small-scale regularity: volume doubling and occupation-time growth over
/// every center and the given radii (all within (0, r0]).
BgReport bg_report(const MetricGraph& mg, const VertexMeasure& m, double r0, std::span<const double> radii,
                   std::span<const Vertex> centers = {});

struct PerturbationTrial {
  std::uint64_t trial = 0;
  EhiProfile profile;
  double worst_inflation = 1.0;  // max over cells of C_H' / C_H
};

struct PerturbationReport {
  double factor = 1.0;
  std::uint64_t seed = 0;
  EhiProfile base;
  std::vector<PerturbationTrial> trials;
  double worst_inflation = 1.0;
};

/// Multiplies every edge weight by exp(u ln C), u uniform in [-1,1], drawn
/// from the counter-based generator (seed, trial, edge).
std::vector<double> perturbed_weights(const WeightedGraph& g, double factor, std::uint64_t seed,
                                      std::uint64_t trial);

PerturbationReport perturbation_experiment(const WeightedGraph& g, double factor, std::size_t trials,
                                           std::uint64_t seed, std::span<const Vertex> centers,
                                           std::span<const double> radii, double A,
                                           HarnackBalls balls = HarnackBalls::cable);

}  // namespace hlab
