#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "harnacklab/dirichlet.hpp"
#include "harnacklab/metric.hpp"

namespace hlab {

struct CapacityResult {
  std::vector<Vertex> A;
  std::vector<Vertex> D;
  double capacity = 0.0;       // E(h,h)
  double nu_total = 0.0;       // sum of the equilibrium measure
  std::vector<double> h;       // equilibrium potential on every vertex
  std::vector<double> nu;      // equilibrium measure on every vertex (supported in A)
  double residual = 0.0;
};

/// Cap_D(A): h = 1 on A, 0 off D, harmonic on D \ A; nu = L h on A.
CapacityResult capacity(const WeightedGraph& g, std::span<const Vertex> A, std::span<const Vertex> D);

/// P^x(T_A < tau_D), which on a finite graph is the equilibrium potential.
std::vector<double> hitting_probability(const WeightedGraph& g, std::span<const Vertex> A,
                                        std::span<const Vertex> D);

/// Vertices of `set` with a neighbor outside it.
std::vector<Vertex> inner_boundary(const WeightedGraph& g, std::span<const Vertex> set);

/// inf of g_D(x, .) over the distance band r <= d(x,y) < r + 1 inside D.
double green_radial(const MetricGraph& mg, const DomainProblem& dp, Vertex x, double r);
double green_radial(const MetricGraph& mg, const DomainProblem& dp, const Eigen::VectorXd& column,
                    Vertex x, double r);

struct DualityReport {
  double lhs = 0.0;  // inf of g_D(x0, .) over the inner boundary of B(x0,r)
  double mid = 0.0;  // 1 / Cap_D(B(x0,r))
  double sup = 0.0;  // sup of g_D(x0, .) over the same set
  double C_G_observed = 1.0;  // sup / lhs
  Vertex argmin = 0;
  Vertex argmax = 0;
  bool lower_holds = true;
  bool upper_holds = true;  // mid <= sup
};

/// Ball capacity against the Green function at the ball's edge. Requires
/// B(x0, K r) inside D.
DualityReport cap_green_duality_report(const MetricGraph& mg, Vertex x0, double r,
                                       std::span<const Vertex> D, double K = 2.0);

struct RatioWitness {
  double ratio = 1.0;
  Vertex hi_a = 0, hi_b = 0;  // pair attaining the max
  Vertex lo_a = 0, lo_b = 0;  // pair attaining the min
};

struct GreenComparisonReport {
  RatioWitness shell;      // g_D(x0,.) over the band [R, R+1)
  RatioWitness annulus;    // over B(x0,R) \ B(x0,R/A)
  RatioWitness cross_pair; // g_D(x1,y1)/g_D(x2,y2), all in B(x0,R), d(xj,yj) >= R/4
};

GreenComparisonReport green_comparison_report(const MetricGraph& mg, std::span<const Vertex> D,
                                              Vertex x0, double R, double A = 2.0, double K = 2.0);

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // root-mean-square residual in log space
};

/// Least squares fit of log y against log x.
LogLogFit fit_loglog(std::span<const double> x, std::span<const double> y);

struct GrowthReport {
  std::vector<double> radii;
  std::vector<double> values;  // g_D(x, r)
  LogLogFit fit;
};

GrowthReport green_growth_exponent(const MetricGraph& mg, const DomainProblem& dp, Vertex x,
                                   std::span<const double> radii);

struct DomainComparisonReport {
  double green_ratio = 1.0;  // sup over x,y in B(x0,R/4) of g_{2B}(x,y)/g_B(x,y)
  Vertex witness_x = 0, witness_y = 0;
  double cap_small_domain = 0.0;  // Cap_{B(x0,A r)}(B(x0,r)), r = R/A
  double cap_large_domain = 0.0;  // Cap_{B(x0,2A r)}(B(x0,r))
  double cap_ratio = 1.0;         // small / large >= 1
  bool monotone = true;
};

DomainComparisonReport domain_comparison_report(const MetricGraph& mg, Vertex x0, double R, double A = 4.0);

struct SubadditivityInput {
  std::vector<Vertex> D;
  std::vector<std::vector<Vertex>> parts;  // Q_i
  std::vector<Vertex> centers;             // z_i
  double b = 1.0;
  Vertex x0 = 0;
  double R = 1.0;
};

struct SubadditivityReport {
  double cap_union = 0.0;
  std::vector<double> cap_parts;
  double delta = 0.0;  // 1 - Cap(F) / sum Cap(Q_i)
};

SubadditivityReport enhanced_subadditivity_check(const MetricGraph& mg, const SubadditivityInput& in);

/// Two-set effective conductance in the subgraph induced by D (no killing).
double neumann_capacity(const WeightedGraph& g, std::span<const Vertex> A1, std::span<const Vertex> A2,
                        std::span<const Vertex> D);

struct NeumannResult {
  double capacity = 0.0;
  std::vector<double> potential;  // on every vertex, 0 outside D
};
NeumannResult neumann_potential(const WeightedGraph& g, std::span<const Vertex> A1,
                                std::span<const Vertex> A2, std::span<const Vertex> D);

}  // namespace hlab
