#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "harnacklab/dirichlet.hpp"
#include "harnacklab/dyadic.hpp"
#include "harnacklab/harnack.hpp"
#include "harnacklab/metric.hpp"
#include "harnacklab/potential.hpp"
#include "harnacklab/scale.hpp"

namespace hlab {

/// Balls B(x, r) in an arbitrary distance matrix (used for the d_Psi presentation).
std::vector<Vertex> matrix_ball(const Eigen::MatrixXd& d, Vertex x, double r);

struct PIReport {
  double psi = 0.0;
  double C = 0.0;           // best constant
  double rayleigh = 0.0;    // max of the quotient, C * psi
  std::vector<double> witness;  // maximizing f on every vertex, 0 off the outer ball
  double witness_quotient = 0.0;
  std::size_t inner_size = 0;
  std::size_t outer_size = 0;
};

/// sum_inner mu (f - mean)^2 <= C psi E_outer(f,f), with E_outer the energy of
/// the subgraph induced by `outer`.
PIReport pi_constant_on(const WeightedGraph& g, const VertexMeasure& mu, std::span<const Vertex> inner,
                        std::span<const Vertex> outer, double psi);
PIReport pi_constant(const MetricGraph& mg, const VertexMeasure& mu, Vertex x, double R, double A, double psi);

enum class CutoffKind { equilibrium, distance_linear, annulus_composite };

struct CutoffFunction {
  CutoffKind kind = CutoffKind::equilibrium;
  Vertex x = 0;
  double R1 = 0.0;
  double R2 = 0.0;
  std::vector<double> values;
};

CutoffFunction build_cutoff(const MetricGraph& mg, Vertex x, double R1, double R2, CutoffKind kind);

/// 0 <= phi <= 1, phi = 1 on B(x,R1), phi = 0 off B(x,R2).
bool is_cutoff(const MetricGraph& mg, const CutoffFunction& phi);

/// Quadratic form of u -> sum_{v in U} gamma_u(v), with the values of u off U
/// eliminated (Schur complement), as a |U| x |U| matrix in the order of U.
Eigen::MatrixXd annulus_energy_form(const WeightedGraph& g, std::span<const Vertex> U);

struct CSReport {
  double C1 = 0.0;
  double C2 = 0.0;    // minimal zero-order constant
  double psi = 0.0;
  double lambda = 0.0;  // top generalized eigenvalue before clipping
  std::vector<double> witness;  // extremal u on every vertex of U, 0 elsewhere
  std::size_t annulus_size = 0;
};

/// sum_U u^2 gamma_phi <= C1 sum_U gamma_u + C2/psi sum_U u^2 mu for every u.
CSReport cs_verify_on(const WeightedGraph& g, const VertexMeasure& mu, std::span<const Vertex> U,
                      std::span<const double> phi, double C1, double psi);
CSReport cs_verify(const MetricGraph& mg, const VertexMeasure& mu, Vertex x, double R, double A,
                   std::span<const double> phi, double C1, double psi);

/// Smallest eigenvalue of C1 S + C2/psi diag(mu) - diag(gamma_phi) on U.
double cs_form_min_eigenvalue(const WeightedGraph& g, const VertexMeasure& mu, std::span<const Vertex> U,
                              std::span<const double> phi, double C1, double C2, double psi);

struct AnnulusReport {
  Vertex x0 = 0;
  double R = 0.0;
  double r = 0.0;
  int A = 2;
  std::size_t n = 0;
  bool n_reduced = false;  // the preferred n = 8(A+8) was too fine for the graph
  std::size_t balls = 0;
  std::size_t shells = 0;  // number of psi_j averaged
  double gradient_coefficient = 0.125;
  double psi = 0.0;        // Psi(x0, r)
  double multiplier = 0.0; // smallest C with the zero-order term C/psi sum_U f^2 mu
  bool cutoff_ok = false;
  CutoffFunction phi;
};

/// Averaged maxima of per-ball cutoffs for B(x0,R) in B(x0,R+r), checked with
/// gradient coefficient 1/8.
AnnulusReport annulus_cutoff(const MetricGraph& mg, const VertexMeasure& mu, Vertex x0, double R, double r,
                             double psi, int A = 2);

/// Least squares slope of log multiplier against log((R+r)/r).
double fit_annulus_gamma(std::span<const AnnulusReport> reports);

struct EnergyOfMax {
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
};

EnergyOfMax energy_of_max_check(const WeightedGraph& g, std::span<const double> f, std::span<const double> phi1,
                                std::span<const double> phi2);

struct CapPsiCell {
  Vertex x = 0;
  double r = 0.0;
  double ratio = 1.0;  // Cap_{B(x,r)}(B(x,kappa r)) Psi(x,r) / mu(B(x,r))
};

struct CapPsiReport {
  double kappa = 0.125;
  std::vector<CapPsiCell> cells;
  double C = 1.0;  // two-sided constant
  CapPsiCell worst_low, worst_high;
  std::size_t skipped = 0;
};

CapPsiReport cap_psi_report(const MetricGraph& mg, const VertexMeasure& mu, const PsiFn& psi,
                            std::span<const Vertex> centers, std::span<const double> radii, double kappa);

// ---------------------------------------------------------------------------
// End-to-end characterization run

struct PipelineOptions {
  std::vector<double> radii{2.0, 4.0, 8.0};
  double A = 2.0;
  std::vector<Vertex> ehi_centers;  // default: the given center
  Vertex center = 0;
  double kappa = 0.125;
  double cs_C1 = 0.125;
  double growth_flag = 1.5;  // EHI profile growth that marks failure
};

struct StageStatus {
  std::string stage;
  bool ok = true;
  std::string message;
};

struct PresentationRow {
  double R = 0.0;
  double psi = 0.0;
  PIReport pi;
  CSReport cs;
  double rho = 0.0;  // radius in d_Psi with rho^beta = Psi(x,R)
  PIReport pi_beta;
  CSReport cs_beta;
};

struct PipelineReport {
  std::vector<StageStatus> stages;
  EhiProfile ehi;
  double ehi_growth = 1.0;
  bool ehi_bounded = true;
  bool measure_built = false;
  double measure_C0 = 0.0;
  double measure_beta1 = 0.0;
  double measure_beta2 = 0.0;
  std::size_t measure_depth = 0;
  double measure_C2 = 0.0;
  double measure_delta = 0.0;
  CapacityGoodReport measure_check;
  std::vector<double> mu;
  ScaleFunction psi;
  ChainMetric chain;
  QsEnvelope envelope;
  std::vector<PresentationRow> rows;
  CapPsiReport cap;
  bool ok() const;
};

PipelineReport characterization_pipeline(const WeightedGraph& g, const VertexMeasure& m,
                                         const PipelineOptions& options);

}  // namespace hlab
