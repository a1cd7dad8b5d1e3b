#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "harnacklab/dirichlet.hpp"
#include "harnacklab/metric.hpp"
#include "harnacklab/potential.hpp"

namespace hlab {

/// Psi(x, r) on a grid of centers and radii, with log-linear interpolation in r.
struct ScaleFunction {
  std::vector<Vertex> centers;
  std::vector<double> radii;             // ascending
  std::vector<std::vector<double>> psi;  // [center][radius]; NaN when B(x,r) has no exterior
  std::vector<std::vector<char>> singleton_inner;
  std::size_t inadmissible = 0;
  bool monotone = true;

  // regularity constants fitted over every sampled pair of cells
  double C1 = 1.0;
  double beta1 = 0.0;
  double beta2 = 0.0;
  std::size_t fit_samples = 0;
  bool fit_subsampled = false;

  /// Row of `x` in the table; throws ParameterError when x is not a center.
  std::size_t row(Vertex x) const;
  /// Psi(x, t): 0 at t = 0, power-law between and beyond the sampled radii.
  double value(Vertex x, double t) const;
};

ScaleFunction scale_function(const MetricGraph& mg, const VertexMeasure& mu, std::span<const Vertex> centers,
                             std::span<const double> radii);

/// Log-log fit of Psi(x, r) against r over the admissible sampled radii.
LogLogFit psi_growth(const ScaleFunction& sf, Vertex x);

using PsiFn = std::function<double(Vertex, double)>;

struct ChainMetric {
  Eigen::MatrixXd D;     // Psi(x,d) + Psi(y,d)
  Eigen::MatrixXd dpsi;  // chain infimum of D^eps
  double K = 1.0;        // quasi-triangle constant of D
  bool K_sampled = false;
  double epsilon = 1.0;
  double beta = 1.0;     // 1 / epsilon
  std::size_t halvings = 0;
  double lower_ratio = 1.0;  // min dpsi / D^eps over pairs, >= 1/4 when accepted
  double defbeta_C = 1.0;    // C with C^{-1} Psi(x,d) <= dpsi^beta <= C Psi(x,d)
  Vertex defbeta_x = 0, defbeta_y = 0;
};

ChainMetric build_chain_metric(const MetricGraph& mg, const PsiFn& psi);
ChainMetric build_chain_metric(const MetricGraph& mg, const ScaleFunction& sf);

/// n x n matrix of shortest-path distances.
Eigen::MatrixXd distance_matrix(const MetricGraph& mg);

struct QsPoint {
  double t = 0.0;  // d1(x,a)/d1(x,b)
  double u = 0.0;  // d2(x,a)/d2(x,b)
};

struct QsEnvelope {
  double C = 1.0;
  double gamma1 = 1.0;  // exponent for t < 1
  double gamma2 = 1.0;  // exponent for t > 1
  std::size_t triples = 0;
  bool sampled = false;
  std::vector<QsPoint> scatter;  // thinned to at most kScatterLimit points
  double eta(double t) const;
};

inline constexpr std::size_t kQsExhaustiveLimit = 200;
inline constexpr std::size_t kScatterLimit = 4096;

/// Envelope eta(t) = C max(t^g1, t^g2) over (x, a, b) with a, b != x. Exponents
/// are least-squares slopes through the origin on each side of t = 1; C is the
/// smallest constant dominating every triple.
QsEnvelope quasisymmetry_distortion(const Eigen::MatrixXd& d1, const Eigen::MatrixXd& d2,
                                    std::uint64_t seed = 0);

struct AnnuliCertificate {
  Vertex x = 0;
  double r = 0.0;
  double A = 0.0;
  // B2(x,s) in B1(x,r) in B1(x,Ar) in B2(x, eta(A) s)
  double s = 0.0;  // largest such s, infinite when B1(x,r) is everything
  double eta_needed = 0.0;  // smallest factor that closes the chain
  double eta_A = 0.0;       // eta(A) from the envelope (0 when none given)
  bool chain_holds = true;
  // B1(x,r) in B2(x,s') in B2(x,As') in B1(x, A1 r) for every s' > s_dual
  double s_dual = 0.0;
  double A1_needed = 0.0;
  double A1 = 0.0;  // 1 / eta^{-1}(1/A) from the envelope
  bool dual_holds = true;
};

AnnuliCertificate annuli_comparison(const Eigen::MatrixXd& d1, const Eigen::MatrixXd& d2, Vertex x, double r,
                                    double A, const QsEnvelope* envelope = nullptr);

}  // namespace hlab
