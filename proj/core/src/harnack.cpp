#include "harnacklab/harnack.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "harnacklab/errors.hpp"
#include "harnacklab/parallel.hpp"
#include "harnacklab/potential.hpp"
#include "harnacklab/rng.hpp"

namespace hlab {

std::vector<Vertex> harnack_domain(const MetricGraph& mg, Vertex x, double outer_radius) {
  const auto& g = mg.graph();
  const auto& d = mg.distances_from(x);
  std::vector<Vertex> out;
  for (Vertex v = 0; v < g.size(); ++v) {
    double reach = 0.0;
    for (const Neighbor& nb : g.neighbors(v)) reach = std::max(reach, nb.length);
    if (d[v] + reach <= outer_radius + kDistTol) out.push_back(v);
  }
  return out;
}

namespace {

Eigen::MatrixXd inner_kernel_rows(const DomainProblem& dp, std::span<const Vertex> inner) {
  const Eigen::MatrixXd K = harmonic_measure(dp);
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(inner.size()), K.cols());
  for (std::size_t i = 0; i < inner.size(); ++i) rows.row(static_cast<Eigen::Index>(i)) = K.row(dp.local_index(inner[i]));
  return rows;
}

}  // namespace

HarnackReport harnack_constant_on(const WeightedGraph& g, std::span<const Vertex> inner_in,
                                  std::span<const Vertex> D_in) {
  const auto inner = normalized_set(inner_in);
  const auto D = normalized_set(D_in);
  if (inner.empty()) throw ParameterError("inner set is empty");
  if (!is_subset(inner, D)) throw ContainmentError("inner set is not inside the harmonic domain");
  DomainProblem dp(g, D);
  const Eigen::MatrixXd K = inner_kernel_rows(dp, inner);
  HarnackReport rep;
  rep.inner_size = inner.size();
  rep.domain_size = D.size();
  rep.y = rep.z = inner.front();
  rep.b = dp.boundary().front();
  for (Eigen::Index b = 0; b < K.cols(); ++b) {
    Eigen::Index imax = 0, imin = 0;
    const double hi = K.col(b).maxCoeff(&imax);
    const double lo = K.col(b).minCoeff(&imin);
    if (hi <= 0.0) continue;  // 0/0 counts as 1
    if (lo <= 0.0)
      throw ConstructionError("harmonic measure vanishes inside a connected domain",
                              {{"z", g.label(inner[static_cast<std::size_t>(imin)])},
                               {"b", g.label(dp.boundary()[static_cast<std::size_t>(b)])}});
    if (hi / lo > rep.C_H) {
      rep.C_H = hi / lo;
      rep.y = inner[static_cast<std::size_t>(imax)];
      rep.z = inner[static_cast<std::size_t>(imin)];
      rep.b = dp.boundary()[static_cast<std::size_t>(b)];
    }
  }
  return rep;
}

HarnackReport harnack_constant(const MetricGraph& mg, Vertex x, double R, double A, HarnackBalls balls) {
  if (!(R > 0.0) || !(A >= 1.0)) throw ParameterError("need R > 0 and A >= 1");
  const bool cable = balls == HarnackBalls::cable;
  const auto D = cable ? harnack_domain(mg, x, A * R) : mg.ball(x, A * R);
  if (D.size() == mg.size()) throw TopologyError("B(x,AR) swallows the graph");
  if (D.empty()) throw TopologyError("harmonic domain is empty");
  const auto inner = mg.ball(x, R, cable ? BallKind::closed : BallKind::open);
  auto rep = harnack_constant_on(mg.graph(), inner, D);
  rep.balls = balls;
  rep.x = x;
  rep.R = R;
  rep.A = A;
  return rep;
}

double harnack_ratio_for_data(const WeightedGraph& g, std::span<const Vertex> inner,
                              std::span<const Vertex> D, std::span<const double> boundary_data) {
  DomainProblem dp(g, D);
  const auto sol = solve_dirichlet(dp, boundary_data);
  double hi = 0.0, lo = std::numeric_limits<double>::infinity();
  for (Vertex v : inner) {
    hi = std::max(hi, sol.values[v]);
    lo = std::min(lo, sol.values[v]);
  }
  if (hi <= 0.0) return 1.0;
  return hi / lo;
}

double EhiProfile::max_at(double R) const {
  double best = 0.0;
  for (const auto& c : cells)
    if (c.admissible && std::abs(c.R - R) < kDistTol) best = std::max(best, c.report.C_H);
  return best;
}

EhiProfile ehi_profile(const MetricGraph& mg, std::span<const Vertex> centers,
                       std::span<const double> radii, double A, HarnackBalls balls) {
  EhiProfile prof;
  for (Vertex x : centers)
    for (double R : radii) prof.cells.push_back({x, R, A, true, {}, {}});
  parallel_for(prof.cells.size(), [&](std::size_t i) {
    auto& cell = prof.cells[i];
    try {
      cell.report = harnack_constant(mg, cell.x, cell.R, cell.A, balls);
    } catch (const TopologyError& e) {
      cell.admissible = false;
      cell.reason = e.what();
    } catch (const ContainmentError& e) {
      cell.admissible = false;
      cell.reason = e.what();
    }
  });
  for (const auto& c : prof.cells) {
    if (!c.admissible) ++prof.skipped;
    else prof.max_C_H = std::max(prof.max_C_H, c.report.C_H);
  }
  return prof;
}

BgReport bg_report(const MetricGraph& mg, const VertexMeasure& m, double r0, std::span<const double> radii_in,
                   std::span<const Vertex> centers_in) {
  std::vector<double> radii(radii_in.begin(), radii_in.end());
  std::sort(radii.begin(), radii.end());
  for (double r : radii)
    if (!(r > 0.0) || r > r0 + kDistTol) throw ParameterError("radii must lie in (0, r0]");
  std::vector<Vertex> centers(centers_in.begin(), centers_in.end());
  if (centers.empty())
    for (Vertex v = 0; v < mg.size(); ++v) centers.push_back(v);
  const auto& g = mg.graph();

  BgReport rep;
  // psi(x,r) = m(B(x,r)) / Cap_{B(x,8r)}(B(x,r)); NaN when B(x,8r) has no exterior.
  std::vector<std::vector<double>> psi(centers.size(), std::vector<double>(radii.size()));
  parallel_for(centers.size(), [&](std::size_t i) {
    for (std::size_t j = 0; j < radii.size(); ++j) {
      const auto ball = mg.ball(centers[i], radii[j]);
      const auto outer = mg.ball(centers[i], 8.0 * radii[j]);
      if (outer.size() == g.size()) {
        psi[i][j] = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      psi[i][j] = measure_of(m, ball) / capacity(g, ball, outer).capacity;
    }
  });
  for (std::size_t i = 0; i < centers.size(); ++i)
    for (double r : radii) {
      const double q = measure_of(m, mg.ball(centers[i], 2.0 * r)) / measure_of(m, mg.ball(centers[i], r));
      if (q > rep.vds_constant) {
        rep.vds_constant = q;
        rep.vds_x = centers[i];
        rep.vds_r = r;
      }
    }

  struct Sample { double t, q; Vertex x; double s, r; };
  std::vector<Sample> samples;
  for (std::size_t i = 0; i < centers.size(); ++i)
    for (std::size_t a = 0; a < radii.size(); ++a)
      for (std::size_t b = a; b < radii.size(); ++b) {
        if (std::isnan(psi[i][a]) || std::isnan(psi[i][b])) {
          ++rep.flagged_cells;
          continue;
        }
        samples.push_back({radii[a] / radii[b], psi[i][a] / psi[i][b], centers[i], radii[a], radii[b]});
      }
  // gamma2: least-squares slope of log q against log(s/r) over the s < r samples.
  double sxx = 0.0, sxy = 0.0;
  for (const auto& s : samples)
    if (s.t < 1.0) {
      sxx += std::log(s.t) * std::log(s.t);
      sxy += std::log(s.t) * std::log(s.q);
    }
  rep.gamma2 = sxx > 0.0 ? std::max(0.0, sxy / sxx) : 0.0;
  rep.eois_constant = 0.0;
  for (const auto& s : samples) {
    const double c = s.q * std::pow(1.0 / s.t, rep.gamma2);
    if (c > rep.eois_constant) {
      rep.eois_constant = c;
      rep.eois_x = s.x;
      rep.eois_s = s.s;
      rep.eois_r = s.r;
    }
  }
  if (samples.empty()) rep.eois_constant = 1.0;
  return rep;
}

std::vector<double> perturbed_weights(const WeightedGraph& g, double factor, std::uint64_t seed,
                                      std::uint64_t trial) {
  const CounterRng rng = CounterRng(seed).substream(trial);
  const double lf = std::log(factor);
  std::vector<double> w(g.edge_count());
  for (std::size_t i = 0; i < w.size(); ++i)
    w[i] = g.edges()[i].weight * std::exp(lf * rng.uniform(i, -1.0, 1.0));
  return w;
}

PerturbationReport perturbation_experiment(const WeightedGraph& g, double factor, std::size_t trials,
                                           std::uint64_t seed, std::span<const Vertex> centers,
                                           std::span<const double> radii, double A,
                                           HarnackBalls balls) {
  if (!(factor >= 1.0)) throw ParameterError("perturbation factor must be at least 1");
  if (trials == 0) throw ParameterError("at least one trial is required");
  PerturbationReport rep;
  rep.factor = factor;
  rep.seed = seed;
  const MetricGraph base(g);
  rep.base = ehi_profile(base, centers, radii, A, balls);
  for (std::size_t t = 0; t < trials; ++t) {
    const MetricGraph mg(g.with_edge_weights(perturbed_weights(g, factor, seed, t)));
    PerturbationTrial trial;
    trial.trial = t;
    trial.profile = ehi_profile(mg, centers, radii, A, balls);
    for (std::size_t i = 0; i < trial.profile.cells.size(); ++i) {
      const auto& before = rep.base.cells[i];
      const auto& after = trial.profile.cells[i];
      if (!before.admissible || !after.admissible) continue;
      trial.worst_inflation = std::max(trial.worst_inflation, after.report.C_H / before.report.C_H);
    }
    rep.worst_inflation = std::max(rep.worst_inflation, trial.worst_inflation);
    rep.trials.push_back(std::move(trial));
  }
  return rep;
}

}  // namespace hlab
