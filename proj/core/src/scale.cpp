#include "harnacklab/scale.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "harnacklab/errors.hpp"
#include "harnacklab/parallel.hpp"
#include "harnacklab/rng.hpp"

namespace hlab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kFitCenterLimit = 32;
constexpr std::size_t kTripleExhaustiveLimit = 500;
constexpr std::size_t kTripleSamples = 2'000'000;
constexpr std::size_t kMaxHalvings = 6;

struct RegSample {
  double u, v, q;
};

void fit_regularity(ScaleFunction& sf, const MetricGraph& mg) {
  std::vector<std::size_t> rows;
  const std::size_t nc = sf.centers.size();
  const std::size_t stride = std::max<std::size_t>(1, (nc + kFitCenterLimit - 1) / kFitCenterLimit);
  for (std::size_t i = 0; i < nc; i += stride) rows.push_back(i);
  sf.fit_subsampled = stride > 1;

  std::vector<RegSample> samples;
  for (std::size_t i : rows)
    for (std::size_t j : rows) {
      const double R = mg.distance(sf.centers[i], sf.centers[j]);
      for (std::size_t a = 0; a < sf.radii.size(); ++a)
        for (std::size_t b = 0; b <= a; ++b) {
          const double pr = sf.psi[i][a], ps = sf.psi[j][b];
          if (!(pr > 0.0) || !(ps > 0.0)) continue;
          const double r = sf.radii[a], s = sf.radii[b], Rr = std::max(R, r);
          samples.push_back({std::log(r / Rr), std::log(Rr / s), std::log(pr / ps)});
        }
    }
  sf.fit_samples = samples.size();
  if (samples.empty()) return;

  // log C1 alone always prefers the widest exponent pair; each unit of
  // beta2 - beta1 is charged as one extra factor 2 per doubling of scale.
  double best = kInf, best_c = 0.0;
  for (int i1 = 1; i1 <= 160; ++i1)
    for (int i2 = i1; i2 <= 160; ++i2) {
      const double b1 = 0.05 * i1, b2 = 0.05 * i2;
      const double width = (b2 - b1) * std::log(2.0);
      double c = -kInf;
      for (const auto& s : samples) {
        c = std::max(c, b2 * s.u + b1 * s.v - s.q);
        c = std::max(c, s.q - b1 * s.u - b2 * s.v);
        if (c + width >= best) break;
      }
      if (c + width < best) {
        best = c + width;
        best_c = c;
        sf.beta1 = b1;
        sf.beta2 = b2;
      }
    }
  sf.C1 = std::exp(std::max(0.0, best_c));
}

}  // namespace

std::size_t ScaleFunction::row(Vertex x) const {
  const auto it = std::find(centers.begin(), centers.end(), x);
  if (it == centers.end()) throw ParameterError("vertex is not a sampled center of the scale function");
  return static_cast<std::size_t>(it - centers.begin());
}

double ScaleFunction::value(Vertex x, double t) const {
  if (t <= 0.0) return 0.0;
  const auto& p = psi[row(x)];
  std::vector<std::pair<double, double>> pts;
  for (std::size_t j = 0; j < radii.size(); ++j)
    if (p[j] > 0.0) pts.emplace_back(std::log(radii[j]), std::log(p[j]));
  if (pts.size() < 2) throw ParameterError("scale function needs two admissible radii to interpolate");
  const double lt = std::log(t);
  std::size_t j = 1;
  while (j + 1 < pts.size() && pts[j].first < lt) ++j;
  const auto [x0, y0] = pts[j - 1];
  const auto [x1, y1] = pts[j];
  return std::exp(y0 + (y1 - y0) / (x1 - x0) * (lt - x0));
}

ScaleFunction scale_function(const MetricGraph& mg, const VertexMeasure& mu, std::span<const Vertex> centers,
                             std::span<const double> radii_in) {
  if (mu.size() != mg.size()) throw ParameterError("measure size does not match the graph");
  if (centers.empty() || radii_in.empty()) throw ParameterError("scale function needs centers and radii");
  ScaleFunction sf;
  sf.centers.assign(centers.begin(), centers.end());
  sf.radii.assign(radii_in.begin(), radii_in.end());
  std::sort(sf.radii.begin(), sf.radii.end());
  sf.radii.erase(std::unique(sf.radii.begin(), sf.radii.end()), sf.radii.end());
  for (double r : sf.radii)
    if (!(r > 0.0)) throw ParameterError("scale function radii must be positive");
  const auto& g = mg.graph();
  const double bottom = g.min_edge_length();
  sf.psi.assign(sf.centers.size(), std::vector<double>(sf.radii.size(), kNaN));
  sf.singleton_inner.assign(sf.centers.size(), std::vector<char>(sf.radii.size(), 0));
  parallel_for(sf.centers.size(), [&](std::size_t i) {
    const Vertex x = sf.centers[i];
    for (std::size_t j = 0; j < sf.radii.size(); ++j) {
      const double r = sf.radii[j];
      const auto B = mg.ball(x, r);
      if (B.size() == g.size()) continue;
      sf.singleton_inner[i][j] = r / 8.0 <= bottom + kDistTol ? 1 : 0;
      const auto inner = mg.ball(x, r / 8.0);
      sf.psi[i][j] = measure_of(mu, B) / capacity(g, inner, B).capacity;
    }
  });
  for (std::size_t i = 0; i < sf.centers.size(); ++i) {
    double prev = 0.0;
    for (std::size_t j = 0; j < sf.radii.size(); ++j) {
      const double p = sf.psi[i][j];
      if (std::isnan(p)) {
        ++sf.inadmissible;
        continue;
      }
      if (!(p > prev)) sf.monotone = false;
      prev = p;
    }
  }
  fit_regularity(sf, mg);
  return sf;
}

LogLogFit psi_growth(const ScaleFunction& sf, Vertex x) {
  const auto& p = sf.psi[sf.row(x)];
  std::vector<double> rs, ps;
  for (std::size_t j = 0; j < sf.radii.size(); ++j)
    if (p[j] > 0.0) {
      rs.push_back(sf.radii[j]);
      ps.push_back(p[j]);
    }
  return fit_loglog(rs, ps);
}

Eigen::MatrixXd distance_matrix(const MetricGraph& mg) {
  const auto n = static_cast<Eigen::Index>(mg.size());
  Eigen::MatrixXd d(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = mg.distances_from(static_cast<Vertex>(i));
    for (Eigen::Index j = 0; j < n; ++j) d(i, j) = row[static_cast<std::size_t>(j)];
  }
  return d;
}

ChainMetric build_chain_metric(const MetricGraph& mg, const PsiFn& psi) {
  const std::size_t n = mg.size();
  const auto N = static_cast<Eigen::Index>(n);
  ChainMetric cm;
  const Eigen::MatrixXd d = distance_matrix(mg);
  cm.D = Eigen::MatrixXd::Zero(N, N);
  for (Eigen::Index i = 0; i < N; ++i)
    for (Eigen::Index j = 0; j < N; ++j)
      if (i != j) cm.D(i, j) = psi(static_cast<Vertex>(i), d(i, j)) + psi(static_cast<Vertex>(j), d(i, j));

  auto triple = [&](Eigen::Index x, Eigen::Index y, Eigen::Index z) {
    if (x == y || x == z || y == z) return 0.0;
    return cm.D(x, y) / (cm.D(x, z) + cm.D(z, y));
  };
  if (n <= kTripleExhaustiveLimit) {
    std::vector<double> worst(n, 1.0);
    parallel_for(n, [&](std::size_t xi) {
      const auto x = static_cast<Eigen::Index>(xi);
      for (Eigen::Index y = 0; y < N; ++y)
        for (Eigen::Index z = 0; z < N; ++z) worst[xi] = std::max(worst[xi], triple(x, y, z));
    });
    cm.K = *std::max_element(worst.begin(), worst.end());
  } else {
    cm.K_sampled = true;
    const CounterRng rng(0);
    for (std::size_t s = 0; s < kTripleSamples; ++s) {
      const auto x = static_cast<Eigen::Index>(rng.bits(3 * s) % n);
      const auto y = static_cast<Eigen::Index>(rng.bits(3 * s + 1) % n);
      const auto z = static_cast<Eigen::Index>(rng.bits(3 * s + 2) % n);
      cm.K = std::max(cm.K, triple(x, y, z));
    }
  }

  cm.epsilon = std::min(1.0, std::log(2.0) / std::log(2.0 * cm.K));
  for (;; ++cm.halvings) {
    Eigen::MatrixXd P = cm.D.array().pow(cm.epsilon).matrix();
    Eigen::MatrixXd dp = P;
    for (Eigen::Index k = 0; k < N; ++k)
      for (Eigen::Index j = 0; j < N; ++j) {
        const double dkj = dp(k, j);
        for (Eigen::Index i = 0; i < N; ++i) dp(i, j) = std::min(dp(i, j), dp(i, k) + dkj);
      }
    double lower = kInf;
    Eigen::Index wi = 0, wj = 0;
    for (Eigen::Index i = 0; i < N; ++i)
      for (Eigen::Index j = 0; j < N; ++j)
        if (i != j && dp(i, j) / P(i, j) < lower) {
          lower = dp(i, j) / P(i, j);
          wi = i;
          wj = j;
        }
    cm.lower_ratio = n > 1 ? lower : 1.0;
    if (cm.lower_ratio >= 0.25 - 1e-12) {
      cm.dpsi = std::move(dp);
      break;
    }
    if (cm.halvings == kMaxHalvings)
      throw ConstructionError("chain metric stays below a quarter of the quasi-metric",
                              {{"x", mg.graph().label(static_cast<Vertex>(wi))},
                               {"y", mg.graph().label(static_cast<Vertex>(wj))},
                               {"ratio", lower},
                               {"epsilon", cm.epsilon}});
    cm.epsilon *= 0.5;
  }
  cm.beta = 1.0 / cm.epsilon;

  for (Eigen::Index i = 0; i < N; ++i)
    for (Eigen::Index j = 0; j < N; ++j) {
      if (i == j) continue;
      const double p = psi(static_cast<Vertex>(i), d(i, j));
      const double q = std::pow(cm.dpsi(i, j), cm.beta) / p;
      const double c = std::max(q, 1.0 / q);
      if (c > cm.defbeta_C) {
        cm.defbeta_C = c;
        cm.defbeta_x = static_cast<Vertex>(i);
        cm.defbeta_y = static_cast<Vertex>(j);
      }
    }
  return cm;
}

ChainMetric build_chain_metric(const MetricGraph& mg, const ScaleFunction& sf) {
  std::vector<std::size_t> rows(mg.size());
  for (Vertex v = 0; v < mg.size(); ++v) rows[v] = sf.row(v);
  return build_chain_metric(mg, [&](Vertex x, double t) { return sf.value(sf.centers[rows[x]], t); });
}

double QsEnvelope::eta(double t) const { return C * std::max(std::pow(t, gamma1), std::pow(t, gamma2)); }

QsEnvelope quasisymmetry_distortion(const Eigen::MatrixXd& d1, const Eigen::MatrixXd& d2, std::uint64_t seed) {
  if (d1.rows() != d2.rows() || d1.cols() != d2.cols() || d1.rows() != d1.cols())
    throw ParameterError("metrics must live on the same vertex set");
  const auto n = static_cast<std::size_t>(d1.rows());
  QsEnvelope env;
  std::vector<QsPoint> pts;
  auto add = [&](std::size_t x, std::size_t a, std::size_t b) {
    if (a == x || b == x || a == b) return;
    const auto X = static_cast<Eigen::Index>(x), A = static_cast<Eigen::Index>(a), B = static_cast<Eigen::Index>(b);
    pts.push_back({d1(X, A) / d1(X, B), d2(X, A) / d2(X, B)});
  };
  if (n <= kQsExhaustiveLimit) {
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) add(x, a, b);
  } else {
    env.sampled = true;
    const CounterRng rng(seed);
    for (std::size_t s = 0; s < kTripleSamples; ++s)
      add(rng.bits(3 * s) % n, rng.bits(3 * s + 1) % n, rng.bits(3 * s + 2) % n);
  }
  env.triples = pts.size();
  if (pts.empty()) return env;

  double lo_xx = 0, lo_xy = 0, hi_xx = 0, hi_xy = 0;
  for (const auto& p : pts) {
    const double lt = std::log(p.t), lu = std::log(p.u);
    if (p.t < 1.0) {
      lo_xx += lt * lt;
      lo_xy += lt * lu;
    } else if (p.t > 1.0) {
      hi_xx += lt * lt;
      hi_xy += lt * lu;
    }
  }
  const double pooled = (lo_xx + hi_xx) > 0.0 ? (lo_xy + hi_xy) / (lo_xx + hi_xx) : 1.0;
  env.gamma1 = lo_xx > 0.0 ? lo_xy / lo_xx : pooled;
  env.gamma2 = hi_xx > 0.0 ? hi_xy / hi_xx : pooled;
  if (env.gamma1 > env.gamma2) env.gamma1 = env.gamma2 = pooled;
  env.C = 0.0;
  for (const auto& p : pts)
    env.C = std::max(env.C, p.u / std::max(std::pow(p.t, env.gamma1), std::pow(p.t, env.gamma2)));

  const std::size_t step = std::max<std::size_t>(1, (pts.size() + kScatterLimit - 1) / kScatterLimit);
  for (std::size_t i = 0; i < pts.size(); i += step) env.scatter.push_back(pts[i]);
  return env;
}

AnnuliCertificate annuli_comparison(const Eigen::MatrixXd& d1, const Eigen::MatrixXd& d2, Vertex x, double r,
                                    double A, const QsEnvelope* envelope) {
  if (!(r > 0.0) || !(A > 1.0)) throw ParameterError("annuli comparison needs r > 0 and A > 1");
  if (d1.rows() != d2.rows() || static_cast<Eigen::Index>(x) >= d1.rows())
    throw ParameterError("metrics must live on the same vertex set");
  const auto X = static_cast<Eigen::Index>(x);
  const Eigen::Index n = d1.rows();
  AnnuliCertificate c;
  c.x = x;
  c.r = r;
  c.A = A;

  c.s = kInf;
  double far2 = 0.0;
  for (Eigen::Index y = 0; y < n; ++y) {
    if (d1(X, y) >= r - kDistTol) c.s = std::min(c.s, d2(X, y));
    if (d1(X, y) < A * r - kDistTol) far2 = std::max(far2, d2(X, y));
  }
  c.eta_needed = std::isfinite(c.s) && c.s > 0.0 ? far2 / c.s : 0.0;
  if (envelope) {
    c.eta_A = envelope->eta(A);
    c.chain_holds = !std::isfinite(c.s) || far2 < c.eta_A * c.s - kDistTol;
  }

  c.s_dual = 0.0;
  for (Eigen::Index y = 0; y < n; ++y)
    if (d1(X, y) < r - kDistTol) c.s_dual = std::max(c.s_dual, d2(X, y));
  double far1 = 0.0;
  for (Eigen::Index y = 0; y < n; ++y)
    if (d2(X, y) <= A * c.s_dual + kDistTol) far1 = std::max(far1, d1(X, y));
  c.A1_needed = far1 / r;
  if (envelope) {
    const double y = 1.0 / A;
    const double t = y <= envelope->C ? std::pow(y / envelope->C, 1.0 / envelope->gamma1)
                                      : std::pow(y / envelope->C, 1.0 / envelope->gamma2);
    c.A1 = 1.0 / t;
    c.dual_holds = far1 < c.A1 * r - kDistTol;
  }
  return c;
}

}  // namespace hlab
