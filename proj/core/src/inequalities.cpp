#include "harnacklab/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "harnacklab/errors.hpp"
#include "harnacklab/parallel.hpp"

namespace hlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<std::size_t> index_map(std::size_t n, std::span<const Vertex> set) {
  std::vector<std::size_t> idx(n, std::numeric_limits<std::size_t>::max());
  for (std::size_t i = 0; i < set.size(); ++i) idx[set[i]] = i;
  return idx;
}

// Top eigenpair of M against diag(d) (d > 0).
std::pair<double, Eigen::VectorXd> top_generalized(const Eigen::MatrixXd& M, const Eigen::VectorXd& d) {
  const Eigen::VectorXd s = d.cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd B = s.asDiagonal() * M * s.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B);
  const Eigen::Index top = B.rows() - 1;
  return {es.eigenvalues()(top), s.cwiseProduct(es.eigenvectors().col(top))};
}

}  // namespace

std::vector<Vertex> matrix_ball(const Eigen::MatrixXd& d, Vertex x, double r) {
  std::vector<Vertex> out;
  const auto X = static_cast<Eigen::Index>(x);
  for (Eigen::Index y = 0; y < d.cols(); ++y)
    if (d(X, y) < r - kDistTol) out.push_back(static_cast<Vertex>(y));
  return out;
}

PIReport pi_constant_on(const WeightedGraph& g, const VertexMeasure& mu, std::span<const Vertex> inner_in,
                        std::span<const Vertex> outer_in, double psi) {
  const auto inner = normalized_set(inner_in);
  const auto outer = normalized_set(outer_in);
  if (!(psi > 0.0)) throw ParameterError("Poincare constant needs a positive scale value");
  if (!is_subset(inner, outer)) throw ContainmentError("Poincare inner ball is not inside the outer ball");
  PIReport rep;
  rep.psi = psi;
  rep.inner_size = inner.size();
  rep.outer_size = outer.size();
  rep.witness.assign(g.size(), 0.0);
  if (inner.size() <= 1) return rep;

  const auto idx = index_map(g.size(), outer);
  const auto m = static_cast<Eigen::Index>(outer.size());
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(m, m);
  for (const Edge& e : g.edges()) {
    const auto a = idx[e.u], b = idx[e.v];
    if (a == std::numeric_limits<std::size_t>::max() || b == std::numeric_limits<std::size_t>::max()) continue;
    const auto A = static_cast<Eigen::Index>(a), B = static_cast<Eigen::Index>(b);
    L(A, A) += e.weight;
    L(B, B) += e.weight;
    L(A, B) -= e.weight;
    L(B, A) -= e.weight;
  }
  Eigen::VectorXd w = Eigen::VectorXd::Zero(m);
  double total = 0.0;
  for (Vertex v : inner) {
    w(static_cast<Eigen::Index>(idx[v])) = mu[v];
    total += mu[v];
  }
  const Eigen::MatrixXd N = Eigen::MatrixXd(w.asDiagonal()) - w * w.transpose() / total;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L);
  const double tol = 1e-10 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  std::vector<Eigen::Index> range, kernel;
  for (Eigen::Index i = 0; i < m; ++i) (es.eigenvalues()(i) > tol ? range : kernel).push_back(i);
  for (Eigen::Index i : kernel) {
    const Eigen::VectorXd k = es.eigenvectors().col(i);
    if (k.dot(N * k) > 1e-12 * N.norm()) {
      rep.C = rep.rayleigh = kInf;
      return rep;
    }
  }
  Eigen::MatrixXd W(m, static_cast<Eigen::Index>(range.size()));
  for (std::size_t j = 0; j < range.size(); ++j)
    W.col(static_cast<Eigen::Index>(j)) = es.eigenvectors().col(range[j]) / std::sqrt(es.eigenvalues()(range[j]));
  const Eigen::MatrixXd B = W.transpose() * N * W;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> top(B);
  rep.rayleigh = top.eigenvalues()(B.rows() - 1);
  rep.C = rep.rayleigh / psi;
  const Eigen::VectorXd f = W * top.eigenvectors().col(B.rows() - 1);
  for (std::size_t i = 0; i < outer.size(); ++i) rep.witness[outer[i]] = f(static_cast<Eigen::Index>(i));
  rep.witness_quotient = f.dot(N * f) / f.dot(L * f);
  return rep;
}

PIReport pi_constant(const MetricGraph& mg, const VertexMeasure& mu, Vertex x, double R, double A, double psi) {
  if (!(R > 0.0) || !(A >= 1.0)) throw ParameterError("Poincare constant needs R > 0 and A >= 1");
  return pi_constant_on(mg.graph(), mu, mg.ball(x, R), mg.ball(x, A * R), psi);
}

CutoffFunction build_cutoff(const MetricGraph& mg, Vertex x, double R1, double R2, CutoffKind kind) {
  if (!(R1 < R2)) throw ParameterError("cutoff needs R1 < R2");
  if (kind == CutoffKind::annulus_composite) throw ParameterError("composite cutoffs come from annulus_cutoff");
  const auto B1 = mg.ball(x, R1);
  const auto B2 = mg.ball(x, R2);
  CutoffFunction phi{kind, x, R1, R2, std::vector<double>(mg.size(), 0.0)};
  if (B2.size() == mg.size()) {
    if (B1.size() != mg.size()) throw PreconditionError("cutoff outer ball has no exterior");
    std::fill(phi.values.begin(), phi.values.end(), 1.0);
    return phi;
  }
  if (kind == CutoffKind::distance_linear) {
    const auto& d = mg.distances_from(x);
    for (Vertex v = 0; v < mg.size(); ++v) phi.values[v] = std::clamp((R2 - d[v]) / (R2 - R1), 0.0, 1.0);
  } else {
    phi.values = capacity(mg.graph(), B1, B2).h;
  }
  return phi;
}

bool is_cutoff(const MetricGraph& mg, const CutoffFunction& phi) {
  const auto& d = mg.distances_from(phi.x);
  for (Vertex v = 0; v < mg.size(); ++v) {
    const double f = phi.values[v];
    if (f < -1e-12 || f > 1.0 + 1e-12) return false;
    if (d[v] < phi.R1 - kDistTol && std::abs(f - 1.0) > 1e-12) return false;
    if (d[v] >= phi.R2 - kDistTol && std::abs(f) > 1e-12) return false;
  }
  return true;
}

Eigen::MatrixXd annulus_energy_form(const WeightedGraph& g, std::span<const Vertex> U_in) {
  const auto U = normalized_set(U_in);
  const auto N = outer_boundary(g, U);
  const auto iu = index_map(g.size(), U);
  const auto in = index_map(g.size(), N);
  const auto nu = static_cast<Eigen::Index>(U.size());
  const auto nn = static_cast<Eigen::Index>(N.size());
  Eigen::MatrixXd Quu = Eigen::MatrixXd::Zero(nu, nu);
  Eigen::MatrixXd Qun = Eigen::MatrixXd::Zero(nu, nn);
  Eigen::VectorXd Qnn = Eigen::VectorXd::Zero(nn);
  constexpr auto none = std::numeric_limits<std::size_t>::max();
  for (const Edge& e : g.edges()) {
    const bool a_in = iu[e.u] != none, b_in = iu[e.v] != none;
    if (a_in && b_in) {
      const auto a = static_cast<Eigen::Index>(iu[e.u]), b = static_cast<Eigen::Index>(iu[e.v]);
      Quu(a, a) += e.weight;
      Quu(b, b) += e.weight;
      Quu(a, b) -= e.weight;
      Quu(b, a) -= e.weight;
    } else if (a_in || b_in) {
      const Vertex u = a_in ? e.u : e.v, o = a_in ? e.v : e.u;
      const auto a = static_cast<Eigen::Index>(iu[u]), b = static_cast<Eigen::Index>(in[o]);
      const double c = 0.5 * e.weight;
      Quu(a, a) += c;
      Qnn(b) += c;
      Qun(a, b) -= c;
    }
  }
  if (nn == 0) return Quu;
  return Quu - Qun * Qnn.cwiseInverse().asDiagonal() * Qun.transpose();
}

namespace {

Eigen::MatrixXd cs_excess(const WeightedGraph& g, std::span<const Vertex> U, std::span<const double> phi,
                          double C1) {
  const auto gam = gamma_density(g, phi);
  Eigen::MatrixXd M = -C1 * annulus_energy_form(g, U);
  for (std::size_t i = 0; i < U.size(); ++i) M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) += gam[U[i]];
  return M;
}

Eigen::VectorXd restricted(const VertexMeasure& mu, std::span<const Vertex> U) {
  Eigen::VectorXd d(static_cast<Eigen::Index>(U.size()));
  for (std::size_t i = 0; i < U.size(); ++i) d(static_cast<Eigen::Index>(i)) = mu[U[i]];
  return d;
}

}  // namespace

CSReport cs_verify_on(const WeightedGraph& g, const VertexMeasure& mu, std::span<const Vertex> U_in,
                      std::span<const double> phi, double C1, double psi) {
  if (!(psi > 0.0) || !(C1 >= 0.0)) throw ParameterError("cutoff energy check needs psi > 0 and C1 >= 0");
  const auto U = normalized_set(U_in);
  CSReport rep;
  rep.C1 = C1;
  rep.psi = psi;
  rep.annulus_size = U.size();
  rep.witness.assign(g.size(), 0.0);
  if (U.empty()) return rep;
  const auto [lambda, u] = top_generalized(cs_excess(g, U, phi, C1), restricted(mu, U));
  rep.lambda = lambda;
  rep.C2 = psi * std::max(0.0, lambda);
  const double scale = u.cwiseAbs().maxCoeff();
  for (std::size_t i = 0; i < U.size(); ++i) rep.witness[U[i]] = u(static_cast<Eigen::Index>(i)) / scale;
  return rep;
}

CSReport cs_verify(const MetricGraph& mg, const VertexMeasure& mu, Vertex x, double R, double A,
                   std::span<const double> phi, double C1, double psi) {
  if (!(R > 0.0) || !(A > 1.0)) throw ParameterError("cutoff energy check needs R > 0 and A > 1");
  const auto U = set_difference(mg.ball(x, A * R), mg.ball(x, R));
  return cs_verify_on(mg.graph(), mu, U, phi, C1, psi);
}

double cs_form_min_eigenvalue(const WeightedGraph& g, const VertexMeasure& mu, std::span<const Vertex> U_in,
                              std::span<const double> phi, double C1, double C2, double psi) {
  const auto U = normalized_set(U_in);
  if (U.empty()) return 0.0;
  const Eigen::VectorXd d = restricted(mu, U);
  Eigen::MatrixXd M = -cs_excess(g, U, phi, C1);
  M.diagonal() += (C2 / psi) * d;
  const Eigen::VectorXd s = d.cwiseSqrt().cwiseInverse();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s.asDiagonal() * M * s.asDiagonal(), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

AnnulusReport annulus_cutoff(const MetricGraph& mg, const VertexMeasure& mu, Vertex x0, double R, double r,
                             double psi, int A) {
  if (!(r > 0.0) || !(R >= 0.0) || A < 1) throw ParameterError("annulus cutoff needs r > 0, R >= 0, A >= 1");
  const auto& g = mg.graph();
  const auto outer = mg.ball(x0, R + r);
  if (outer.size() == mg.size()) throw PreconditionError("B(x0, R+r) has no exterior");

  AnnulusReport rep;
  rep.x0 = x0;
  rep.R = R;
  rep.r = r;
  rep.A = A;
  rep.psi = psi;
  const std::size_t lower = static_cast<std::size_t>(2 * A + 5);
  std::size_t n = static_cast<std::size_t>(8 * (A + 8));
  // the enlarged balls B(z, A r/n) must reach past their centers
  const double bottom = g.min_edge_length();
  if (A * r / static_cast<double>(n) <= bottom + kDistTol) {
    n = static_cast<std::size_t>(std::ceil(A * r / bottom)) - 1;
    while (n > 0 && A * r / static_cast<double>(n) <= bottom + kDistTol) --n;
    rep.n_reduced = true;
  }
  if (n < lower) throw ParameterError("graph too coarse for an annulus cutoff at this r");
  rep.n = n;
  const double step = r / static_cast<double>(n);

  const auto centers = epsilon_net(mg, step, outer).points;
  rep.balls = centers.size();
  std::vector<std::vector<double>> local(centers.size());
  parallel_for(centers.size(), [&](std::size_t i) {
    const auto Bi = mg.ball(centers[i], step);
    const auto Bs = mg.ball(centers[i], A * step);
    if (Bs.size() == mg.size()) {
      const auto& d = mg.distances_from(centers[i]);
      local[i].resize(mg.size());
      for (Vertex v = 0; v < mg.size(); ++v)
        local[i][v] = std::clamp((A * step - d[v]) / (A * step - step), 0.0, 1.0);
    } else {
      local[i] = capacity(g, Bi, Bs).h;
    }
  });

  const auto& d0 = mg.distances_from(x0);
  std::vector<double> phi(mg.size(), 0.0);
  const std::size_t jlo = static_cast<std::size_t>(A + 3), jhi = n - static_cast<std::size_t>(A) - 2;
  for (std::size_t j = jlo; j <= jhi; ++j) {
    std::vector<double> psi_j(mg.size(), 0.0);
    for (std::size_t i = 0; i < centers.size(); ++i)
      if (d0[centers[i]] < R + static_cast<double>(j) * step - kDistTol)
        for (Vertex v = 0; v < mg.size(); ++v) psi_j[v] = std::max(psi_j[v], local[i][v]);
    for (Vertex v = 0; v < mg.size(); ++v) phi[v] += psi_j[v];
    ++rep.shells;
  }
  for (double& v : phi) v /= static_cast<double>(rep.shells);
  rep.phi = {CutoffKind::annulus_composite, x0, R, R + r, std::move(phi)};
  rep.cutoff_ok = is_cutoff(mg, rep.phi);

  const auto U = set_difference(outer, mg.ball(x0, R));
  rep.multiplier = cs_verify_on(g, mu, U, rep.phi.values, rep.gradient_coefficient, psi).C2;
  return rep;
}

double fit_annulus_gamma(std::span<const AnnulusReport> reports) {
  std::vector<double> x, y;
  for (const auto& r : reports)
    if (r.multiplier > 0.0) {
      x.push_back((r.R + r.r) / r.r);
      y.push_back(r.multiplier);
    }
  if (x.size() < 2) return 0.0;
  return fit_loglog(x, y).slope;
}

EnergyOfMax energy_of_max_check(const WeightedGraph& g, std::span<const double> f, std::span<const double> phi1,
                                std::span<const double> phi2) {
  std::vector<double> top(g.size());
  for (Vertex v = 0; v < g.size(); ++v) top[v] = std::max(phi1[v], phi2[v]);
  const auto g0 = gamma_density(g, top), g1 = gamma_density(g, phi1), g2 = gamma_density(g, phi2);
  EnergyOfMax out;
  for (Vertex v = 0; v < g.size(); ++v) {
    out.lhs += f[v] * f[v] * g0[v];
    out.rhs += f[v] * f[v] * (g1[v] + g2[v]);
  }
  out.margin = out.rhs - out.lhs;
  return out;
}

CapPsiReport cap_psi_report(const MetricGraph& mg, const VertexMeasure& mu, const PsiFn& psi,
                            std::span<const Vertex> centers, std::span<const double> radii, double kappa) {
  if (!(kappa > 0.0 && kappa < 1.0)) throw ParameterError("kappa must lie in (0,1)");
  CapPsiReport rep;
  rep.kappa = kappa;
  std::vector<CapPsiCell> cells;
  for (Vertex x : centers)
    for (double r : radii) cells.push_back({x, r, std::numeric_limits<double>::quiet_NaN()});
  parallel_for(cells.size(), [&](std::size_t i) {
    auto& c = cells[i];
    const auto B = mg.ball(c.x, c.r);
    if (B.size() == mg.size()) return;
    const double cap = capacity(mg.graph(), mg.ball(c.x, kappa * c.r), B).capacity;
    c.ratio = cap * psi(c.x, c.r) / measure_of(mu, B);
  });
  double lo = kInf, hi = 0.0;
  for (const auto& c : cells) {
    if (std::isnan(c.ratio)) {
      ++rep.skipped;
      continue;
    }
    rep.cells.push_back(c);
    if (c.ratio < lo) {
      lo = c.ratio;
      rep.worst_low = c;
    }
    if (c.ratio > hi) {
      hi = c.ratio;
      rep.worst_high = c;
    }
  }
  if (!rep.cells.empty()) rep.C = std::max({1.0, hi, 1.0 / lo});
  return rep;
}

}  // namespace hlab
