#include "harnacklab/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "harnacklab/errors.hpp"

namespace hlab {

namespace {

void require_ball_inside(const MetricGraph& mg, Vertex x0, double radius, std::span<const Vertex> D,
                         const char* what) {
  const auto ball = mg.ball(x0, radius);
  if (!is_subset(ball, D)) throw PreconditionError(std::string(what) + ": ball is not contained in the domain");
}

struct Extremes {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  Vertex lo_a = 0, lo_b = 0, hi_a = 0, hi_b = 0;
  void add(double v, Vertex a, Vertex b) {
    if (v < lo) { lo = v; lo_a = a; lo_b = b; }
    if (v > hi) { hi = v; hi_a = a; hi_b = b; }
  }
  bool empty() const { return !(hi >= lo); }
  RatioWitness witness() const { return {hi / lo, hi_a, hi_b, lo_a, lo_b}; }
};

}  // namespace

CapacityResult capacity(const WeightedGraph& g, std::span<const Vertex> A_in, std::span<const Vertex> D_in) {
  CapacityResult res;
  res.A = normalized_set(A_in);
  res.D = normalized_set(D_in);
  if (res.A.empty()) throw ParameterError("capacity of an empty set");
  if (!is_subset(res.A, res.D)) throw ContainmentError("A is not contained in D");
  if (res.D.size() == g.size()) throw TopologyError("domain has empty complement");

  res.h.assign(g.size(), 0.0);
  for (Vertex a : res.A) res.h[a] = 1.0;
  const auto free = set_difference(res.D, res.A);
  if (!free.empty()) {
    DomainProblem dp(g, free);
    std::vector<double> data(dp.boundary().size(), 0.0);
    std::vector<char> inA(g.size(), 0);
    for (Vertex a : res.A) inA[a] = 1;
    for (std::size_t i = 0; i < data.size(); ++i) data[i] = inA[dp.boundary()[i]] ? 1.0 : 0.0;
    auto sol = solve_dirichlet(dp, data);
    res.residual = sol.residual;
    for (Vertex v : free) res.h[v] = std::clamp(sol.values[v], 0.0, 1.0);
  }
  const auto Lh = apply_laplacian(g, res.h);
  res.nu.assign(g.size(), 0.0);
  for (Vertex a : res.A) {
    res.nu[a] = Lh[a];
    res.nu_total += Lh[a];
  }
  res.capacity = energy(g, res.h);
  return res;
}

std::vector<double> hitting_probability(const WeightedGraph& g, std::span<const Vertex> A,
                                        std::span<const Vertex> D) {
  return capacity(g, A, D).h;
}

std::vector<Vertex> inner_boundary(const WeightedGraph& g, std::span<const Vertex> set) {
  std::vector<char> in(g.size(), 0);
  for (Vertex v : set) in[v] = 1;
  std::vector<Vertex> out;
  for (Vertex v : normalized_set(set))
    for (const Neighbor& nb : g.neighbors(v))
      if (!in[nb.vertex]) {
        out.push_back(v);
        break;
      }
  return out;
}

double green_radial(const MetricGraph& mg, const DomainProblem& dp, const Eigen::VectorXd& column,
                    Vertex x, double r) {
  const auto& d = mg.distances_from(x);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < dp.size(); ++i) {
    const double dy = d[dp.domain()[i]];
    if (dy >= r - kDistTol && dy < r + 1.0 - kDistTol) best = std::min(best, column[static_cast<Eigen::Index>(i)]);
  }
  if (!std::isfinite(best)) throw ShellError("empty distance band at r = " + std::to_string(r));
  return best;
}

double green_radial(const MetricGraph& mg, const DomainProblem& dp, Vertex x, double r) {
  return green_radial(mg, dp, green_column(dp, x), x, r);
}

DualityReport cap_green_duality_report(const MetricGraph& mg, Vertex x0, double r,
                                       std::span<const Vertex> D_in, double K) {
  const auto D = normalized_set(D_in);
  require_ball_inside(mg, x0, K * r, D, "cap_green_duality_report");
  const auto& g = mg.graph();
  const auto ball = mg.ball(x0, r);
  const auto cap = capacity(g, ball, D);
  DomainProblem dp(g, D);
  const Eigen::VectorXd col = green_column(dp, x0);
  DualityReport rep;
  rep.mid = 1.0 / cap.capacity;
  Extremes ex;
  for (Vertex z : inner_boundary(g, ball)) ex.add(col[dp.local_index(z)], z, z);
  if (ball.size() == 1) ex.add(col[dp.local_index(x0)], x0, x0);
  rep.lhs = ex.lo;
  rep.sup = ex.hi;
  rep.argmin = ex.lo_a;
  rep.argmax = ex.hi_a;
  rep.C_G_observed = rep.sup / rep.lhs;
  const double tol = 1e-10 * rep.mid;
  rep.lower_holds = rep.lhs <= rep.mid + tol;
  rep.upper_holds = rep.mid <= rep.sup + tol;
  if (!rep.lower_holds)
    throw ConstructionError("Green lower bound exceeds inverse capacity",
                            {{"x0", g.label(x0)}, {"r", r}, {"lhs", rep.lhs}, {"mid", rep.mid}});
  return rep;
}

GreenComparisonReport green_comparison_report(const MetricGraph& mg, std::span<const Vertex> D_in,
                                              Vertex x0, double R, double A, double K) {
  const auto D = normalized_set(D_in);
  require_ball_inside(mg, x0, K * R, D, "green_comparison_report");
  const auto& g = mg.graph();
  DomainProblem dp(g, D);
  const Eigen::VectorXd col = green_column(dp, x0);
  const auto& d0 = mg.distances_from(x0);

  Extremes shell, annulus;
  for (Vertex y : D) {
    const double dy = d0[y];
    const double gy = col[dp.local_index(y)];
    if (dy >= R - kDistTol && dy < R + 1.0 - kDistTol) shell.add(gy, x0, y);
    if (dy >= R / A - kDistTol && dy < R - kDistTol) annulus.add(gy, x0, y);
  }
  if (shell.empty()) throw ShellError("empty distance band at R");
  if (annulus.empty()) throw ShellError("empty annulus");

  const auto ball = mg.ball(x0, R);
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dp.size()),
                                              static_cast<Eigen::Index>(ball.size()));
  for (std::size_t j = 0; j < ball.size(); ++j) rhs(dp.local_index(ball[j]), static_cast<Eigen::Index>(j)) = 1.0;
  const Eigen::MatrixXd cols = dp.solve(rhs);
  Extremes cross;
  for (std::size_t i = 0; i < ball.size(); ++i)
    for (std::size_t j = 0; j < ball.size(); ++j)
      if (mg.distance(ball[i], ball[j]) >= R / 4.0 - kDistTol)
        cross.add(cols(dp.local_index(ball[i]), static_cast<Eigen::Index>(j)), ball[i], ball[j]);

  GreenComparisonReport rep;
  rep.shell = shell.witness();
  rep.annulus = annulus.witness();
  if (!cross.empty()) rep.cross_pair = cross.witness();
  return rep;
}

LogLogFit fit_loglog(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw ParameterError("log-log fit needs matching samples");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw ParameterError("log-log fit needs positive samples");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
  }
  LogLogFit fit;
  const double den = n * sxx - sx * sx;
  fit.slope = den != 0.0 ? (n * sxy - sx * sy) / den : 0.0;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = std::log(y[i]) - fit.intercept - fit.slope * std::log(x[i]);
    ss += e * e;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

GrowthReport green_growth_exponent(const MetricGraph& mg, const DomainProblem& dp, Vertex x,
                                   std::span<const double> radii) {
  if (radii.size() < 3) throw ParameterError("growth fit needs at least three radii");
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] > radii[i - 1])) throw ParameterError("radii must be increasing");
  require_ball_inside(mg, x, 2.0 * radii.back(), dp.domain(), "green_growth_exponent");
  const Eigen::VectorXd col = green_column(dp, x);
  GrowthReport rep;
  rep.radii.assign(radii.begin(), radii.end());
  for (double r : radii) rep.values.push_back(green_radial(mg, dp, col, x, r));
  rep.fit = fit_loglog(rep.radii, rep.values);
  return rep;
}

DomainComparisonReport domain_comparison_report(const MetricGraph& mg, Vertex x0, double R, double A) {
  const auto& g = mg.graph();
  const auto B = mg.ball(x0, R);
  const auto B2 = mg.ball(x0, 2.0 * R);
  if (B2.size() == g.size()) throw PreconditionError("domain_comparison_report: B(x0,2R) has no exterior");
  DomainProblem dp1(g, B), dp2(g, B2);
  const auto inner = mg.ball(x0, R / 4.0);
  DomainComparisonReport rep;
  rep.green_ratio = 0.0;
  for (Vertex y : inner) {
    const Eigen::VectorXd c1 = green_column(dp1, y), c2 = green_column(dp2, y);
    for (Vertex x : inner) {
      const double ratio = c2[dp2.local_index(x)] / c1[dp1.local_index(x)];
      if (ratio > rep.green_ratio) {
        rep.green_ratio = ratio;
        rep.witness_x = x;
        rep.witness_y = y;
      }
    }
  }
  const double r = R / A;
  const auto small = mg.ball(x0, r);
  rep.cap_small_domain = capacity(g, small, mg.ball(x0, A * r)).capacity;
  rep.cap_large_domain = capacity(g, small, mg.ball(x0, 2.0 * A * r)).capacity;
  rep.cap_ratio = rep.cap_small_domain / rep.cap_large_domain;
  rep.monotone = rep.cap_large_domain <= rep.cap_small_domain * (1.0 + 1e-12);
  return rep;
}

SubadditivityReport enhanced_subadditivity_check(const MetricGraph& mg, const SubadditivityInput& in) {
  const auto& g = mg.graph();
  const auto D = normalized_set(in.D);
  const std::size_t n = in.parts.size();
  if (n < 2) throw PreconditionError("enhanced subadditivity needs at least two parts");
  if (in.centers.size() != n) throw PreconditionError("one center per part is required");
  std::vector<char> seen(g.size(), 0);
  std::vector<Vertex> F;
  for (const auto& q : in.parts) {
    if (q.empty()) throw PreconditionError("empty part");
    for (Vertex v : q) {
      if (seen[v]) throw PreconditionError("parts are not disjoint");
      seen[v] = 1;
      F.push_back(v);
    }
  }
  F = normalized_set(F);
  if (!is_subset(F, mg.ball(in.x0, in.R))) throw PreconditionError("F is not inside B(x0,R)");
  if (!is_subset(mg.ball(in.x0, 8.0 * in.R), D)) throw PreconditionError("B(x0,8R) is not inside D");
  for (std::size_t i = 0; i < n; ++i) {
    const auto q = normalized_set(in.parts[i]);
    if (!is_subset(mg.ball(in.centers[i], in.R / (6.0 * in.b)), q))
      throw PreconditionError("B(z_i, R/6b) is not inside Q_i");
  }
  SubadditivityReport rep;
  rep.cap_union = capacity(g, F, D).capacity;
  double sum = 0.0;
  for (const auto& q : in.parts) {
    rep.cap_parts.push_back(capacity(g, q, D).capacity);
    sum += rep.cap_parts.back();
  }
  rep.delta = 1.0 - rep.cap_union / sum;
  if (!(rep.delta > 0.0))
    throw ConstructionError("enhanced subadditivity fails", {{"cap_union", rep.cap_union}, {"sum", sum}});
  return rep;
}

NeumannResult neumann_potential(const WeightedGraph& g, std::span<const Vertex> A1_in,
                                std::span<const Vertex> A2_in, std::span<const Vertex> D_in) {
  const auto A1 = normalized_set(A1_in), A2 = normalized_set(A2_in), D = normalized_set(D_in);
  if (A1.empty() || A2.empty()) throw ParameterError("both sets must be nonempty");
  std::vector<Vertex> overlap;
  std::set_intersection(A1.begin(), A1.end(), A2.begin(), A2.end(), std::back_inserter(overlap));
  if (!overlap.empty()) throw OverlapError("A1 and A2 intersect");
  if (!is_subset(A1, D) || !is_subset(A2, D)) throw ContainmentError("sets must lie in D");

  std::vector<std::ptrdiff_t> local(g.size(), -1);
  std::vector<char> inD(g.size(), 0), fixed(g.size(), 0);
  NeumannResult res;
  res.potential.assign(g.size(), 0.0);
  for (Vertex v : D) inD[v] = 1;
  for (Vertex v : A1) { fixed[v] = 1; res.potential[v] = 1.0; }
  for (Vertex v : A2) fixed[v] = 1;
  std::vector<Vertex> free;
  for (Vertex v : D)
    if (!fixed[v]) free.push_back(v);

  // Components of the free set that never touch A1 u A2 carry a free constant; pin them at 0.
  std::vector<Vertex> solvable;
  for (const auto& comp : induced_components(g, free)) {
    bool touches = false;
    for (Vertex v : comp)
      for (const Neighbor& nb : g.neighbors(v))
        if (fixed[nb.vertex]) touches = true;
    if (touches) solvable.insert(solvable.end(), comp.begin(), comp.end());
  }
  std::sort(solvable.begin(), solvable.end());
  for (std::size_t i = 0; i < solvable.size(); ++i) local[solvable[i]] = static_cast<std::ptrdiff_t>(i);

  if (!solvable.empty()) {
    const auto n = static_cast<Eigen::Index>(solvable.size());
    std::vector<Eigen::Triplet<double>> trip;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Vertex v = solvable[static_cast<std::size_t>(i)];
      double diag = 0.0;
      for (const Neighbor& nb : g.neighbors(v)) {
        if (!inD[nb.vertex]) continue;
        diag += nb.weight;
        if (local[nb.vertex] >= 0) trip.emplace_back(i, local[nb.vertex], -nb.weight);
        else if (fixed[nb.vertex]) rhs[i] += nb.weight * res.potential[nb.vertex];
      }
      trip.emplace_back(i, i, diag);
    }
    Eigen::SparseMatrix<double> L(n, n);
    L.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> chol(L);
    if (chol.info() != Eigen::Success) throw TopologyError("Neumann system is singular");
    const Eigen::VectorXd f = chol.solve(rhs);
    for (Eigen::Index i = 0; i < n; ++i) res.potential[solvable[static_cast<std::size_t>(i)]] = f[i];
  }
  res.capacity = induced_energy(g, res.potential, D);
  return res;
}

double neumann_capacity(const WeightedGraph& g, std::span<const Vertex> A1, std::span<const Vertex> A2,
                        std::span<const Vertex> D) {
  return neumann_potential(g, A1, A2, D).capacity;
}

}  // namespace hlab
