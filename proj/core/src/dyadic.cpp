#include "harnacklab/dyadic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "harnacklab/errors.hpp"
#include "harnacklab/parallel.hpp"
#include "harnacklab/potential.hpp"

namespace hlab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kRatioSlack = 1e-9;

bool contains_sorted(const std::vector<Vertex>& set, Vertex v) {
  return std::binary_search(set.begin(), set.end(), v);
}

// Capacity domain B(x, rad), replaced by B(x, ecc(x)) when it has no exterior.
std::pair<std::vector<Vertex>, bool> capacity_domain(const MetricGraph& mg, Vertex x, double rad) {
  auto D = mg.ball(x, rad);
  if (D.size() < mg.size()) return {std::move(D), false};
  return {mg.ball(x, mg.eccentricity(x)), true};
}

}  // namespace

double CubeHierarchy::scale(std::size_t k) const { return r * std::pow(A, -static_cast<double>(k)); }

std::vector<Vertex> CubeHierarchy::cube(std::size_t k, Vertex center) const {
  std::vector<Vertex> out;
  for (Vertex v : B0)
    if (center_of[k][v] == center) out.push_back(v);
  return out;
}

std::size_t CubeHierarchy::branching_bound() const {
  std::size_t cm = 1;
  for (std::size_t k = 0; k < depth; ++k)
    for (Vertex x : nets[k]) cm = std::max(cm, children[k][x].size());
  return cm;
}

CubeHierarchy build_cube_hierarchy(const MetricGraph& mg, Vertex x0, double r, double A) {
  if (!(r >= 1.0)) throw ParameterError("cube hierarchy needs r >= 1");
  if (!(A >= 4.0)) throw ParameterError("cube hierarchy needs A >= 4");
  if (x0 >= mg.size()) throw ParameterError("center is not a vertex");
  const std::size_t n = mg.size();
  CubeHierarchy h;
  h.x0 = x0;
  h.r = r;
  h.A = A;
  h.B0 = mg.ball(x0, r);
  const double bottom = mg.graph().min_edge_length();
  while (h.scale(h.depth) > bottom + kDistTol) ++h.depth;

  h.nets.push_back({x0});
  for (std::size_t k = 1; k <= h.depth; ++k)
    h.nets.push_back(epsilon_net(mg, h.scale(k), h.B0, h.nets[k - 1]).points);

  h.parent.assign(h.depth + 1, std::vector<Vertex>(n, kNoVertex));
  h.children.assign(h.depth + 1, std::vector<std::vector<Vertex>>(n));
  for (std::size_t k = 1; k <= h.depth; ++k) {
    const auto& prev = h.nets[k - 1];
    std::vector<Vertex> prev_sorted(prev.begin(), prev.end());
    std::sort(prev_sorted.begin(), prev_sorted.end());
    for (Vertex y : h.nets[k]) {
      Vertex p = y;
      if (!contains_sorted(prev_sorted, y)) {
        const auto& dy = mg.distances_from(y);
        double best = std::numeric_limits<double>::infinity();
        for (Vertex c : prev_sorted)
          if (dy[c] < best - kDistTol) {
            best = dy[c];
            p = c;
          }
      }
      h.parent[k][y] = p;
      h.children[k - 1][p].push_back(y);
    }
    for (Vertex c : prev) std::sort(h.children[k - 1][c].begin(), h.children[k - 1][c].end());
  }

  h.center_of.assign(h.depth + 1, std::vector<Vertex>(n, kNoVertex));
  for (Vertex v : h.B0) h.center_of[h.depth][v] = v;
  for (std::size_t k = h.depth; k-- > 0;)
    for (Vertex v : h.B0) h.center_of[k][v] = h.parent[k + 1][h.center_of[k + 1][v]];
  return h;
}

HierarchyCheck check_hierarchy(const MetricGraph& mg, const CubeHierarchy& h) {
  HierarchyCheck chk;
  for (std::size_t k = 0; k <= h.depth; ++k) {
    std::vector<Vertex> net(h.nets[k].begin(), h.nets[k].end());
    std::sort(net.begin(), net.end());
    for (Vertex v : h.B0) {
      const Vertex c = h.center_of[k][v];
      if (c == kNoVertex || !contains_sorted(net, c) || h.center_of[k][c] != c) chk.partition = false;
      if (k < h.depth && h.parent[k + 1][h.center_of[k + 1][v]] != c) chk.nested = false;
    }
    if (k < h.depth) {
      std::vector<Vertex> next(h.nets[k + 1].begin(), h.nets[k + 1].end());
      std::sort(next.begin(), next.end());
      if (!is_subset(net, next)) chk.nets_increasing = false;
      for (Vertex c : net)
        if (h.children[k][c].size() == 1) ++chk.single_child_cells;
    }
    const Net nk{h.scale(k), h.nets[k]};
    if (!net_is_separated(mg, nk)) chk.nets_separated = false;
    if (!net_is_covering(mg, nk, h.B0)) chk.nets_covering = false;

    const double s = h.scale(k);
    for (Vertex c : net) {
      const auto& dc = mg.distances_from(c);
      for (Vertex v : h.B0) {
        const bool member = h.center_of[k][v] == c;
        if (member) {
          chk.worst_outer_ratio = std::max(chk.worst_outer_ratio, dc[v] / s);
          if (dc[v] >= s - kDistTol) chk.outer_sandwich = false;
        } else if (dc[v] < h.c_A() * s - kDistTol) {
          chk.inner_sandwich = false;
        }
      }
    }
  }
  return chk;
}

CubeCapacities cube_capacities(const MetricGraph& mg, const CubeHierarchy& h) {
  const auto& g = mg.graph();
  CubeCapacities caps;
  caps.c.assign(h.depth + 1, std::vector<double>(mg.size(), kNaN));
  caps.clipped.assign(h.depth + 1, std::vector<char>(mg.size(), 0));

  std::vector<std::pair<std::size_t, Vertex>> cells;
  for (std::size_t k = 0; k <= h.depth; ++k)
    for (Vertex x : h.nets[k]) cells.emplace_back(k, x);
  parallel_for(cells.size(), [&](std::size_t i) {
    const auto [k, x] = cells[i];
    auto [D, clipped] = capacity_domain(mg, x, h.A * h.scale(k));
    caps.clipped[k][x] = clipped ? 1 : 0;
    const auto Q = h.cube(k, x);
    if (D.size() == mg.size() || !is_subset(Q, D)) return;
    caps.c[k][x] = capacity(g, Q, D).capacity;
  });
  for (const auto& [k, x] : cells) {
    if (caps.clipped[k][x]) ++caps.clipped_cells;
    if (std::isnan(caps.c[k][x])) ++caps.degenerate_cells;
  }

  for (std::size_t k = 0; k <= h.depth; ++k) {
    const auto& net = h.nets[k];
    const double reach = 4.0 * h.scale(k);
    for (std::size_t i = 0; i < net.size(); ++i) {
      const double ci = caps.c[k][net[i]];
      if (std::isnan(ci)) continue;
      const auto& di = mg.distances_from(net[i]);
      for (std::size_t j = i + 1; j < net.size(); ++j) {
        const double cj = caps.c[k][net[j]];
        if (std::isnan(cj) || di[net[j]] > reach + kDistTol) continue;
        const double q = std::max(ci / cj, cj / ci);
        if (q > caps.ce1) {
          caps.ce1 = q;
          caps.ce1_x = ci >= cj ? net[i] : net[j];
          caps.ce1_y = ci >= cj ? net[j] : net[i];
          caps.ce1_level = k;
        }
      }
    }
    if (k == h.depth) continue;
    for (Vertex x : net) {
      const double cx = caps.c[k][x];
      if (std::isnan(cx)) continue;
      for (Vertex y : h.children[k][x]) {
        const double cy = caps.c[k + 1][y];
        if (std::isnan(cy)) continue;
        const double q = std::max(cx / cy, cy / cx);
        if (q > caps.ce2) {
          caps.ce2 = q;
          caps.ce2_parent = x;
          caps.ce2_child = y;
          caps.ce2_level = k;
        }
      }
    }
  }
  return caps;
}

CubeSubadditivity check_cube_subadditivity(const CubeHierarchy& h, const CubeCapacities& caps) {
  CubeSubadditivity rep;
  rep.worst.delta = 1.0;
  for (std::size_t k = 0; k < h.depth; ++k)
    for (Vertex x : h.nets[k]) {
      const auto& kids = h.children[k][x];
      if (kids.size() < 2) {
        ++rep.skipped_single_child;
        continue;
      }
      double sum = 0.0;
      for (Vertex y : kids) sum += caps.c[k + 1][y];
      const double cx = caps.c[k][x];
      if (std::isnan(cx) || std::isnan(sum)) {
        ++rep.skipped_degenerate;
        continue;
      }
      const SubadditivityCell cell{k, x, 1.0 - cx / sum};
      rep.cells.push_back(cell);
      if (cell.delta < rep.min_delta) {
        rep.min_delta = cell.delta;
        rep.worst = cell;
      }
    }
  return rep;
}

TransferResult transfer_step(const MetricGraph& mg, const CubeHierarchy& h, const CubeCapacities& caps,
                             std::size_t k, std::span<const double> mass, double C2, double delta) {
  if (k >= h.depth) throw ParameterError("no level below the bottom of the hierarchy");
  const auto& g = mg.graph();
  const auto& cnext = caps.c[k + 1];
  TransferResult res;
  res.level = k;
  res.mass.assign(mg.size(), 0.0);

  double before = 0.0;
  for (Vertex e : h.nets[k]) {
    before += mass[e];
    const auto& kids = h.children[k][e];
    double sum = 0.0;
    for (Vertex y : kids) sum += cnext[y];
    if (std::isnan(sum))
      throw ConstructionError("degenerate cube capacity below a transfer",
                              {{"level", k + 1}, {"parent", g.label(e)}});
    for (Vertex y : kids) res.mass[y] = mass[e] * cnext[y] / sum;
  }

  std::vector<Vertex> net(h.nets[k + 1].begin(), h.nets[k + 1].end());
  std::sort(net.begin(), net.end());
  const double reach = 4.0 * h.scale(k + 1);
  std::vector<std::pair<Vertex, Vertex>> pairs;
  for (std::size_t i = 0; i < net.size(); ++i) {
    const auto& di = mg.distances_from(net[i]);
    for (std::size_t j = i + 1; j < net.size(); ++j)
      if (di[net[j]] > 0.0 && di[net[j]] <= reach + kDistTol) pairs.emplace_back(net[i], net[j]);
  }

  const double C2sq = C2 * C2;
  const double hop_bound = (1.0 + 4.0 / h.A) * h.scale(k);
  std::vector<char> received(mg.size(), 0), sent(mg.size(), 0);
  auto ratio = [&](Vertex v) { return res.mass[v] / cnext[v]; };
  for (const auto& [a, b] : pairs) {
    Vertex src = a, dst = b;
    if (ratio(a) > C2sq * ratio(b)) {
    } else if (ratio(b) > C2sq * ratio(a)) {
      std::swap(src, dst);
    } else {
      continue;
    }
    if (received[src] || sent[dst])
      throw ConstructionError("transfer chain detected",
                              {{"level", k + 1}, {"from", g.label(src)}, {"to", g.label(dst)}});
    const double amount = (ratio(src) - C2sq * ratio(dst)) / (1.0 / cnext[src] + C2sq / cnext[dst]);
    res.mass[src] -= amount;
    res.mass[dst] += amount;
    sent[src] = received[dst] = 1;
    const Vertex origin = h.parent[k + 1][src];
    const double dist = mg.distance(origin, src) + mg.distance(src, dst);
    res.ledger.push_back({src, dst, amount, dist});
    res.max_distance_ratio = std::max(res.max_distance_ratio, dist / hop_bound);
    if (dist > hop_bound + kDistTol)
      throw ConstructionError("mass moved farther than the hop bound",
                              {{"level", k + 1}, {"from", g.label(src)}, {"to", g.label(dst)}, {"distance", dist}});
  }

  double after = 0.0;
  for (Vertex v : net) after += res.mass[v];
  res.mass_error = std::abs(after - before);
  if (res.mass_error > 1e-12)
    throw ConstructionError("transfer step lost mass", {{"level", k + 1}, {"error", res.mass_error}});

  for (const auto& [a, b] : pairs) {
    const double q = std::max(ratio(a) / ratio(b), ratio(b) / ratio(a)) / C2sq;
    res.worst_mure1 = std::max(res.worst_mure1, q);
    if (q > 1.0 + kRatioSlack)
      throw ConstructionError("close successors violate the ratio bound",
                              {{"level", k + 1}, {"a", g.label(a)}, {"b", g.label(b)}, {"ratio_over_C2sq", q}});
  }
  for (Vertex e : h.nets[k]) {
    const double ce = caps.c[k][e];
    if (std::isnan(ce)) continue;
    const double pe = mass[e] / ce;
    const auto& kids = h.children[k][e];
    const double factor = kids.size() >= 2 ? 1.0 - delta : 1.0;
    for (Vertex y : kids) {
      const double low = (pe / C2) / ratio(y);
      const double high = ratio(y) / (factor * pe);
      res.worst_mure2_low = std::max(res.worst_mure2_low, low);
      res.worst_mure2_high = std::max(res.worst_mure2_high, high);
      if (low > 1.0 + kRatioSlack || high > 1.0 + kRatioSlack)
        throw ConstructionError("child mass ratio outside the parent bounds",
                                {{"level", k + 1}, {"parent", g.label(e)}, {"child", g.label(y)},
                                 {"low", low}, {"high", high}});
    }
  }
  return res;
}

GoodMeasure build_ball_measure(const MetricGraph& mg, const VertexMeasure& m, Vertex x0, double r, double A) {
  if (m.size() != mg.size()) throw ParameterError("measure size does not match the graph");
  GoodMeasure gm;
  gm.hierarchy = build_cube_hierarchy(mg, x0, r, A);
  const auto& h = gm.hierarchy;
  gm.capacities = cube_capacities(mg, h);
  gm.subadditivity = check_cube_subadditivity(h, gm.capacities);
  gm.C_M = h.branching_bound();
  gm.C1 = gm.capacities.C1();
  gm.C2 = gm.C1 * static_cast<double>(gm.C_M);
  gm.delta = gm.subadditivity.cells.empty() ? 0.0 : gm.subadditivity.min_delta;
  if (!gm.subadditivity.cells.empty() && !(gm.delta > 0.0))
    throw ConstructionError("cube capacities are not strictly subadditive",
                            {{"level", gm.subadditivity.worst.level},
                             {"x", mg.graph().label(gm.subadditivity.worst.x)},
                             {"delta", gm.subadditivity.worst.delta}});

  std::vector<double> mu(mg.size(), 0.0);
  mu[x0] = 1.0;
  gm.level_mass.push_back(mu);
  for (std::size_t k = 0; k < h.depth; ++k) {
    gm.steps.push_back(transfer_step(mg, h, gm.capacities, k, gm.level_mass.back(), gm.C2, gm.delta));
    gm.level_mass.push_back(gm.steps.back().mass);
  }

  // Bottom cubes are single vertices, so f(z) is proportional to mu_l(z)/m(z).
  const auto& ml = gm.level_mass.back();
  gm.density.assign(mg.size(), 0.0);
  for (Vertex v : h.B0) {
    const double cell = measure_of(m, h.cube(h.depth, h.center_of[h.depth][v]));
    gm.density[v] = ml[h.center_of[h.depth][v]] / cell;
  }
  const double alpha = 1.0 / gm.density[x0];
  gm.mass.assign(mg.size(), 0.0);
  for (Vertex v : h.B0) {
    gm.density[v] *= alpha;
    gm.mass[v] = gm.density[v] * m[v];
    if (!(gm.density[v] > 0.0))
      throw ConstructionError("ball measure density is not positive", {{"vertex", mg.graph().label(v)}});
  }
  return gm;
}

double ball_mass(const MetricGraph& mg, std::span<const double> nu, Vertex x, double s, BallKind kind) {
  double total = 0.0;
  for (Vertex v : mg.ball(x, s, kind)) total += nu[v];
  return total;
}

CapacityGoodReport verify_capacity_good(const MetricGraph& mg, const VertexMeasure& m,
                                        std::span<const double> density, Vertex x0, double r,
                                        const CapacityGoodOptions& options) {
  if (density.size() != mg.size() || m.size() != mg.size())
    throw ParameterError("density and measure must cover every vertex");
  const auto& g = mg.graph();
  const auto D = mg.ball(x0, r);
  for (Vertex v : D)
    if (!(density[v] > 0.0)) throw ParameterError("density must be positive on the domain");
  std::vector<double> nu(mg.size(), 0.0);
  for (Vertex v : D) nu[v] = density[v] * m[v];

  std::vector<Vertex> centers = options.centers.empty() ? D : normalized_set(options.centers);
  std::vector<double> radii = options.radii;
  if (radii.empty())
    for (double s = 1.0; s < r; s *= 2.0) radii.push_back(s);
  std::sort(radii.begin(), radii.end());

  CapacityGoodReport rep;
  auto ball_in_D = [&](Vertex x, double s, BallKind kind = BallKind::open) {
    const auto b = mg.ball(x, s, kind);
    return std::pair{b, is_subset(b, D)};
  };

  // Per-center ball masses and capacities Cap_{B(x,8s)}(B(x,s)).
  struct Row {
    std::vector<char> inside;
    std::vector<double> mass, cap;
    std::size_t clipped = 0;
  };
  std::vector<Row> rows(centers.size());
  parallel_for(centers.size(), [&](std::size_t i) {
    auto& row = rows[i];
    row.inside.assign(radii.size(), 0);
    row.mass.assign(radii.size(), kNaN);
    row.cap.assign(radii.size(), kNaN);
    for (std::size_t j = 0; j < radii.size(); ++j) {
      auto [b, inside] = ball_in_D(centers[i], radii[j]);
      if (!inside) continue;
      row.inside[j] = 1;
      row.mass[j] = measure_of(nu, b);
      auto [dom, clipped] = capacity_domain(mg, centers[i], 8.0 * radii[j]);
      if (clipped) ++row.clipped;
      if (dom.size() < mg.size() && is_subset(b, dom)) row.cap[j] = capacity(g, b, dom).capacity;
    }
  });
  for (const auto& row : rows) rep.clipped_domains += row.clipped;

  for (std::size_t i = 0; i < centers.size(); ++i)
    for (double s : radii) {
      auto [big, inside] = ball_in_D(centers[i], 2.0 * s);
      if (!inside) continue;
      const double q = measure_of(nu, big) / measure_of(nu, mg.ball(centers[i], s));
      if (q > rep.C_m01) {
        rep.C_m01 = q;
        rep.m01_x = centers[i];
        rep.m01_s = s;
      }
    }

  for (Vertex x : D) {
    auto [unit, inside] = ball_in_D(x, 1.0, BallKind::closed);
    if (!inside) continue;
    double hi = 0.0, lo = std::numeric_limits<double>::infinity();
    for (Vertex v : unit) {
      hi = std::max(hi, density[v]);
      lo = std::min(lo, density[v]);
    }
    if (hi / lo > rep.C_m03) {
      rep.C_m03 = hi / lo;
      rep.m03_x = x;
    }
  }

  const auto& d0 = mg.distances_from(x0);
  for (Vertex y : D) {
    const double spread = std::abs(std::log(density[y]));
    const double c = std::exp(spread / (1.0 + d0[y]));
    if (c > rep.C_m04) {
      rep.C_m04 = c;
      rep.m04_y = y;
    }
  }
  rep.C0 = std::max({rep.C_m01, rep.C_m03, rep.C_m04});

  const double logC0 = std::log(rep.C0);
  rep.beta1 = std::numeric_limits<double>::infinity();
  rep.beta2 = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < centers.size(); ++i) {
    const auto& row = rows[i];
    for (std::size_t a = 0; a < radii.size(); ++a)
      for (std::size_t b = a + 1; b < radii.size(); ++b) {
        if (!row.inside[b] || std::isnan(row.cap[a]) || std::isnan(row.cap[b])) continue;
        const double t = std::log(radii[b] / radii[a]);
        const double lq = std::log(row.mass[b] * row.cap[a] / (row.mass[a] * row.cap[b]));
        ++rep.m02_samples;
        const double lower = (lq + logC0) / t;
        const double upper = (lq - logC0) / t;
        if (lower < rep.beta1) {
          rep.beta1 = lower;
          rep.beta1_x = centers[i];
          rep.beta1_s1 = radii[a];
          rep.beta1_s2 = radii[b];
        }
        if (upper > rep.beta2) {
          rep.beta2 = upper;
          rep.beta2_x = centers[i];
          rep.beta2_s1 = radii[a];
          rep.beta2_s2 = radii[b];
        }
      }
  }
  if (rep.m02_samples == 0) {
    rep.beta1 = rep.beta2 = 0.0;
  } else if (rep.beta1 > rep.beta2) {
    rep.beta1 = rep.beta2 = 0.5 * (rep.beta1 + rep.beta2);
  }
  rep.capacity_good = std::isfinite(rep.C0) && rep.beta1 > 0.0 && rep.m02_samples > 0;
  return rep;
}

RvdReport rvd_report(const MetricGraph& mg, std::span<const double> nu, std::span<const Vertex> centers,
                     std::span<const double> radii_in) {
  std::vector<double> radii(radii_in.begin(), radii_in.end());
  std::sort(radii.begin(), radii.end());
  radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
  if (radii.size() < 3) throw ParameterError("reverse doubling fit needs at least three scales");
  struct Sample { double t, q; };
  std::vector<Sample> samples;
  for (Vertex x : centers) {
    std::vector<double> masses;
    for (double s : radii) masses.push_back(ball_mass(mg, nu, x, s));
    for (std::size_t a = 0; a < radii.size(); ++a)
      for (std::size_t b = a + 1; b < radii.size(); ++b)
        if (masses[a] > 0.0) samples.push_back({std::log(radii[b] / radii[a]), std::log(masses[b] / masses[a])});
  }
  RvdReport rep;
  rep.samples = samples.size();
  double sxx = 0.0, sxy = 0.0;
  for (const auto& s : samples) {
    sxx += s.t * s.t;
    sxy += s.t * s.q;
  }
  rep.alpha = sxx > 0.0 ? sxy / sxx : 0.0;
  double worst = 0.0;
  for (const auto& s : samples) worst = std::min(worst, s.q - rep.alpha * s.t);
  rep.C0 = std::exp(worst);
  return rep;
}

}  // namespace hlab
