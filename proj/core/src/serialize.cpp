#include "harnacklab/serialize.hpp"

#include <cmath>
#include <cstdio>

namespace hlab {

namespace {

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json vertex(const WeightedGraph& g, Vertex v) {
  if (v == kNoVertex || v >= g.size()) return nullptr;
  return g.label(v);
}

json vertices(const WeightedGraph& g, std::span<const Vertex> vs) {
  json a = json::array();
  for (Vertex v : vs) a.push_back(vertex(g, v));
  return a;
}

json ratio(const RatioRange& r) { return {{"lo", r.lo}, {"hi", r.hi}, {"samples", r.samples}}; }

const char* balls_name(HarnackBalls b) { return b == HarnackBalls::cable ? "cable" : "graph"; }

const char* cutoff_name(CutoffKind k) {
  switch (k) {
    case CutoffKind::equilibrium: return "equilibrium";
    case CutoffKind::distance_linear: return "distance_linear";
    case CutoffKind::annulus_composite: return "annulus_composite";
  }
  return "unknown";
}

}  // namespace

json report_document(const std::string& kind, json body) {
  json doc = {{"schema_version", kSchemaVersion}, {"kind", kind}};
  for (auto it = body.begin(); it != body.end(); ++it) doc[it.key()] = it.value();
  return doc;
}

json to_json(const WeightedGraph& g, const CapacityResult& r) {
  json h = json::object();
  for (Vertex v : r.D) h[std::to_string(g.label(v))] = r.h[v];
  json nu = json::object();
  for (Vertex v : r.A) nu[std::to_string(g.label(v))] = r.nu[v];
  return {{"A", vertices(g, r.A)}, {"D", vertices(g, r.D)}, {"capacity", r.capacity},
          {"nu_total", r.nu_total}, {"residual", r.residual}, {"potential", h}, {"equilibrium_measure", nu}};
}

json to_json(const WeightedGraph& g, const HarnackReport& r) {
  return {{"balls", balls_name(r.balls)}, {"x", vertex(g, r.x)}, {"R", r.R}, {"A", r.A}, {"C_H", r.C_H},
          {"witness", {{"y", vertex(g, r.y)}, {"z", vertex(g, r.z)}, {"b", vertex(g, r.b)}}},
          {"inner_size", r.inner_size}, {"domain_size", r.domain_size}};
}

json to_json(const WeightedGraph& g, const EhiProfile& p) {
  json cells = json::array();
  for (const auto& c : p.cells) {
    json j = {{"x", vertex(g, c.x)}, {"R", c.R}, {"A", c.A}, {"admissible", c.admissible}};
    if (c.admissible) {
      j["report"] = to_json(g, c.report);
    } else {
      j["reason"] = c.reason;
    }
    cells.push_back(std::move(j));
  }
  return {{"max_C_H", p.max_C_H}, {"skipped", p.skipped}, {"cells", cells}};
}

json to_json(const WeightedGraph& g, const PerturbationReport& r) {
  json trials = json::array();
  for (const auto& t : r.trials)
    trials.push_back({{"trial", t.trial}, {"worst_inflation", t.worst_inflation}, {"profile", to_json(g, t.profile)}});
  return {{"factor", r.factor}, {"seed", r.seed}, {"worst_inflation", r.worst_inflation},
          {"base", to_json(g, r.base)}, {"trials", trials}};
}

json to_json(const WeightedGraph& g, const CubeHierarchy& h) {
  json levels = json::array();
  for (std::size_t k = 0; k <= h.depth; ++k) {
    json cubes = json::array();
    for (Vertex c : h.nets[k]) {
      json cube = {{"center", vertex(g, c)}, {"members", vertices(g, h.cube(k, c))}};
      if (k > 0) cube["parent"] = vertex(g, h.parent[k][c]);
      cubes.push_back(std::move(cube));
    }
    levels.push_back({{"level", k}, {"scale", h.scale(k)}, {"cubes", cubes}});
  }
  return {{"x0", vertex(g, h.x0)}, {"r", h.r}, {"A", h.A}, {"depth", h.depth}, {"c_A", h.c_A()},
          {"C_M", h.branching_bound()}, {"levels", levels}};
}

json to_json(const WeightedGraph&, const HierarchyCheck& c) {
  return {{"partition", c.partition},         {"nested", c.nested},
          {"nets_increasing", c.nets_increasing}, {"nets_separated", c.nets_separated},
          {"nets_covering", c.nets_covering}, {"inner_sandwich", c.inner_sandwich},
          {"outer_sandwich", c.outer_sandwich}, {"worst_outer_ratio", c.worst_outer_ratio},
          {"single_child_cells", c.single_child_cells}};
}

json to_json(const WeightedGraph& g, const GoodMeasure& gm) {
  json hier = to_json(g, gm.hierarchy);
  for (std::size_t k = 0; k <= gm.hierarchy.depth; ++k)
    for (std::size_t i = 0; i < gm.hierarchy.nets[k].size(); ++i) {
      const Vertex c = gm.hierarchy.nets[k][i];
      hier["levels"][k]["cubes"][i]["c_k"] = gm.capacities.c[k][c];
      hier["levels"][k]["cubes"][i]["clipped"] = gm.capacities.clipped[k][c] != 0;
    }
  const auto& cap = gm.capacities;
  json steps = json::array();
  for (const auto& s : gm.steps)
    steps.push_back({{"level", s.level}, {"transfers", s.ledger.size()}, {"mass_error", s.mass_error},
                     {"worst_mure1", s.worst_mure1}, {"worst_mure2_low", s.worst_mure2_low},
                     {"worst_mure2_high", s.worst_mure2_high}, {"max_distance_ratio", s.max_distance_ratio}});
  const auto& sub = gm.subadditivity;
  return {{"hierarchy", hier},
          {"C_M", gm.C_M},
          {"C1", gm.C1},
          {"C2", gm.C2},
          {"delta", gm.delta},
          {"ce1", {{"value", cap.ce1}, {"x", vertex(g, cap.ce1_x)}, {"y", vertex(g, cap.ce1_y)}, {"level", cap.ce1_level}}},
          {"ce2",
           {{"value", cap.ce2}, {"parent", vertex(g, cap.ce2_parent)}, {"child", vertex(g, cap.ce2_child)},
            {"level", cap.ce2_level}}},
          {"clipped_cells", cap.clipped_cells},
          {"degenerate_cells", cap.degenerate_cells},
          {"subadditivity",
           {{"min_delta", sub.min_delta}, {"witness", {{"level", sub.worst.level}, {"x", vertex(g, sub.worst.x)}}},
            {"cells", sub.cells.size()}, {"skipped_single_child", sub.skipped_single_child},
            {"skipped_degenerate", sub.skipped_degenerate}}},
          {"steps", steps}};
}

json to_json(const WeightedGraph& g, const CapacityGoodReport& r) {
  return {{"C0", r.C0},
          {"beta1", r.beta1},
          {"beta2", r.beta2},
          {"capacity_good", r.capacity_good},
          {"m01", {{"C", r.C_m01}, {"x", vertex(g, r.m01_x)}, {"s", r.m01_s}}},
          {"m03", {{"C", r.C_m03}, {"x", vertex(g, r.m03_x)}}},
          {"m04", {{"C", r.C_m04}, {"y", vertex(g, r.m04_y)}}},
          {"beta1_witness", {{"x", vertex(g, r.beta1_x)}, {"s1", r.beta1_s1}, {"s2", r.beta1_s2}}},
          {"beta2_witness", {{"x", vertex(g, r.beta2_x)}, {"s1", r.beta2_s1}, {"s2", r.beta2_s2}}},
          {"m02_samples", r.m02_samples},
          {"clipped_domains", r.clipped_domains}};
}

json to_json(const WeightedGraph& g, const ScaleFunction& sf) {
  json rows = json::array();
  for (std::size_t i = 0; i < sf.centers.size(); ++i)
    rows.push_back({{"x", vertex(g, sf.centers[i])}, {"psi", sf.psi[i]}});
  return {{"radii", sf.radii},
          {"rows", rows},
          {"inadmissible", sf.inadmissible},
          {"monotone", sf.monotone},
          {"regularity",
           {{"C1", sf.C1}, {"beta1", sf.beta1}, {"beta2", sf.beta2}, {"samples", sf.fit_samples},
            {"subsampled", sf.fit_subsampled}}}};
}

json to_json(const WeightedGraph& g, const ChainMetric& c) {
  return {{"K", c.K},
          {"K_sampled", c.K_sampled},
          {"epsilon", c.epsilon},
          {"beta", c.beta},
          {"halvings", c.halvings},
          {"lower_ratio", c.lower_ratio},
          {"defbeta", {{"C", c.defbeta_C}, {"x", vertex(g, c.defbeta_x)}, {"y", vertex(g, c.defbeta_y)}}}};
}

json to_json(const QsEnvelope& e) {
  return {{"C", e.C}, {"gamma1", e.gamma1}, {"gamma2", e.gamma2}, {"triples", e.triples}, {"sampled", e.sampled}};
}

json to_json(const WeightedGraph& g, const PIReport& r) {
  json w = json::object();
  for (Vertex v = 0; v < r.witness.size(); ++v)
    if (r.witness[v] != 0.0) w[std::to_string(g.label(v))] = r.witness[v];
  return {{"psi", r.psi},       {"C", r.C},
          {"rayleigh", r.rayleigh}, {"witness", {{"f", w}, {"quotient", r.witness_quotient}}},
          {"inner_size", r.inner_size}, {"outer_size", r.outer_size}};
}

json to_json(const WeightedGraph& g, const CSReport& r) {
  json w = json::object();
  for (Vertex v = 0; v < r.witness.size(); ++v)
    if (r.witness[v] != 0.0) w[std::to_string(g.label(v))] = r.witness[v];
  return {{"C1", r.C1},         {"C2", r.C2}, {"psi", r.psi}, {"lambda", r.lambda},
          {"witness", {{"u", w}}}, {"annulus_size", r.annulus_size}};
}

json to_json(const WeightedGraph& g, const AnnulusReport& r) {
  return {{"x0", vertex(g, r.x0)},
          {"R", r.R},
          {"r", r.r},
          {"A", r.A},
          {"n", r.n},
          {"n_reduced", r.n_reduced},
          {"balls", r.balls},
          {"shells", r.shells},
          {"gradient_coefficient", r.gradient_coefficient},
          {"psi", r.psi},
          {"multiplier", r.multiplier},
          {"cutoff_ok", r.cutoff_ok},
          {"cutoff_kind", cutoff_name(r.phi.kind)}};
}

json to_json(const WeightedGraph& g, const CapPsiReport& r) {
  auto cell = [&](const CapPsiCell& c) { return json{{"x", vertex(g, c.x)}, {"r", c.r}, {"ratio", c.ratio}}; };
  json cells = json::array();
  for (const auto& c : r.cells) cells.push_back(cell(c));
  return {{"kappa", r.kappa}, {"C", r.C},        {"worst_low", cell(r.worst_low)}, {"worst_high", cell(r.worst_high)},
          {"skipped", r.skipped}, {"cells", cells}};
}

json to_json(const WeightedGraph& g, const PipelineReport& r) {
  json stages = json::array();
  for (const auto& s : r.stages) stages.push_back({{"stage", s.stage}, {"ok", s.ok}, {"message", s.message}});
  json rows = json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"R", row.R},
                    {"psi", row.psi},
                    {"pi", to_json(g, row.pi)},
                    {"cs", to_json(g, row.cs)},
                    {"rho", row.rho},
                    {"pi_beta", to_json(g, row.pi_beta)},
                    {"cs_beta", to_json(g, row.cs_beta)}});
  return {{"ok", r.ok()},
          {"stages", stages},
          {"ehi", to_json(g, r.ehi)},
          {"ehi_growth", r.ehi_growth},
          {"ehi_bounded", r.ehi_bounded},
          {"measure",
           {{"built", r.measure_built}, {"C0", r.measure_C0}, {"beta1", r.measure_beta1}, {"beta2", r.measure_beta2},
            {"depth", r.measure_depth}, {"C2", r.measure_C2}, {"delta", r.measure_delta},
            {"capacity_good", r.measure_built ? to_json(g, r.measure_check) : json(nullptr)}}},
          {"scale", to_json(g, r.psi)},
          {"chain_metric", to_json(g, r.chain)},
          {"envelope", to_json(r.envelope)},
          {"presentations", rows},
          {"cap_psi", to_json(g, r.cap)}};
}

json to_json(const WeightedGraph& g, const NetGraph& net) {
  std::vector<Vertex> pts(net.points.begin(), net.points.end());
  return {{"eps", net.eps},
          {"identity", net.identity},
          {"partition_kind", net.kind == PartitionKind::tent ? "tent" : "equilibrium"},
          {"points", vertices(g, pts)},
          {"ball_mass", net.ball_mass},
          {"edges", net.graph.edge_count()},
          {"partition",
           {{"sum_error", net.partition.sum_error}, {"c", net.partition.c}, {"C", net.partition.C},
            {"support_ok", net.partition.support_ok}}}};
}

json to_json(const WeightedGraph& g, const RoughIsometryWitness& w) {
  return {{"C1", w.C1},
          {"C2", w.C2},
          {"C3", w.C3},
          {"qi2_witness", {{"x", vertex(g, w.qi2_x)}, {"y", vertex(g, w.qi2_y)}}},
          {"qi3_witness", {{"x", vertex(g, w.qi3_x)}}}};
}

json to_json(const TransferTable& t) {
  return {{"eps", t.eps},
          {"energy", ratio(t.energy)},
          {"norm", ratio(t.norm)},
          {"ext_energy", ratio(t.ext_energy)},
          {"ext_norm", ratio(t.ext_norm)},
          {"roundtrip", ratio(t.roundtrip)}};
}

json to_json(const WeightedGraph& g, const DumbbellReport& r) {
  return {{"x0", vertex(g, r.x0)},
          {"R", r.R},
          {"pairs", r.pairs},
          {"sup", r.sup},
          {"inf", r.inf},
          {"ratio", r.ratio},
          {"sup_witness", {{"x", vertex(g, r.sup_x)}, {"y", vertex(g, r.sup_y)}}},
          {"inf_witness", {{"x", vertex(g, r.inf_x)}, {"y", vertex(g, r.inf_y)}}}};
}

void write_profile_csv(std::ostream& out, const WeightedGraph& g, const EhiProfile& p) {
  out << "x,R,A,C_H,y,z,b\n";
  for (const auto& c : p.cells) {
    if (!c.admissible) continue;
    const auto& r = c.report;
    out << g.label(c.x) << ',' << num(c.R) << ',' << num(c.A) << ',' << num(r.C_H) << ',' << g.label(r.y) << ','
        << g.label(r.z) << ',' << g.label(r.b) << '\n';
  }
}

void write_measure_csv(std::ostream& out, const WeightedGraph& g, std::span<const double> density,
                       std::span<const double> mass) {
  out << "vertex,f,mass\n";
  for (Vertex v = 0; v < g.size(); ++v) out << g.label(v) << ',' << num(density[v]) << ',' << num(mass[v]) << '\n';
}

void write_matrix_csv(std::ostream& out, const WeightedGraph& g, const Eigen::MatrixXd& d) {
  out << "vertex";
  for (Vertex v = 0; v < g.size(); ++v) out << ',' << g.label(v);
  out << '\n';
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    out << g.label(static_cast<Vertex>(i));
    for (Eigen::Index j = 0; j < d.cols(); ++j) out << ',' << num(d(i, j));
    out << '\n';
  }
}

void write_triplets_csv(std::ostream& out, const Eigen::SparseMatrix<double, Eigen::RowMajor>& M,
                        std::span<const std::int64_t> row_ids, std::span<const std::int64_t> col_ids) {
  out << "row,col,value\n";
  for (Eigen::Index r = 0; r < M.outerSize(); ++r)
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(M, r); it; ++it)
      out << row_ids[static_cast<std::size_t>(it.row())] << ',' << col_ids[static_cast<std::size_t>(it.col())] << ','
          << num(it.value()) << '\n';
}

}  // namespace hlab
