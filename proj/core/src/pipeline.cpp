#include <algorithm>
#include <cmath>
#include <exception>

#include "harnacklab/dyadic.hpp"
#include "harnacklab/errors.hpp"
#include "harnacklab/inequalities.hpp"

namespace hlab {

bool PipelineReport::ok() const {
  return std::all_of(stages.begin(), stages.end(), [](const StageStatus& s) { return s.ok; });
}

namespace {

template <class F>
bool run_stage(PipelineReport& rep, const char* name, F&& body) {
  StageStatus st{name, true, ""};
  try {
    body(st);
  } catch (const std::exception& e) {
    st.ok = false;
    st.message = e.what();
  }
  rep.stages.push_back(st);
  return st.ok;
}

std::vector<double> cutoff_values(const WeightedGraph& g, std::span<const Vertex> inner,
                                  std::span<const Vertex> outer) {
  if (outer.size() == g.size()) return std::vector<double>(g.size(), 1.0);
  return capacity(g, inner, outer).h;
}

}  // namespace

PipelineReport characterization_pipeline(const WeightedGraph& g, const VertexMeasure& m,
                                         const PipelineOptions& opt) {
  if (opt.radii.empty()) throw ParameterError("pipeline needs at least one radius");
  if (opt.center >= g.size()) throw ParameterError("pipeline center is not a vertex");
  PipelineReport rep;
  const MetricGraph mg(g);
  const Vertex x = opt.center;
  std::vector<double> radii = opt.radii;
  std::sort(radii.begin(), radii.end());
  std::vector<Vertex> centers = opt.ehi_centers.empty() ? std::vector<Vertex>{x} : opt.ehi_centers;

  run_stage(rep, "ehi", [&](StageStatus& st) {
    rep.ehi = ehi_profile(mg, centers, radii, opt.A);
    const double lo = rep.ehi.max_at(radii.front()), hi = rep.ehi.max_at(radii.back());
    rep.ehi_growth = lo > 0.0 && hi > 0.0 ? hi / lo : 1.0;
    rep.ehi_bounded = rep.ehi_growth < opt.growth_flag;
    if (!rep.ehi_bounded) {
      st.ok = false;
      st.message = "Harnack constants grow across scales";
    }
  });

  rep.mu = m;
  run_stage(rep, "measure", [&](StageStatus& st) {
    const double r0 = mg.eccentricity(x) + 1.0;
    const auto gm = build_ball_measure(mg, m, x, r0);
    rep.measure_built = true;
    rep.mu = gm.mass;
    rep.measure_depth = gm.hierarchy.depth;
    rep.measure_C2 = gm.C2;
    rep.measure_delta = gm.delta;
    CapacityGoodOptions cg;
    cg.centers = centers;
    if (std::find(cg.centers.begin(), cg.centers.end(), x) == cg.centers.end()) cg.centers.push_back(x);
    const auto good = verify_capacity_good(mg, m, gm.density, x, r0, cg);
    rep.measure_check = good;
    rep.measure_C0 = good.C0;
    rep.measure_beta1 = good.beta1;
    rep.measure_beta2 = good.beta2;
    if (!good.capacity_good) {
      st.ok = false;
      st.message = "constructed measure is not capacity good on the samples";
    }
  });

  const bool have_psi = run_stage(rep, "scale", [&](StageStatus& st) {
    std::vector<double> scales;
    for (double s = 1.0; s < mg.diameter(); s *= 2.0) scales.push_back(s);
    scales.insert(scales.end(), radii.begin(), radii.end());
    std::vector<Vertex> all(g.size());
    for (Vertex v = 0; v < g.size(); ++v) all[v] = v;
    rep.psi = scale_function(mg, rep.mu, all, scales);
    if (!rep.psi.monotone) {
      st.ok = false;
      st.message = "scale function is not increasing";
    }
  });
  if (!have_psi) return rep;

  const bool have_chain = run_stage(rep, "chain_metric", [&](StageStatus&) {
    rep.chain = build_chain_metric(mg, rep.psi);
    rep.envelope = quasisymmetry_distortion(distance_matrix(mg), rep.chain.dpsi);
  });

  run_stage(rep, "inequalities", [&](StageStatus&) {
    for (double R : radii) {
      PresentationRow row;
      row.R = R;
      row.psi = rep.psi.value(x, R);
      const auto inner = mg.ball(x, R), outer = mg.ball(x, opt.A * R);
      row.pi = pi_constant_on(g, rep.mu, inner, outer, row.psi);
      const auto phi = cutoff_values(g, inner, outer);
      row.cs = cs_verify_on(g, rep.mu, set_difference(outer, inner), phi, opt.cs_C1, row.psi);
      if (have_chain) {
        row.rho = std::pow(row.psi, 1.0 / rep.chain.beta);
        const auto in_b = matrix_ball(rep.chain.dpsi, x, row.rho);
        const auto out_b = matrix_ball(rep.chain.dpsi, x, opt.A * row.rho);
        const double psi_b = std::pow(row.rho, rep.chain.beta);
        row.pi_beta = pi_constant_on(g, rep.mu, in_b, out_b, psi_b);
        const auto phi_b = cutoff_values(g, in_b, out_b);
        row.cs_beta = cs_verify_on(g, rep.mu, set_difference(out_b, in_b), phi_b, opt.cs_C1, psi_b);
      }
      rep.rows.push_back(std::move(row));
    }
  });

  run_stage(rep, "capacity_estimate", [&](StageStatus&) {
    std::vector<Vertex> cs = centers;
    if (std::find(cs.begin(), cs.end(), x) == cs.end()) cs.push_back(x);
    rep.cap = cap_psi_report(mg, rep.mu, [&](Vertex v, double r) { return rep.psi.value(v, r); }, cs, radii,
                             opt.kappa);
  });
  return rep;
}

}  // namespace hlab
