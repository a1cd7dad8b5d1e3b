#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "cli.hpp"
#include "harnacklab/dirichlet.hpp"
#include "harnacklab/dyadic.hpp"
#include "harnacklab/errors.hpp"
#include "harnacklab/graph.hpp"
#include "harnacklab/harnack.hpp"
#include "harnacklab/inequalities.hpp"
#include "harnacklab/metric.hpp"
#include "harnacklab/netmaps.hpp"
#include "harnacklab/potential.hpp"
#include "harnacklab/scale.hpp"
#include "harnacklab/serialize.hpp"

namespace hlab::cli {

namespace {

namespace fs = std::filesystem;

struct Loaded {
  std::optional<GeneratorSpec> spec;
  WeightedGraph g;
};

Loaded load_graph(const RunConfig& c) {
  if (!c.generate.empty() && !c.graph.empty()) throw ParameterError("give either --generate or --graph, not both");
  if (!c.generate.empty()) {
    auto spec = parse_generator_spec(c.generate);
    return {spec, generate(spec)};
  }
  if (!c.graph.empty()) return {std::nullopt, read_graph_file(c.graph)};
  throw ParameterError("a graph source is required (--generate SPEC or --graph FILE)");
}

Vertex parse_vertex(const WeightedGraph& g, std::string tok) {
  if (!tok.empty() && (tok[0] == 'v' || tok[0] == 'V')) tok.erase(0, 1);
  std::int64_t label = 0;
  try {
    std::size_t used = 0;
    label = std::stoll(tok, &used);
    if (used != tok.size()) throw ParameterError("");
  } catch (const std::exception&) {
    throw ParameterError("invalid vertex '" + tok + "'");
  }
  const auto v = g.find_label(label);
  if (!v) throw ParameterError("no vertex with id " + std::to_string(label));
  return *v;
}

/// "v1,v3,v5..v9" or "all".
std::vector<Vertex> parse_vertex_set(const WeightedGraph& g, const std::string& text) {
  std::vector<Vertex> out;
  if (text == "all") {
    for (Vertex v = 0; v < g.size(); ++v) out.push_back(v);
    return out;
  }
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    if (const auto dots = tok.find(".."); dots != std::string::npos) {
      const Vertex a = parse_vertex(g, tok.substr(0, dots));
      const Vertex b = parse_vertex(g, tok.substr(dots + 2));
      const auto la = g.label(a), lb = g.label(b);
      for (auto l = std::min(la, lb); l <= std::max(la, lb); ++l)
        if (auto v = g.find_label(l)) out.push_back(*v);
    } else {
      out.push_back(parse_vertex(g, tok));
    }
  }
  if (out.empty()) throw ParameterError("empty vertex set '" + text + "'");
  return normalized_set(out);
}

double param_double(const RunConfig& c, const std::string& key, double fallback) {
  const auto it = c.params.find(key);
  if (it == c.params.end() || it->second.empty()) return fallback;
  try {
    std::size_t used = 0;
    const double x = std::stod(it->second, &used);
    if (used != it->second.size()) throw ParameterError("");
    return x;
  } catch (const std::exception&) {
    throw ParameterError("--" + key + " expects a number, got '" + it->second + "'");
  }
}

std::string param(const RunConfig& c, const std::string& key, const std::string& fallback = "") {
  const auto it = c.params.find(key);
  return it == c.params.end() || it->second.empty() ? fallback : it->second;
}

double ratio_A(const RunConfig& c, double fallback) {
  if (c.A.empty()) return fallback;
  try {
    std::size_t used = 0;
    const double a = std::stod(c.A, &used);
    if (used != c.A.size()) throw ParameterError("");
    return a;
  } catch (const std::exception&) {
    throw ParameterError("--A expects a number, got '" + c.A + "'");
  }
}

std::uint64_t require_seed(const RunConfig& c) {
  if (!c.seed) throw ParameterError("'" + c.command + "' samples at random and needs --seed");
  return *c.seed;
}

Vertex default_center(const Loaded& l) { return l.spec ? natural_center(*l.spec) : 0; }

Vertex center_of(const RunConfig& c, const Loaded& l) {
  const auto s = param(c, "center");
  return s.empty() ? default_center(l) : parse_vertex(l.g, s);
}

std::vector<Vertex> centers_of(const RunConfig& c, const Loaded& l) {
  if (c.centers.empty()) return {center_of(c, l)};
  return parse_vertex_set(l.g, c.centers);
}

VertexMeasure measure_of_config(const RunConfig& c, const MetricGraph& mg, Vertex center) {
  const auto& g = mg.graph();
  if (c.measure == "counting") return counting_measure(g);
  if (c.measure == "vertex-weight") return vertex_weight_measure(g);
  if (c.measure == "constructed") {
    const auto gm = build_ball_measure(mg, counting_measure(g), center, mg.eccentricity(center) + 1.0);
    return gm.mass;
  }
  if (c.measure.rfind("file:", 0) == 0) {
    const std::string path = c.measure.substr(5);
    std::ifstream in(path);
    if (!in) throw ParameterError("cannot open measure file '" + path + "'");
    VertexMeasure m(g.size(), std::numeric_limits<double>::quiet_NaN());
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      if (header) {
        header = false;
        if (line.find_first_of("0123456789") != 0) continue;
      }
      const auto comma = line.find(',');
      if (comma == std::string::npos) throw ParameterError("measure rows are 'vertex,mass'");
      const Vertex v = parse_vertex(g, line.substr(0, comma));
      m[v] = std::stod(line.substr(comma + 1));
    }
    for (double x : m)
      if (!(x > 0.0)) throw ParameterError("measure file must give a positive mass to every vertex");
    return m;
  }
  throw ParameterError("unknown measure '" + c.measure + "'");
}

std::vector<double> default_radii(const MetricGraph& mg) {
  std::vector<double> r;
  for (double s = 1.0; s < mg.diameter(); s *= 2.0) r.push_back(s);
  return r;
}

// Artifacts of one command. The first is printed when no output directory is set.
struct Artifact {
  std::string name;
  std::string body;
};

std::string dump(const json& j) { return j.dump(2) + "\n"; }

template <class F>
std::string to_string_with(F&& f) {
  std::ostringstream o;
  f(o);
  return o.str();
}

using Command = std::function<std::vector<Artifact>(const RunConfig&)>;

std::vector<Artifact> cmd_generate(const RunConfig& c) {
  const auto l = load_graph(c);
  return {{"graph.g", to_string_with([&](std::ostream& o) { write_graph(o, l.g); })}};
}

std::vector<Artifact> cmd_green(const RunConfig& c) {
  const auto l = load_graph(c);
  const auto D = parse_vertex_set(l.g, param(c, "D", "all"));
  const DomainProblem dp(l.g, D);
  const auto G = greens_function(dp);
  double residual = 0.0;
  for (std::size_t i = 0; i < D.size(); ++i)
    residual = std::max(residual, green_column_residual(dp, D[i], G.col(static_cast<Eigen::Index>(i))));
  json body = {{"D", D.size()}, {"boundary", dp.boundary().size()}, {"max_residual", residual},
               {"lambda_min", lambda_min(dp, counting_measure(l.g))}};
  return {{"green.csv", to_string_with([&](std::ostream& o) { write_kernel_csv(o, l.g, D, D, G); })},
          {"green.json", dump(report_document("green", body))}};
}

std::vector<Artifact> cmd_capacity(const RunConfig& c) {
  const auto l = load_graph(c);
  if (c.A.empty()) throw ParameterError("capacity needs --A SET");
  const auto A = parse_vertex_set(l.g, c.A);
  const auto D = parse_vertex_set(l.g, param(c, "D", "all"));
  const auto r = capacity(l.g, A, D);
  return {{"capacity.json", dump(report_document("capacity", to_json(l.g, r)))}};
}

std::vector<Artifact> cmd_harnack(const RunConfig& c) {
  const auto l = load_graph(c);
  const MetricGraph mg(l.g);
  const auto centers = centers_of(c, l);
  const auto radii = c.radii.empty() ? std::vector<double>{2.0, 4.0, 8.0} : c.radii;
  const auto balls = param(c, "balls", "cable") == "graph" ? HarnackBalls::graph : HarnackBalls::cable;
  const auto p = ehi_profile(mg, centers, radii, ratio_A(c, 2.0), balls);
  return {{"profile.csv", to_string_with([&](std::ostream& o) { write_profile_csv(o, l.g, p); })},
          {"harnack.json", dump(report_document("ehi_profile", to_json(l.g, p)))}};
}

std::vector<Artifact> cmd_measure(const RunConfig& c) {
  const auto l = load_graph(c);
  const MetricGraph mg(l.g);
  const Vertex x = center_of(c, l);
  const auto m = measure_of_config(c, mg, x);
  const double r = param_double(c, "r", mg.eccentricity(x) + 1.0);
  const auto gm = build_ball_measure(mg, m, x, r, ratio_A(c, 8.0));
  const auto check = check_hierarchy(mg, gm.hierarchy);
  const auto good = verify_capacity_good(mg, m, gm.density, x, r);
  json body = {{"construction", to_json(l.g, gm)}, {"hierarchy_check", to_json(l.g, check)},
               {"capacity_good", to_json(l.g, good)}};
  return {{"measure.json", dump(report_document("measure", body))},
          {"measure.csv", to_string_with([&](std::ostream& o) { write_measure_csv(o, l.g, gm.density, gm.mass); })}};
}

std::vector<Artifact> cmd_scale(const RunConfig& c) {
  const auto l = load_graph(c);
  const MetricGraph mg(l.g);
  const auto mu = measure_of_config(c, mg, center_of(c, l));
  const auto centers = c.centers.empty() ? parse_vertex_set(l.g, "all") : parse_vertex_set(l.g, c.centers);
  const auto radii = c.radii.empty() ? default_radii(mg) : c.radii;
  const auto sf = scale_function(mg, mu, centers, radii);
  json body = {{"scale", to_json(l.g, sf)}};
  std::vector<Artifact> arts;
  if (centers.size() == l.g.size()) {
    const auto chain = build_chain_metric(mg, sf);
    const auto env = quasisymmetry_distortion(distance_matrix(mg), chain.dpsi, c.seed.value_or(0));
    body["chain_metric"] = to_json(l.g, chain);
    body["envelope"] = to_json(env);
    arts.push_back({"scale.json", dump(report_document("scale", body))});
    arts.push_back({"dpsi.csv", to_string_with([&](std::ostream& o) { write_matrix_csv(o, l.g, chain.dpsi); })});
  } else {
    arts.push_back({"scale.json", dump(report_document("scale", body))});
  }
  return arts;
}

std::vector<Artifact> cmd_inequalities(const RunConfig& c) {
  const auto l = load_graph(c);
  const MetricGraph mg(l.g);
  const Vertex x = center_of(c, l);
  const auto mu = measure_of_config(c, mg, x);
  const auto radii = c.radii.empty() ? std::vector<double>{2.0, 4.0, 8.0} : c.radii;
  const double A = ratio_A(c, 2.0);
  const double C1 = param_double(c, "C1", 0.125);
  std::vector<double> grid = default_radii(mg);
  grid.insert(grid.end(), radii.begin(), radii.end());
  const Vertex xs[] = {x};
  const auto sf = scale_function(mg, mu, xs, grid);
  json rows = json::array();
  for (double R : radii) {
    const double psi = sf.value(x, R);
    json row = {{"R", R}, {"psi", psi}};
    const auto run = [&](const char* key, auto&& f) {
      try {
        row[key] = f();
      } catch (const Error& e) {
        row[key] = {{"error", e.what()}};
      }
    };
    run("pi", [&] { return to_json(l.g, pi_constant(mg, mu, x, R, A, psi)); });
    run("cs", [&] {
      const auto phi = build_cutoff(mg, x, R, A * R, CutoffKind::equilibrium);
      return to_json(l.g, cs_verify(mg, mu, x, R, A, phi.values, C1, psi));
    });
    run("annulus_cutoff", [&] { return to_json(l.g, annulus_cutoff(mg, mu, x, R, R, psi)); });
    rows.push_back(std::move(row));
  }
  const auto cap = cap_psi_report(mg, mu, [&](Vertex v, double r) { return sf.value(v, r); }, xs, radii,
                                  param_double(c, "kappa", 0.125));
  json body = {{"center", l.g.label(x)}, {"A", A}, {"rows", rows}, {"cap_psi", to_json(l.g, cap)}};
  return {{"inequalities.json", dump(report_document("inequalities", body))}};
}

std::vector<Artifact> cmd_pipeline(const RunConfig& c) {
  const auto l = load_graph(c);
  const MetricGraph mg(l.g);
  PipelineOptions opt;
  opt.center = center_of(c, l);
  if (!c.radii.empty()) opt.radii = c.radii;
  opt.A = ratio_A(c, opt.A);
  if (!c.centers.empty()) opt.ehi_centers = parse_vertex_set(l.g, c.centers);
  opt.kappa = param_double(c, "kappa", opt.kappa);
  opt.cs_C1 = param_double(c, "C1", opt.cs_C1);
  const auto m = measure_of_config(c, mg, opt.center);
  const auto rep = characterization_pipeline(l.g, m, opt);
  json body = to_json(l.g, rep);
  body["config"] = {{"graph", c.generate.empty() ? c.graph : c.generate}, {"measure", c.measure},
                    {"center", l.g.label(opt.center)}, {"radii", opt.radii}, {"A", opt.A}};
  if (c.seed) body["config"]["seed"] = *c.seed;
  return {{"dossier.json", dump(report_document("dossier", body))}};
}

std::vector<Artifact> cmd_net(const RunConfig& c) {
  const auto l = load_graph(c);
  const MetricGraph mg(l.g);
  const Vertex x = center_of(c, l);
  const auto m = measure_of_config(c, mg, x);
  const double eps = param_double(c, "eps", 2.0);
  const auto kind = param(c, "partition", "tent") == "equilibrium" ? PartitionKind::equilibrium : PartitionKind::tent;
  const auto net = discretize(mg, m, eps, kind);
  const MetricGraph mn(net.graph);
  const auto phi = nearest_net_map(mg, net);
  const auto qi = rough_isometry_check(mg, m, mn, net.ball_mass, phi, param_double(c, "C1", std::max(1.0, eps)));
  const auto table = transfer_inequality_experiment(mg, m, eps, x, param_double(c, "R", 4.0 * eps),
                                                    static_cast<std::size_t>(param_double(c, "samples", 32)),
                                                    require_seed(c));
  json body = {{"net", to_json(l.g, net)}, {"rough_isometry", to_json(l.g, qi)}, {"transfer", to_json(table)}};
  std::vector<std::int64_t> net_ids(net.graph.labels().begin(), net.graph.labels().end());
  std::vector<std::int64_t> src_ids(l.g.labels().begin(), l.g.labels().end());
  return {{"net.json", dump(report_document("net", body))},
          {"net.g", to_string_with([&](std::ostream& o) { write_graph(o, net.graph); })},
          {"rst.csv", to_string_with([&](std::ostream& o) { write_triplets_csv(o, net.rst, net_ids, src_ids); })},
          {"ext.csv", to_string_with([&](std::ostream& o) { write_triplets_csv(o, net.ext, src_ids, net_ids); })}};
}

std::vector<Artifact> cmd_dumbbell(const RunConfig& c) {
  const auto l = load_graph(c);
  const MetricGraph mg(l.g);
  const Vertex x = center_of(c, l);
  const auto radii = c.radii.empty() ? std::vector<double>{8.0, 16.0} : c.radii;
  json reports = json::array();
  for (double R : radii) reports.push_back(to_json(l.g, dumbbell_report(mg, x, R)));
  return {{"dumbbell.json", dump(report_document("dumbbell", {{"reports", reports}}))}};
}

std::vector<Artifact> cmd_perturb(const RunConfig& c) {
  const auto l = load_graph(c);
  const auto centers = centers_of(c, l);
  const auto radii = c.radii.empty() ? std::vector<double>{2.0, 4.0} : c.radii;
  const auto rep = perturbation_experiment(l.g, param_double(c, "factor", 2.0),
                                           static_cast<std::size_t>(param_double(c, "trials", 5)), require_seed(c),
                                           centers, radii, ratio_A(c, 2.0));
  return {{"perturb.json", dump(report_document("perturbation", to_json(l.g, rep)))}};
}

const std::map<std::string, Command>& commands() {
  static const std::map<std::string, Command> table = {
      {"generate", cmd_generate}, {"green", cmd_green},   {"capacity", cmd_capacity},
      {"harnack", cmd_harnack},   {"measure", cmd_measure}, {"scale", cmd_scale},
      {"inequalities", cmd_inequalities}, {"pipeline", cmd_pipeline}, {"net", cmd_net},
      {"dumbbell", cmd_dumbbell}, {"perturb", cmd_perturb}};
  return table;
}

void write_file(const fs::path& p, const std::string& body) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw ParameterError("cannot write '" + p.string() + "'");
  f << body;
}

json error_document(const char* type, const std::string& message, json witness = nullptr) {
  json body = {{"error", type}, {"message", message}};
  if (!witness.is_null()) body["witness"] = std::move(witness);
  return report_document("error", body);
}

}  // namespace

int execute(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const auto it = commands().find(config.command);
  if (it == commands().end()) {
    err << "unknown command '" << config.command << "'\n";
    return kExitUsage;
  }
  auto report_error = [&](const json& doc) {
    err << doc.dump(2) << '\n';
    if (!config.out.empty()) {
      std::error_code ec;
      fs::create_directories(config.out, ec);
      if (!ec) write_file(fs::path(config.out) / "error.json", doc.dump(2) + "\n");
    }
  };
  try {
    const auto artifacts = it->second(config);
    if (config.out.empty()) {
      out << artifacts.front().body;
    } else {
      fs::create_directories(config.out);
      for (const auto& a : artifacts) write_file(fs::path(config.out) / a.name, a.body);
      RunConfig saved = config;
      saved.out.clear();
      write_file(fs::path(config.out) / "config.txt", saved.to_text());
    }
    return kExitOk;
  } catch (const ConstructionError& e) {
    report_error(error_document("construction", e.what(), e.witness()));
    return kExitConstruction;
  } catch (const Error& e) {
    report_error(error_document("precondition", e.what()));
    return kExitPrecondition;
  } catch (const std::exception& e) {
    report_error(error_document("internal", e.what()));
    return kExitConstruction;
  }
}

}  // namespace hlab::cli
