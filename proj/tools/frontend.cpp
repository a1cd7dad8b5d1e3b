#include <CLI11.hpp>

#include <iostream>
#include <memory>
#include <sstream>

#include "cli.hpp"
#include "harnacklab/errors.hpp"

namespace hlab::cli {

namespace {

struct Flags {
  std::string config, generate, graph, measure, centers, radii, A, seed, out;
  std::map<std::string, std::string> params;
};

struct CommandInfo {
  const char* name;
  const char* help;
  std::vector<std::pair<const char*, const char*>> params;  // flag, description
};

const std::vector<CommandInfo>& command_table() {
  static const std::vector<CommandInfo> table = {
      {"generate", "Write a generated graph in the graph file format", {}},
      {"green", "Green kernel of a domain (CSV) with residuals", {{"D", "domain vertex set"}}},
      {"capacity", "Capacity, equilibrium potential and measure of A in D", {{"D", "domain vertex set"}}},
      {"harnack", "EHI profile over centers and radii", {{"balls", "cable | graph"}, {"center", "default center"}}},
      {"measure", "Dyadic-cube measure construction and its verification",
       {{"center", "ball center"}, {"r", "ball radius (default eccentricity + 1)"}}},
      {"scale", "Scale function, chain metric and quasisymmetry envelope", {{"center", "center for measure"}}},
      {"inequalities", "PI, cutoff-energy and capacity estimates at one center",
       {{"center", "ball center"}, {"C1", "gradient coefficient"}, {"kappa", "inner ball ratio"}}},
      {"pipeline", "End-to-end characterization dossier",
       {{"center", "ball center"}, {"C1", "gradient coefficient"}, {"kappa", "inner ball ratio"}}},
      {"net", "Net discretization, rough isometry and transfer table",
       {{"eps", "net scale"}, {"C1", "covering radius"}, {"center", "ball center"}, {"R", "ball radius"},
        {"samples", "random functions"}, {"partition", "tent | equilibrium"}}},
      {"dumbbell", "Dumbbell conductance ratio over admissible pairs", {{"center", "ball center"}}},
      {"perturb", "Harnack constants under random weight perturbation",
       {{"factor", "weight factor bound"}, {"trials", "number of trials"}}},
  };
  return table;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Potential theory and Harnack inequality toolkit for weighted graphs", "harnacklab"};
  app.require_subcommand(1);
  Flags f;
  std::vector<std::pair<CLI::App*, const CommandInfo*>> subs;
  std::map<std::string, CLI::Option*> opts;
  for (const auto& info : command_table()) {
    CLI::App* sub = app.add_subcommand(info.name, info.help);
    sub->add_option("--config", f.config, "key = value run config");
    sub->add_option("--generate", f.generate, "generator spec, e.g. lattice2d:33 or sst:2,3,4,5");
    sub->add_option("--graph", f.graph, "graph file");
    sub->add_option("--measure", f.measure, "counting | vertex-weight | file:PATH | constructed");
    sub->add_option("--centers", f.centers, "vertex set, e.g. v1,v4..v7 or all");
    sub->add_option("--radii", f.radii, "comma-separated radii");
    sub->add_option("--A", f.A, std::string(info.name) == "capacity" ? "vertex set A" : "ball ratio A");
    sub->add_option("--seed", f.seed, "integer seed");
    sub->add_option("--out", f.out, "output directory");
    for (const auto& [flag, help] : info.params) sub->add_option(std::string("--") + flag, f.params[flag], help);
    subs.emplace_back(sub, &info);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  RunConfig c;
  try {
    for (const auto& [sub, info] : subs) {
      if (!sub->parsed()) continue;
      if (sub->get_option("--config")->count() > 0) c = load_config(f.config);
      c.command = info->name;
      auto set = [&](const char* name, std::string& field, const std::string& value) {
        if (sub->get_option(name)->count() > 0) field = value;
      };
      set("--generate", c.generate, f.generate);
      set("--graph", c.graph, f.graph);
      set("--measure", c.measure, f.measure);
      set("--centers", c.centers, f.centers);
      set("--A", c.A, f.A);
      set("--out", c.out, f.out);
      if (sub->get_option("--radii")->count() > 0) {
        std::ostringstream line;
        line << "radii = " << f.radii;
        c.radii = RunConfig::from_text(line.str()).radii;
      }
      if (sub->get_option("--seed")->count() > 0) {
        c.seed = RunConfig::from_text("seed = " + f.seed).seed;
      }
      for (const auto& [flag, help] : info->params)
        if (sub->get_option(std::string("--") + flag)->count() > 0) c.params[flag] = f.params[flag];
    }
  } catch (const Error& e) {
    err << e.what() << '\n';
    return kExitPrecondition;
  }
  return execute(c, out, err);
}

}  // namespace hlab::cli
