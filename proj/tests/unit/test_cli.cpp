#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "harnacklab/graph.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code = 0;
  std::string out, err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "harnacklab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Result r;
  r.code = hlab::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path scratch(const std::string& name) {
  const char* env = std::getenv("HARNACKLAB_TEST_TMP");
  const fs::path root = env ? fs::path(env) : fs::temp_directory_path() / "harnacklab_cli";
  const fs::path p = root / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("usage errors") {
  CHECK(invoke({"green", "--bogus", "1"}).code == hlab::cli::kExitUsage);
  CHECK(invoke({"nosuchcommand"}).code == hlab::cli::kExitUsage);
  CHECK(invoke({}).code == hlab::cli::kExitUsage);
  const auto r = invoke({"capacity", "--eps", "2"});  // a flag of another command
  CHECK(r.code == hlab::cli::kExitUsage);
  CHECK(r.err.find("capacity") != std::string::npos);
  CHECK(invoke({"--help"}).code == hlab::cli::kExitOk);
}

TEST_CASE("precondition errors") {
  CHECK(invoke({"green"}).code == hlab::cli::kExitPrecondition);
  CHECK(invoke({"green", "--generate", "path:9", "--graph", "x.g"}).code == hlab::cli::kExitPrecondition);
  CHECK(invoke({"capacity", "--generate", "path:9", "--D", "v1..v7"}).code == hlab::cli::kExitPrecondition);
  CHECK(invoke({"capacity", "--generate", "path:9", "--A", "v99", "--D", "v1..v7"}).code ==
        hlab::cli::kExitPrecondition);
  CHECK(invoke({"harnack", "--generate", "path:9", "--radii", "2,x"}).code == hlab::cli::kExitPrecondition);
  CHECK(invoke({"harnack", "--generate", "path:9", "--seed", "-3"}).code == hlab::cli::kExitPrecondition);
  CHECK(invoke({"green", "--generate", "nonsense:3"}).code == hlab::cli::kExitPrecondition);

  // randomized commands refuse to run without a seed
  const auto net = invoke({"net", "--generate", "path:33", "--eps", "2"});
  CHECK(net.code == hlab::cli::kExitPrecondition);
  CHECK(net.err.find("--seed") != std::string::npos);
  CHECK(invoke({"perturb", "--generate", "lattice2d:9", "--radii", "2"}).code == hlab::cli::kExitPrecondition);

  const auto dir = scratch("precondition");
  CHECK(invoke({"green", "--out", dir.string()}).code == hlab::cli::kExitPrecondition);
  const auto doc = json::parse(slurp(dir / "error.json"));
  CHECK(doc.at("error") == "precondition");
  CHECK(doc.contains("schema_version"));
}

TEST_CASE("construction errors carry a witness") {
  const auto dir = scratch("construction");
  // B0 is the whole path, so the top capacity domain is clipped
  const auto r = invoke({"measure", "--generate", "path:33", "--center", "v16", "--r", "16", "--out", dir.string()});
  CHECK(r.code == hlab::cli::kExitConstruction);
  const auto doc = json::parse(slurp(dir / "error.json"));
  CHECK(doc.at("error") == "construction");
  CHECK(doc.contains("witness"));
  CHECK_FALSE(fs::exists(dir / "measure.json"));
}

TEST_CASE("capacity of a path segment") {
  const auto dir = scratch("capacity");
  REQUIRE(invoke({"generate", "--generate", "path:9", "--out", dir.string()}).code == 0);
  const auto graph = (dir / "graph.g").string();
  const auto r = invoke({"capacity", "--graph", graph, "--A", "v4", "--D", "v1..v7"});
  REQUIRE(r.code == 0);
  const auto doc = json::parse(r.out);
  // two unit-resistance series arms of length 4 in parallel
  CHECK(doc.at("capacity").get<double>() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(doc.at("A") == json::array({4}));

  const auto p5 = invoke({"capacity", "--graph", graph, "--A", "v4", "--D", "v3..v5"});
  CHECK(json::parse(p5.out).at("capacity").get<double>() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("generated graphs round trip") {
  const auto dir = scratch("generate");
  REQUIRE(invoke({"generate", "--generate", "sst:2,3/5", "--out", dir.string()}).code == 0);
  const auto g = hlab::read_graph_file((dir / "graph.g").string());
  const auto ref = hlab::generate(hlab::parse_generator_spec("sst:2,3/5"));
  CHECK(g.size() == ref.size());
  CHECK(g.edge_count() == ref.edge_count());
  std::ostringstream a, b;
  hlab::write_graph(a, g);
  hlab::write_graph(b, ref);
  CHECK(a.str() == b.str());
  CHECK(slurp(dir / "graph.g") == a.str());
}

TEST_CASE("config files round trip") {
  hlab::cli::RunConfig c;
  c.command = "net";
  c.generate = "lattice2d:17";
  c.measure = "vertex-weight";
  c.centers = "v1,v4..v7";
  c.radii = {2.0, 0.1, 1e-7};
  c.A = "2.5";
  c.seed = 18446744073709551615ULL;
  c.out = "some dir/x";
  c.params = {{"eps", "2"}, {"partition", "equilibrium"}};
  CHECK(hlab::cli::RunConfig::from_text(c.to_text()) == c);
  CHECK(hlab::cli::RunConfig::from_text(hlab::cli::RunConfig().to_text()) == hlab::cli::RunConfig());

  const auto dir = scratch("config");
  REQUIRE(invoke({"harnack", "--generate", "lattice2d:9", "--radii", "2", "--A", "2", "--out", dir.string()}).code == 0);
  const auto saved = hlab::cli::load_config((dir / "config.txt").string());
  CHECK(saved.command == "harnack");
  CHECK(saved.generate == "lattice2d:9");
  CHECK(saved.radii == std::vector<double>{2.0});
  CHECK(saved.out.empty());

  // rerunning from the saved config reproduces the artifacts
  const auto again = scratch("config_again");
  REQUIRE(invoke({"harnack", "--config", (dir / "config.txt").string(), "--out", again.string()}).code == 0);
  CHECK(slurp(dir / "profile.csv") == slurp(again / "profile.csv"));
  CHECK(slurp(dir / "harnack.json") == slurp(again / "harnack.json"));

  CHECK_THROWS(hlab::cli::RunConfig::from_text("nokey"));
  CHECK_THROWS(hlab::cli::RunConfig::from_text("colour = red"));
}

TEST_CASE("pipeline dossier") {
  const auto dir = scratch("pipeline");
  const auto r = invoke({"pipeline", "--generate", "lattice2d:17", "--radii", "2,4", "--A", "2", "--seed", "7",
                         "--out", dir.string()});
  REQUIRE(r.code == 0);
  const auto doc = json::parse(slurp(dir / "dossier.json"));
  CHECK(doc.at("kind") == "dossier");
  CHECK(doc.contains("schema_version"));
  CHECK(doc.at("config").at("seed") == 7);
  CHECK(doc.at("ok") == true);
  CHECK_FALSE(doc.at("presentations").empty());
  CHECK(fs::exists(dir / "config.txt"));
}

TEST_CASE("csv artifacts carry headers") {
  const auto dir = scratch("csv");
  REQUIRE(invoke({"harnack", "--generate", "sst:2,3,4,5/9", "--radii", "2,4", "--out", dir.string()}).code == 0);
  const auto csv = slurp(dir / "profile.csv");
  CHECK(csv.rfind("x,R,A,C_H,y,z,b\n", 0) == 0);
  REQUIRE(invoke({"green", "--generate", "path:9", "--D", "v1..v7", "--out", dir.string()}).code == 0);
  CHECK(slurp(dir / "green.csv").rfind("vertex", 0) == 0);
}

TEST_CASE("identical configs give identical bytes") {
  const std::vector<std::vector<std::string>> runs = {
      {"net", "--generate", "lattice2d:9", "--eps", "2", "--samples", "4", "--seed", "3"},
      {"perturb", "--generate", "lattice2d:9", "--radii", "2", "--factor", "2", "--trials", "2", "--seed", "5"},
      {"scale", "--generate", "lattice2d:9", "--radii", "1,2,4", "--seed", "1"},
  };
  int k = 0;
  for (const auto& base : runs) {
    const auto d1 = scratch("det_a" + std::to_string(k)), d2 = scratch("det_b" + std::to_string(k));
    ++k;
    auto a = base, b = base;
    a.insert(a.end(), {"--out", d1.string()});
    b.insert(b.end(), {"--out", d2.string()});
    REQUIRE(invoke(a).code == 0);
    REQUIRE(invoke(b).code == 0);
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(d1)) {
      CHECK(slurp(e.path()) == slurp(d2 / e.path().filename()));
      ++files;
    }
    CHECK(files >= 2);
  }
  // a different seed changes the random part
  const auto s1 = invoke({"perturb", "--generate", "lattice2d:9", "--radii", "2", "--trials", "1", "--seed", "1"});
  const auto s2 = invoke({"perturb", "--generate", "lattice2d:9", "--radii", "2", "--trials", "1", "--seed", "2"});
  CHECK(s1.out != s2.out);
}
