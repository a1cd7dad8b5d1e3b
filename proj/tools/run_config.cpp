#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "harnacklab/errors.hpp"

namespace hlab::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string format_list(const std::vector<double>& xs) {
  std::string s;
  char buf[32];
  for (std::size_t i = 0; i < xs.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", xs[i]);
    s += (i ? "," : "");
    s += buf;
  }
  return s;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> xs;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      xs.push_back(std::stod(item, &used));
      if (used != item.size()) throw ParameterError("");
    } catch (const std::exception&) {
      throw ParameterError("invalid number '" + item + "' in list");
    }
  }
  return xs;
}

}  // namespace

std::string RunConfig::to_text() const {
  std::ostringstream o;
  auto line = [&](const std::string& k, const std::string& v) {
    if (!v.empty()) o << k << " = " << v << '\n';
  };
  line("command", command);
  line("generate", generate);
  line("graph", graph);
  line("measure", measure);
  line("centers", centers);
  line("radii", format_list(radii));
  line("A", A);
  if (seed) line("seed", std::to_string(*seed));
  line("out", out);
  for (const auto& [k, v] : params) line("param." + k, v);
  return o.str();
}

RunConfig RunConfig::from_text(const std::string& text) {
  RunConfig c;
  c.measure.clear();
  std::istringstream in(text);
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string s = trim(raw);
    if (s.empty() || s[0] == '#') continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw ParameterError("config line " + std::to_string(lineno) + " is not 'key = value'");
    const std::string key = trim(s.substr(0, eq)), value = trim(s.substr(eq + 1));
    if (key == "command") c.command = value;
    else if (key == "generate") c.generate = value;
    else if (key == "graph") c.graph = value;
    else if (key == "measure") c.measure = value;
    else if (key == "centers") c.centers = value;
    else if (key == "radii") c.radii = parse_list(value);
    else if (key == "A") c.A = value;
    else if (key == "seed") {
      try {
        std::size_t used = 0;
        if (value.empty() || !std::isdigit(static_cast<unsigned char>(value[0]))) throw ParameterError("");
        c.seed = std::stoull(value, &used);
        if (used != value.size()) throw ParameterError("");
      } catch (const std::exception&) {
        throw ParameterError("seed must be a nonnegative integer: '" + value + "'");
      }
    } else if (key == "out") c.out = value;
    else if (key.rfind("param.", 0) == 0) c.params[key.substr(6)] = value;
    else throw ParameterError("unknown config key '" + key + "'");
  }
  if (c.measure.empty()) c.measure = "counting";
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return RunConfig::from_text(ss.str());
}

}  // namespace hlab::cli
