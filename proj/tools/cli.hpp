#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitPrecondition = 1;
inline constexpr int kExitConstruction = 2;
inline constexpr int kExitUsage = 64;

/// Everything a run depends on. Stored as "key = value" lines; keys absent
/// from the file keep their defaults.
struct RunConfig {
  std::string command;
  std::string generate;            // generator spec, or
  std::string graph;               // graph file path
  std::string measure = "counting";  // counting | vertex-weight | file:PATH | constructed
  std::string centers;             // vertex list, empty for the command default
  std::vector<double> radii;
  std::string A;                   // ball ratio, or a vertex set for `capacity`
  std::optional<std::uint64_t> seed;
  std::string out;                 // output directory; empty writes to stdout
  std::map<std::string, std::string> params;  // command-specific keys

  std::string to_text() const;
  static RunConfig from_text(const std::string& text);
  bool operator==(const RunConfig&) const = default;
};

RunConfig load_config(const std::string& path);

/// Runs one command from a fully populated config.
int execute(const RunConfig& config, std::ostream& out, std::ostream& err);

/// argv front end: parses flags, then calls execute.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hlab::cli
