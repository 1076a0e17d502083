#pragma once

// Scenario files, run reports, and the subcommands behind the command-line tool.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "affsym/geometry.hpp"

namespace affsym::cli {

/// Per-check overrides from a scenario's `checks` list.
struct CheckSpec {
  std::string name;
  std::optional<int> p_max;
  std::optional<double> tol;
};

struct ScenarioFile {
  geometry::ScenarioSource source;
  geometry::Scenario scenario;  // parsed and constraint-checked
  std::vector<CheckSpec> checks;
  std::string digest;  // FNV-1a of the raw bytes, 16 hex digits
  std::string origin;  // path or "<memory>"
};

/// JSON syntax errors carry line and column; schema errors name the key.
/// Throws Error(Parse) / Error(InvalidArgument) / Error(Io).
ScenarioFile parse_scenario(const std::string& text, const std::string& origin = "<memory>");
ScenarioFile load_scenario(const std::string& path);

std::string read_file(const std::string& path);  // Error(Io) on failure
std::string hex64(std::uint64_t v);

enum class Status { Pass, Fail, Vacuous, Warn };
const char* status_name(Status s);

struct CheckRecord {
  std::string name;
  Status status = Status::Pass;
  double value = 0.0;  // residual, max |component|, or abs_err
  nlohmann::json params = nlohmann::json::object();  // identifies the record; part of the sort key
  nlohmann::json data = nlohmann::json::object();    // further results
  std::string detail;
  double wall_time_ms = 0.0;
};

struct RunReport {
  std::string tool_version;
  std::string command;
  std::string scenario;
  std::string scenario_digest;
  std::uint64_t master_seed = 0;
  nlohmann::json options = nlohmann::json::object();
  std::vector<CheckRecord> checks;
  double wall_time_ms = 0.0;

  /// Sort by name then parameters (canonical order, independent of scheduling).
  void canonicalize();
  int count(Status s) const;
  /// 0 when no FAIL (and no WARN under strict), 1 otherwise.
  int exit_code(bool strict) const;
};

nlohmann::json to_json(const RunReport& r);
std::string dump(const RunReport& r, int indent = 2);
/// The report with every wall-time field removed (for determinism comparisons).
std::string dump_without_timing(const RunReport& r);

struct Options {
  std::uint64_t seed = 0;
  double tol = 1e-8;
  int p_max = 3;
  int trials = 100;
  std::string filter = "*";
  bool strict = false;
};

RunReport cmd_check_geometry(const ScenarioFile& f, const Options& o);
/// Throws Error(InvalidArgument) if the filter matches no catalog id.
RunReport cmd_oracles(const Options& o);
RunReport cmd_list_oracles();

struct MatrixPair {
  int dim = 0;
  Eigen::MatrixXd A;
  Eigen::MatrixXd H;
};
MatrixPair parse_matrix_pair(const std::string& text);
/// Not H-selfadjoint / singular H propagate as Error.
RunReport cmd_decompose(const MatrixPair& m, const Options& o);

/// Input-error exit code used by the tool.
inline constexpr int kExitInputError = 2;

}  // namespace affsym::cli
