#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "affsym/calculus.hpp"
#include "affsym/cli.hpp"
#include "affsym/error.hpp"
#include "affsym/verify.hpp"

namespace affsym::cli {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& origin, const std::string& msg) {
  throw Error(ErrorCode::InvalidArgument, origin + ": " + msg);
}

std::pair<std::size_t, std::size_t> line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  const std::size_t end = std::min(byte > 0 ? byte - 1 : 0, text.size());
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

json parse_json(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_col(text, e.byte);
    std::string what = e.what();
    if (const auto pos = what.find("syntax error"); pos != std::string::npos) what = what.substr(pos);
    throw ParseError(e.byte, "JSON", origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + what);
  }
}

std::string render_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> string_list(const json& j, const std::string& key, const std::string& origin) {
  if (!j.is_array()) bad(origin, "'" + key + "' must be an array");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const json& v = j[i];
    if (v.is_string()) out.push_back(v.get<std::string>());
    else if (v.is_number()) out.push_back(render_number(v.get<double>()));
    else bad(origin, key + "[" + std::to_string(i) + "] must be a string or number");
  }
  return out;
}

// Numbers, or constant expressions such as "pi/4".
double constant_value(const json& v, const std::string& where, const std::string& origin) {
  if (v.is_number()) return v.get<double>();
  if (!v.is_string()) bad(origin, where + " must be a number or constant expression");
  const std::vector<std::string> none;
  try {
    return calculus::evaluate(calculus::parse_expr(v.get<std::string>(), none, &calculus::default_constants()), {});
  } catch (const Error& e) {
    throw Error(e.code(), origin + ": " + where + " \"" + v.get<std::string>() + "\": " + e.what());
  }
}

const std::set<std::string> kCheckNames{
    "frame_consistency", "residual_gauss", "residual_codazzi_h", "residual_codazzi_s", "residual_ricci",
    "gauss_model",       "codazzi_s_operator", "alternating_identity", "rank_theorem", "r_power_vanishes"};

}  // namespace

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::Io, "error reading '" + path + "'");
  return os.str();
}

namespace {

ScenarioFile parse_scenario_impl(const std::string& text, const std::string& origin) {
  const json j = parse_json(text, origin);
  if (!j.is_object()) bad(origin, "top level must be an object");
  static const std::set<std::string> known{"name",          "dim",         "coords",  "immersion", "transversal",
                                           "omega",         "sample_points", "constraints", "checks", "description"};
  for (const auto& [k, v] : j.items())
    if (!known.count(k)) bad(origin, "unknown key '" + k + "'");
  for (const char* k : {"coords", "immersion", "transversal", "sample_points"})
    if (!j.contains(k)) bad(origin, std::string("missing key '") + k + "'");

  ScenarioFile f;
  f.origin = origin;
  f.digest = hex64(verify::fnv1a(text));
  geometry::ScenarioSource& s = f.source;
  s.name = j.value("name", origin);
  s.coords = string_list(j["coords"], "coords", origin);
  if (j.contains("dim")) {
    if (!j["dim"].is_number_integer() || j["dim"].get<long long>() != static_cast<long long>(s.coords.size()))
      bad(origin, "'dim' must equal the number of coords (" + std::to_string(s.coords.size()) + ")");
  }
  s.immersion = string_list(j["immersion"], "immersion", origin);
  s.transversal = string_list(j["transversal"], "transversal", origin);
  if (j.contains("omega")) {
    const json& w = j["omega"];
    if (!w.is_array()) bad(origin, "'omega' must be an array of rows");
    for (std::size_t r = 0; r < w.size(); ++r) {
      const auto row = string_list(w[r], "omega[" + std::to_string(r) + "]", origin);
      if (row.size() != s.coords.size()) bad(origin, "omega row " + std::to_string(r) + " has wrong length");
      s.omega.insert(s.omega.end(), row.begin(), row.end());
    }
    if (w.size() != s.coords.size()) bad(origin, "'omega' must have dim rows");
  }
  const json& pts = j["sample_points"];
  if (!pts.is_array() || pts.empty()) bad(origin, "'sample_points' must be a non-empty array");
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const std::string where = "sample_points[" + std::to_string(i) + "]";
    if (!pts[i].is_array()) bad(origin, where + " must be an array");
    std::vector<double> x;
    for (std::size_t c = 0; c < pts[i].size(); ++c)
      x.push_back(constant_value(pts[i][c], where + "[" + std::to_string(c) + "]", origin));
    s.sample_points.push_back(std::move(x));
  }
  if (j.contains("constraints")) {
    if (!j["constraints"].is_array()) bad(origin, "'constraints' must be an array");
    for (const json& c : j["constraints"]) {
      if (!c.is_object() || !c.contains("expr") || !c.contains("op"))
        bad(origin, "each constraint needs 'expr' and 'op'");
      geometry::ScenarioSource::ConstraintSource cs;
      cs.expr = c["expr"].get<std::string>();
      cs.op = c["op"].get<std::string>();
      cs.name = c.value("name", cs.expr + " " + cs.op);
      cs.value = c.contains("value") ? constant_value(c["value"], "constraint " + cs.name + " value", origin) : 0.0;
      s.constraints.push_back(std::move(cs));
    }
  }
  if (j.contains("checks")) {
    if (!j["checks"].is_array()) bad(origin, "'checks' must be an array");
    for (const json& c : j["checks"]) {
      if (!c.is_object() || !c.contains("name") || !c["name"].is_string()) bad(origin, "each check needs a 'name'");
      CheckSpec cs;
      cs.name = c["name"].get<std::string>();
      if (!kCheckNames.count(cs.name)) bad(origin, "unknown check '" + cs.name + "'");
      if (c.contains("p_max")) {
        if (!c["p_max"].is_number_integer()) bad(origin, "check " + cs.name + ": 'p_max' must be an integer");
        cs.p_max = c["p_max"].get<int>();
      }
      if (c.contains("tol")) {
        if (!c["tol"].is_number() || c["tol"].get<double>() <= 0) bad(origin, "check " + cs.name + ": 'tol' must be > 0");
        cs.tol = c["tol"].get<double>();
      }
      f.checks.push_back(std::move(cs));
    }
  }
  try {
    f.scenario = geometry::build_scenario(s);
  } catch (const Error& e) {
    throw Error(e.code(), origin + ": " + e.what());
  }
  return f;
}

}  // namespace

// Wrong JSON value types surface from nlohmann as type_error; report them as input errors.
ScenarioFile parse_scenario(const std::string& text, const std::string& origin) {
  try {
    return parse_scenario_impl(text, origin);
  } catch (const nlohmann::json::exception& e) {
    bad(origin, e.what());
  }
}

ScenarioFile load_scenario(const std::string& path) { return parse_scenario(read_file(path), path); }

namespace {

MatrixPair parse_matrix_impl(const std::string& text) {
  const std::string origin = "matrix file";
  const json j = parse_json(text, origin);
  if (!j.is_object() || !j.contains("A") || !j.contains("H")) bad(origin, "needs keys 'A' and 'H'");
  MatrixPair m;
  auto read = [&](const json& a, const char* key, int n_hint) {
    std::vector<double> flat;
    int rows = 0;
    if (!a.is_array()) bad(origin, std::string("'") + key + "' must be an array");
    const bool nested = !a.empty() && a[0].is_array();
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (nested) {
        ++rows;
        for (std::size_t c = 0; c < a[i].size(); ++c)
          flat.push_back(constant_value(a[i][c], std::string(key) + "[" + std::to_string(i) + "]", origin));
      } else {
        flat.push_back(constant_value(a[i], std::string(key) + "[" + std::to_string(i) + "]", origin));
      }
    }
    int n = n_hint;
    if (n <= 0) {
      n = nested ? rows : static_cast<int>(std::lround(std::sqrt(static_cast<double>(flat.size()))));
    }
    if (n <= 0 || flat.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n) || (nested && rows != n))
      bad(origin, std::string("'") + key + "' must be a " + std::to_string(n) + "x" + std::to_string(n) +
                      " row-major matrix");
    Eigen::MatrixXd M(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) M(r, c) = flat[static_cast<std::size_t>(r * n + c)];
    return M;
  };
  int dim = 0;
  if (j.contains("dim")) {
    if (!j["dim"].is_number_integer() || j["dim"].get<int>() < 1) bad(origin, "'dim' must be a positive integer");
    dim = j["dim"].get<int>();
  }
  m.A = read(j["A"], "A", dim);
  m.H = read(j["H"], "H", static_cast<int>(m.A.rows()));
  m.dim = static_cast<int>(m.A.rows());
  return m;
}

}  // namespace

MatrixPair parse_matrix_pair(const std::string& text) {
  try {
    return parse_matrix_impl(text);
  } catch (const nlohmann::json::exception& e) {
    bad("matrix file", e.what());
  }
}

}  // namespace affsym::cli
