#include <cmath>
#include <set>

#include "affsym/canonical_pair.hpp"
#include "affsym/cli.hpp"
#include "affsym/error.hpp"
#include "affsym/geometry.hpp"
#include "doctest.h"
#include "scenarios.hpp"

using namespace affsym;
using namespace affsym::cli;
using nlohmann::json;

namespace {

std::string scenario_path(const std::string& name) { return std::string(AFFSYM_SCENARIO_DIR) + "/" + name + ".json"; }

ErrorCode code_of_parse(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Ok;
}

std::string message_of_parse(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

const std::string kMinimal = R"({
  "coords": ["u1", "u2", "u3", "u4"],
  "immersion": ["u1", "u2", "u3", "u4", "u1^2 + u2^2 + u3^2 + u4^2"],
  "transversal": ["0", "0", "0", "0", "1"],
  "sample_points": [[0, 0, 0, 0]]
})";

std::string matrix_json(const Eigen::MatrixXd& A, const Eigen::MatrixXd& H) {
  json j;
  j["dim"] = A.rows();
  json a = json::array(), h = json::array();
  for (int r = 0; r < A.rows(); ++r) {
    json ra = json::array(), rh = json::array();
    for (int c = 0; c < A.cols(); ++c) {
      ra.push_back(A(r, c));
      rh.push_back(H(r, c));
    }
    a.push_back(ra);
    h.push_back(rh);
  }
  j["A"] = a;
  j["H"] = h;
  return j.dump();
}

std::vector<const CheckRecord*> named(const RunReport& r, const std::string& name) {
  std::vector<const CheckRecord*> out;
  for (const auto& c : r.checks)
    if (c.name == name) out.push_back(&c);
  return out;
}

}  // namespace

TEST_CASE("shipped scenario files match the in-code gallery") {
  const std::pair<std::string, geometry::ScenarioSource> cases[] = {
      {"paper_example_n2", test_scenarios::paper_example(2)},
      {"paper_example_n3", test_scenarios::paper_example(3)},
      {"paraboloid", test_scenarios::paraboloid()},
      {"centroaffine_sphere", test_scenarios::centroaffine_sphere()},
  };
  for (const auto& [name, ref] : cases) {
    CAPTURE(name);
    const ScenarioFile f = load_scenario(scenario_path(name));
    CHECK(f.source.name == ref.name);
    CHECK(f.source.coords == ref.coords);
    CHECK(f.source.immersion == ref.immersion);
    CHECK(f.source.transversal == ref.transversal);
    CHECK(f.source.omega == ref.omega);
    REQUIRE(f.source.sample_points.size() == ref.sample_points.size());
    for (std::size_t i = 0; i < ref.sample_points.size(); ++i) {
      REQUIRE(f.source.sample_points[i].size() == ref.sample_points[i].size());
      for (std::size_t c = 0; c < ref.sample_points[i].size(); ++c)
        CHECK(f.source.sample_points[i][c] == doctest::Approx(ref.sample_points[i][c]).epsilon(1e-15));
    }
    REQUIRE(f.source.constraints.size() == ref.constraints.size());
    for (std::size_t i = 0; i < ref.constraints.size(); ++i) {
      CHECK(f.source.constraints[i].name == ref.constraints[i].name);
      CHECK(f.source.constraints[i].op == ref.constraints[i].op);
      CHECK(f.source.constraints[i].value == doctest::Approx(ref.constraints[i].value).epsilon(1e-15));
    }
    CHECK(f.digest.size() == 16);
  }
}

TEST_CASE("scenario input errors") {
  CHECK(code_of_parse(kMinimal) == ErrorCode::Ok);

  // JSON syntax: line and column of the offending token
  const std::string broken = "{\n  \"coords\": [\"a\",\n  ]\n}\n";
  CHECK(code_of_parse(broken) == ErrorCode::Parse);
  CHECK(message_of_parse(broken).find("<memory>:3:3") != std::string::npos);

  json j = json::parse(kMinimal);
  j["immersion"][4] = "u1^2 + * u2";
  CHECK(code_of_parse(j.dump()) == ErrorCode::Parse);
  CHECK(message_of_parse(j.dump()).find("immersion[4]") != std::string::npos);

  j = json::parse(kMinimal);
  j["immersion"][4] = "w^2";
  CHECK(code_of_parse(j.dump()) == ErrorCode::UnknownIdentifier);

  j = json::parse(kMinimal);
  j["dim"] = 6;
  CHECK(code_of_parse(j.dump()) == ErrorCode::InvalidArgument);

  j = json::parse(kMinimal);
  j["bogus"] = 1;
  CHECK(message_of_parse(j.dump()).find("unknown key 'bogus'") != std::string::npos);

  j = json::parse(kMinimal);
  j["checks"] = json::array({json{{"name", "no_such_check"}}});
  CHECK(code_of_parse(j.dump()) == ErrorCode::InvalidArgument);

  j = json::parse(kMinimal);
  j["coords"] = 5;
  CHECK(code_of_parse(j.dump()) == ErrorCode::InvalidArgument);

  j = json::parse(kMinimal);
  j["constraints"] = json::array({json{{"name", "u1_pos"}, {"expr", "u1"}, {"op", ">"}, {"value", 0}}});
  CHECK(code_of_parse(j.dump()) == ErrorCode::Domain);
  CHECK(message_of_parse(j.dump()).find("u1_pos") != std::string::npos);

  j = json::parse(kMinimal);
  j["sample_points"] = json::array({json::array({"pi/4", "sqrt(2)", 0, "-1"})});
  const ScenarioFile f = parse_scenario(j.dump());
  CHECK(f.source.sample_points[0][0] == doctest::Approx(std::atan(1.0)));
  CHECK(f.source.sample_points[0][1] == doctest::Approx(std::sqrt(2.0)));

  CHECK_THROWS_AS(load_scenario("/nonexistent/scenario.json"), Error);
  try {
    load_scenario("/nonexistent/scenario.json");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Io);
  }
}

TEST_CASE("check-geometry on the example with a nilpotent shape operator") {
  const ScenarioFile f = load_scenario(scenario_path("paper_example_n2"));
  const RunReport r = cmd_check_geometry(f, Options{});
  CHECK(r.count(Status::Fail) == 0);
  CHECK(r.exit_code(true) == 0);
  CHECK(r.scenario == "paper_example_n2");
  for (const char* name : {"residual_gauss", "residual_codazzi_h", "residual_codazzi_s", "residual_ricci"}) {
    const auto recs = named(r, name);
    CHECK(recs.size() == 3);
    for (const auto* c : recs) CHECK(c->value < 1e-8);
  }
  const auto vanish = named(r, "r_power_vanishes");
  REQUIRE(vanish.size() == 3);
  for (const auto* c : vanish) {
    CHECK(c->params["p"] == 3);
    CHECK(c->value < 1e-8);
    CHECK(c->status == Status::Pass);
  }
  // R and R^2 do not vanish (vacuous); R^3 does and S has the admissible shape
  for (const auto* c : named(r, "rank_theorem")) {
    const int p = c->params["p"].get<int>();
    CHECK(c->status == (p == 3 ? Status::Pass : Status::Vacuous));
    CHECK(c->data["rank_S"] == 1);
  }
  CHECK(named(r, "alternating_identity").size() == 3);
}

TEST_CASE("check-geometry on the paraboloid and the sphere") {
  const RunReport par = cmd_check_geometry(load_scenario(scenario_path("paraboloid")), Options{});
  CHECK(par.count(Status::Fail) == 0);
  CHECK(par.count(Status::Vacuous) == 0);
  for (const auto& c : par.checks)
    if (c.name.rfind("residual_", 0) == 0 || c.name == "frame_consistency") CHECK(c.value < 1e-12);

  Options o;
  o.p_max = 2;
  const RunReport sph = cmd_check_geometry(load_scenario(scenario_path("centroaffine_sphere")), o);
  CHECK(sph.count(Status::Fail) == 0);
  const auto rank = named(sph, "rank_theorem");
  CHECK(rank.size() == 4);
  for (const auto* c : rank) CHECK(c->status == Status::Vacuous);

  o.p_max = 4;
  CHECK_THROWS_AS(cmd_check_geometry(load_scenario(scenario_path("paraboloid")), o), Error);
}

TEST_CASE("sample-point failures become FAIL records") {
  // xi tangent to the image at the origin: singular frame
  json j = json::parse(kMinimal);
  j["transversal"] = json::array({"1", "0", "0", "0", "0"});
  const RunReport r = cmd_check_geometry(parse_scenario(j.dump()), Options{});
  CHECK(r.count(Status::Fail) == 1);
  CHECK(r.checks.front().name == "sample_point");
  CHECK(r.exit_code(false) == 1);
}

TEST_CASE("oracles command") {
  Options o;
  o.filter = "blk3_*";
  o.trials = 30;
  RunReport r = cmd_oracles(o);
  std::set<std::string> ids;
  for (const auto& c : r.checks) ids.insert(c.name);
  CHECK(ids == std::set<std::string>{"blk3_12", "blk3_122i", "blk3_12ij", "blk3_2312"});
  CHECK(r.exit_code(false) == 0);

  o.filter = "cx_detpow";
  o.p_max = 3;
  r = cmd_oracles(o);
  REQUIRE(r.checks.size() == 3);
  for (int p = 1; p <= 3; ++p) {
    const CheckRecord& c = r.checks[static_cast<std::size_t>(p - 1)];
    CHECK(c.params["p"] == p);
    CHECK(c.value < 1e-9);
    CHECK(c.status == Status::Pass);
  }

  o.filter = "no_such_*";
  CHECK_THROWS_AS(cmd_oracles(o), Error);

  const RunReport all = cmd_list_oracles();
  CHECK(all.checks.size() >= 30);
}

TEST_CASE("decompose command") {
  MatrixPair m = parse_matrix_pair(R"({"dim": 4, "A": [0,0,0,0, 0,0,0,0, 0,0,0,0, 0,0,0,0],
                                        "H": [[1,0,0,0],[0,-1,0,0],[0,0,1,0],[0,0,0,-1]]})");
  RunReport r = cmd_decompose(m, Options{});
  CHECK(named(r, "block").size() == 4);
  const auto cls = named(r, "sign_class");
  REQUIRE(cls.size() == 1);
  CHECK(cls[0]->data["signs"]["+1"] == 2);
  CHECK(cls[0]->data["signs"]["-1"] == 2);
  CHECK(r.exit_code(false) == 0);

  // (S, h) of the example at its first sample point
  const auto sc = geometry::build_scenario(test_scenarios::paper_example(2));
  const auto st = geometry::induced_structure(sc, sc.sample_points[0]);
  r = cmd_decompose(parse_matrix_pair(matrix_json(st.S, st.h)), Options{});
  std::multiset<std::pair<int, double>> blocks;
  for (const auto* c : named(r, "block")) {
    CHECK(c->data["kind"] == "real");
    blocks.insert({c->data["size"].get<int>(), std::abs(c->data["lambda"].get<double>()) < 1e-9 ? 0.0 : 1.0});
  }
  CHECK(blocks == std::multiset<std::pair<int, double>>{{1, 0.0}, {1, 0.0}, {2, 0.0}});
  CHECK(named(r, "rank")[0]->value == 1);
  CHECK(named(r, "classify")[0]->data["final_form"] == true);

  // generator round trip through the file format
  const canonical_pair::RoundTripCase rt = canonical_pair::make_round_trip_case(42);
  r = cmd_decompose(parse_matrix_pair(matrix_json(rt.A, rt.H)), Options{});
  std::multiset<std::string> want, got;
  for (const auto& b : rt.blocks) {
    if (const auto* rb = std::get_if<model::RealBlock>(&b)) want.insert("R" + std::to_string(rb->size));
    else want.insert("C" + std::to_string(2 * std::get<model::ComplexBlock>(b).half_size));
  }
  for (const auto* c : named(r, "block"))
    got.insert((c->data["kind"] == "real" ? "R" : "C") + std::to_string(c->data["size"].get<int>()));
  CHECK(got == want);
  CHECK(r.count(Status::Fail) == 0);

  CHECK_THROWS_AS(cmd_decompose(parse_matrix_pair(R"({"A": [[0,1],[2,0]], "H": [[1,0],[0,1]]})"), Options{}), Error);
  CHECK_THROWS_AS(parse_matrix_pair(R"({"dim": 3, "A": [1,2,3,4], "H": [1,0,0,1]})"), Error);
}

TEST_CASE("reports are canonical and deterministic") {
  const ScenarioFile f = load_scenario(scenario_path("paper_example_n2"));
  Options o;
  o.seed = 99;
  const std::string a = dump_without_timing(cmd_check_geometry(f, o));
  const std::string b = dump_without_timing(cmd_check_geometry(f, o));
  CHECK(a == b);
  CHECK(a.find("wall_time_ms") == std::string::npos);
  o.filter = "cx_b*";
  o.trials = 20;
  CHECK(dump_without_timing(cmd_oracles(o)) == dump_without_timing(cmd_oracles(o)));

  const json j = to_json(cmd_check_geometry(f, o));
  for (const char* key : {"tool_version", "scenario_digest", "master_seed", "checks", "summary"})
    CHECK(j.contains(key));
  CHECK(j["master_seed"] == 99);
  const auto& checks = j["checks"];
  for (std::size_t i = 1; i < checks.size(); ++i) {
    const bool ordered = checks[i - 1]["name"] < checks[i]["name"] ||
                         (checks[i - 1]["name"] == checks[i]["name"] && !(checks[i]["params"] < checks[i - 1]["params"]));
    CHECK(ordered);
  }
}

TEST_CASE("exit codes") {
  RunReport r;
  CHECK(r.exit_code(false) == 0);
  CheckRecord w;
  w.name = "w";
  w.status = Status::Warn;
  r.checks.push_back(w);
  CHECK(r.exit_code(false) == 0);
  CHECK(r.exit_code(true) == 1);
  CheckRecord v = w;
  v.status = Status::Vacuous;
  r.checks = {v};
  CHECK(r.exit_code(true) == 0);
  CheckRecord fl = w;
  fl.status = Status::Fail;
  r.checks.push_back(fl);
  CHECK(r.exit_code(false) == 1);
}
