// Links only the shared library; nothing here may touch the C++ internals.

#include <cstring>
#include <string>

#include "affsym/affsym.h"
#include "doctest.h"

extern "C" int capi_c_smoke(void);

namespace {

std::string scenario_path(const char* name) { return std::string(AFFSYM_SCENARIO_DIR) + "/" + name + ".json"; }

}  // namespace

TEST_CASE("version, status names and defaults") {
  CHECK(std::string(affsym_version()) == AFFSYM_EXPECTED_VERSION);
  CHECK(std::string(affsym_status_name(AFFSYM_OK)) == "ok");
  CHECK(std::string(affsym_status_name(AFFSYM_ERR_HYPOTHESIS)) == "hypothesis");
  affsym_options o;
  affsym_options_default(&o);
  CHECK(o.seed == 0);
  CHECK(o.tol == 1e-8);
  CHECK(o.p_max == 3);
  CHECK(o.strict == 0);
  CHECK(capi_c_smoke() >= 30);
}

TEST_CASE("null arguments and load errors set the last error") {
  affsym_scenario* s = nullptr;
  CHECK(affsym_scenario_load_file(nullptr, &s) == AFFSYM_ERR_INVALID_ARGUMENT);
  CHECK(std::strlen(affsym_last_error()) > 0);
  CHECK(affsym_scenario_load_file("/nonexistent.json", &s) == AFFSYM_ERR_IO);
  CHECK(s == nullptr);
  CHECK(affsym_scenario_load_json("{\"coords\": [", &s) == AFFSYM_ERR_PARSE);
  CHECK(std::string(affsym_last_error()).find("1:13") != std::string::npos);
  CHECK(affsym_check_geometry(nullptr, nullptr, nullptr) == AFFSYM_ERR_INVALID_ARGUMENT);
  CHECK(affsym_report_json(nullptr) == nullptr);
  affsym_scenario_free(nullptr);
  affsym_report_free(nullptr);
}

TEST_CASE("scenario handle and geometry report") {
  affsym_scenario* s = nullptr;
  REQUIRE(affsym_scenario_load_file(scenario_path("paraboloid").c_str(), &s) == AFFSYM_OK);
  CHECK(std::string(affsym_scenario_name(s)) == "paraboloid");
  CHECK(affsym_scenario_dim(s) == 4);
  CHECK(affsym_scenario_point_count(s) == 3);
  CHECK(std::strlen(affsym_scenario_digest(s)) == 16);

  affsym_report* r = nullptr;
  REQUIRE(affsym_check_geometry(s, nullptr, &r) == AFFSYM_OK);
  CHECK(affsym_report_count(r, "FAIL") == 0);
  CHECK(affsym_report_count(r, "PASS") == affsym_report_count(r, nullptr));
  CHECK(affsym_report_count(r, "bogus") == -1);
  CHECK(affsym_report_exit_code(r, 1) == 0);
  const std::string js = affsym_report_json(r);
  CHECK(js.find("\"scenario\": \"paraboloid\"") != std::string::npos);
  CHECK(std::string(affsym_report_json_untimed(r)).find("wall_time_ms") == std::string::npos);

  affsym_report* r2 = nullptr;
  REQUIRE(affsym_check_geometry(s, nullptr, &r2) == AFFSYM_OK);
  CHECK(std::string(affsym_report_json_untimed(r)) == affsym_report_json_untimed(r2));
  affsym_report_free(r2);
  affsym_report_free(r);

  affsym_options o;
  affsym_options_default(&o);
  o.p_max = 5;
  CHECK(affsym_check_geometry(s, &o, &r) == AFFSYM_ERR_INVALID_ARGUMENT);
  affsym_scenario_free(s);
}

TEST_CASE("oracles and decomposition through the C API") {
  affsym_options o;
  affsym_options_default(&o);
  o.filter = "rp_ei_ek";
  o.trials = 12;
  affsym_report* r = nullptr;
  REQUIRE(affsym_run_oracles(&o, &r) == AFFSYM_OK);
  CHECK(affsym_report_count(r, nullptr) >= 1);
  CHECK(affsym_report_exit_code(r, 0) == 0);
  affsym_report_free(r);

  o.filter = "zzz";
  CHECK(affsym_run_oracles(&o, &r) == AFFSYM_ERR_INVALID_ARGUMENT);

  REQUIRE(affsym_decompose_json(R"({"A": [[0,1],[0,0]], "H": [[0,1],[1,0]]})", nullptr, &r) == AFFSYM_OK);
  CHECK(std::string(affsym_report_json(r)).find("\"size\": 2") != std::string::npos);
  affsym_report_free(r);
  CHECK(affsym_decompose_json(R"({"A": [[0,1],[2,0]], "H": [[1,0],[0,1]]})", nullptr, &r) ==
        AFFSYM_ERR_NOT_SELF_ADJOINT);
  CHECK(affsym_decompose_json(R"({"A": [[1,0],[0,1]], "H": [[0,0],[0,0]]})", nullptr, &r) == AFFSYM_ERR_SINGULAR_FORM);
  CHECK(affsym_decompose_file("/nonexistent.json", nullptr, &r) == AFFSYM_ERR_IO);
}
