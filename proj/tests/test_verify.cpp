#include <chrono>
#include <cmath>
#include <set>

#include "affsym/error.hpp"
#include "affsym/tensor_ops.hpp"
#include "affsym/verify.hpp"
#include "doctest.h"
#include "scenarios.hpp"

using namespace affsym;
using namespace affsym::verify;
using model::ComplexBlock;
using model::RealBlock;

namespace {

ErrorCode code_of(const OracleSpec& s) {
  try {
    run_oracle(s);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Ok;
}

}  // namespace

TEST_CASE("hand-computed instances") {
  // e_i = e3, e_k = e2 of a 2x2 block with alpha = 2: closed 4 * omega(e3, e2)
  OracleSpec s;
  s.id = "rp_ei_ek";
  s.p = 2;
  s.params = {{"k", 2}, {"alpha", 2.0}, {"eps", 1}, {"i", 3}};
  s.tail = {RealBlock{1, 0.3, 1}, RealBlock{1, -0.2, -1}};
  const MatrixXd W = model::default_omega(4);
  OracleResult r = run_oracle(s);
  CHECK(r.closed == doctest::Approx(4.0 * W(2, 1)));
  CHECK(r.abs_err < 1e-10);
  CHECK(r.pass);

  s = {};
  s.id = "blk3_12";
  s.p = 3;
  s.params = {{"alpha", -1.3}, {"eps", 1}};
  s.tail = {RealBlock{1, 0.0, 1}};
  r = run_oracle(s);
  CHECK(r.closed == doctest::Approx(-6.0 * W(0, 1)));
  CHECK(r.abs_err < 1e-10);

  s = {};
  s.id = "cx_detpow";
  s.p = 1;
  s.variant = 0;
  s.params = {{"k", 1}, {"alpha", 1.0}, {"beta", 2.0}, {"i", 3}};
  s.tail = {RealBlock{1, 0.5, 1}, RealBlock{1, 0.1, -1}};
  s.omega = MatrixXd::Zero(4, 4);
  s.omega(0, 2) = 1.0;
  s.omega(1, 3) = 1.0;
  s.omega -= MatrixXd(s.omega.transpose());
  r = run_oracle(s);
  CHECK(r.closed == doctest::Approx(5.0));
  CHECK(r.brute == doctest::Approx(5.0));
  CHECK(r.tuple == "(e1,e2,e1,e2,e1,e3)");
}

TEST_CASE("catalog: thirty unique families") {
  const auto& cat = list_oracles();
  CHECK(cat.size() == 30);
  std::set<std::string> ids;
  for (const auto& o : cat) ids.insert(o.id);
  CHECK(ids.size() == cat.size());
  CHECK_THROWS_AS(oracle_info("no_such_lemma"), Error);
}

TEST_CASE("every family agrees with its closed form over 100 seeded draws") {
  std::vector<std::string> ids;
  for (const auto& o : list_oracles()) ids.push_back(o.id);
  const auto reports = run_catalog(ids, 100, 4, 20240601);
  REQUIRE(reports.size() == ids.size());
  for (const auto& r : reports) {
    CAPTURE(r.id);
    CHECK(r.draws == 100);
    CHECK(r.failures == 0);
    CHECK(r.max_scaled_err <= kOracleRelTol);
    for (const auto& f : r.failed) {
      CAPTURE(f.tuple);
      CAPTURE(f.p);
      CAPTURE(f.brute);
      CAPTURE(f.closed);
      CHECK(f.pass);
    }
    const auto& info = oracle_info(r.id);
    if (info.p_max >= 4 && info.p_min <= 4) CHECK(r.p_hi == 4);
  }
}

TEST_CASE("draws are deterministic and inside the hypothesis region") {
  for (const auto& o : list_oracles()) {
    for (int d = 0; d < 5; ++d) {
      std::mt19937_64 a(77 + d), b(77 + d);
      const int p = o.p_min;
      const OracleResult ra = run_oracle(draw_oracle(o.id, p, a));
      const OracleResult rb = run_oracle(draw_oracle(o.id, p, b));
      CHECK(ra.brute == rb.brute);
      CHECK(ra.tuple == rb.tuple);
    }
  }
  const FamilyReport x = run_family("cx_b45", 20, 4, 5), y = run_family("cx_b45", 20, 4, 5);
  CHECK(x.max_abs_err == y.max_abs_err);
}

TEST_CASE("hypothesis violations are named") {
  OracleSpec s;
  s.id = "lemma34";
  s.p = 1;
  s.params = {{"k", 3}, {"alpha", 1.0}, {"eps", 1}, {"i", 1}};
  s.tail = {RealBlock{1, 0.0, 1}};
  CHECK(code_of(s) == ErrorCode::Hypothesis);

  s = {};
  s.id = "blk3_122i";
  s.p = 1;
  s.params = {{"alpha", 0.5}, {"eps", 1}, {"i", 2}};
  s.tail = {RealBlock{1, 0.0, 1}};
  try {
    run_oracle(s);
    FAIL("expected hypothesis error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Hypothesis);
    CHECK(std::string(e.what()).find("alpha = 0") != std::string::npos);
  }

  s = {};
  s.id = "cx_b4";
  s.p = 2;
  s.params = {{"k", 2}, {"alpha", 0.4}, {"beta", 1.1}, {"i0", 1}};
  s.tail = {RealBlock{1, 0.0, 1}, RealBlock{1, 0.0, 1}};  // default omega has omega(e3,e4) != 0
  CHECK(code_of(s) == ErrorCode::Hypothesis);

  s = {};
  s.id = "two_blk2";
  s.p = 2;
  s.variant = 1;
  s.params = {{"alpha", 0.4}, {"beta", 1.1}, {"eps", 1}, {"eta", -1}, {"i", 1}};
  CHECK(code_of(s) == ErrorCode::Hypothesis);

  s.p = 3;
  s.params["eta"] = 2;
  CHECK(code_of(s) == ErrorCode::Hypothesis);

  s = {};
  s.id = "cx_detpow";
  s.p = 5;  // order 10
  s.params = {{"k", 1}, {"alpha", 1.0}, {"beta", 2.0}, {"i", 3}};
  s.tail = {RealBlock{1, 0.5, 1}, RealBlock{1, 0.1, -1}};
  CHECK(code_of(s) == ErrorCode::OrderExceeded);

  s = {};
  s.id = "blk3_12ij";
  s.p = 1;  // needs p >= 2
  s.params = {{"alpha", 0.5}, {"eps", 1}, {"i", 4}, {"j", 4}};
  s.tail = {RealBlock{1, 0.0, 1}};
  CHECK(code_of(s) == ErrorCode::Hypothesis);

  s.id = "unknown";
  CHECK(code_of(s) == ErrorCode::InvalidArgument);
}

TEST_CASE("brute values are exactly invariant under permuting trailing 1x1 blocks") {
  // Integer data keeps every intermediate exact, so any difference would be structural.
  OracleSpec s;
  s.id = "blk3_12ij";
  s.p = 3;
  s.params = {{"alpha", 2.0}, {"eps", -1}, {"i", 4}, {"j", 4}};
  s.tail = {RealBlock{1, 1.0, 1}, RealBlock{1, -2.0, -1}, RealBlock{1, 3.0, 1}};
  MatrixXd W(6, 6);
  W << 0, 1, -2, 3, 1, -1,  //
      -1, 0, 2, 1, -3, 2,   //
      2, -2, 0, 1, 1, -1,   //
      -3, -1, -1, 0, 2, 1,  //
      -1, 3, -1, -2, 0, 1,  //
      1, -2, 1, -1, -1, 0;
  s.omega = W;
  const std::vector<int> perm{0, 1, 2, 5, 3, 4};  // new position of each old index (tail rotated)
  for (int i = 4; i <= 6; ++i) {
    s.params["i"] = i;
    s.params["j"] = i;
    const double before = run_oracle(s).brute;

    OracleSpec t = s;
    t.tail = {s.tail[1], s.tail[2], s.tail[0]};
    MatrixXd Wp(6, 6);
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 6; ++b) Wp(perm[static_cast<std::size_t>(a)], perm[static_cast<std::size_t>(b)]) = W(a, b);
    t.omega = Wp;
    t.params["i"] = perm[static_cast<std::size_t>(i - 1)] + 1;
    t.params["j"] = perm[static_cast<std::size_t>(i - 1)] + 1;
    CHECK(run_oracle(t).brute == before);
  }
}

TEST_CASE("theorem witnesses exist for every inadmissible shape") {
  for (const auto& [name, shape] : inadmissible_shapes()) {
    CAPTURE(name);
    const WitnessReport w = theorem_witness(shape, 4, 3, 11);
    CHECK(w.missing == 0);
    CHECK(w.hits.size() == 12);
    for (const auto& h : w.hits) {
      CHECK(h.found);
      CHECK(std::abs(h.value) > kWitnessThreshold);
      CHECK(h.tuple.size() == static_cast<std::size_t>(2 * h.p + 2));
    }
  }
  // S = 0: nothing to find, and the search says so
  const std::vector<model::BlockSpec> flat{RealBlock{1, 0, 1}, RealBlock{1, 0, 1}, RealBlock{1, 0, -1},
                                           RealBlock{1, 0, 1}};
  const WitnessReport none = theorem_witness(flat, 2, 1, 3);
  CHECK(none.missing == 2);
}

TEST_CASE("rank theorem on models") {
  const std::vector<model::BlockSpec> zero{RealBlock{1, 0, 1}, RealBlock{1, 0, -1}, RealBlock{1, 0, 1},
                                           RealBlock{1, 0, 1}};
  const model::GaussModel m0 = model::assemble(zero);
  RankCheck rc = check_rank_theorem(m0, model::default_omega(4), 2, 1e-8);
  CHECK(rc.verdict == Verdict::Pass);
  CHECK(rc.rank_s == 0);

  const std::vector<model::BlockSpec> ident{RealBlock{1, 1, 1}, RealBlock{1, 1, 1}, RealBlock{1, 1, 1},
                                            RealBlock{1, 1, 1}};
  rc = check_rank_theorem(model::assemble(ident), model::default_omega(4), 1, 1e-8);
  CHECK(rc.verdict == Verdict::Vacuous);
  CHECK(rc.r_max > 0.1);

  CHECK_THROWS_AS(check_rank_theorem(m0, MatrixXd::Zero(4, 4), 1, 1e-8), Error);
}

TEST_CASE("rank theorem on the shipped scenarios") {
  const auto ex = geometry::build_scenario(test_scenarios::paper_example(2));
  RankCheck rc = check_rank_theorem(ex, ex.sample_points[0], 3, 1e-8);
  CHECK(rc.verdict == Verdict::Pass);
  CHECK(rc.r_max < 1e-8);
  CHECK(rc.rank_s == 1);
  CHECK(rc.admissible);

  const auto par = geometry::build_scenario(test_scenarios::paraboloid());
  rc = check_rank_theorem(par, par.sample_points[1], 1, 1e-8);
  CHECK(rc.verdict == Verdict::Pass);
  CHECK(rc.rank_s == 0);

  const auto sph = geometry::build_scenario(test_scenarios::centroaffine_sphere());
  for (int p = 1; p <= 3; ++p) {
    rc = check_rank_theorem(sph, sph.sample_points[0], p, 1e-8);
    CHECK(rc.verdict == Verdict::Vacuous);
    CHECK(rc.rank_s == 4);
  }
}

TEST_CASE("draws exercise nonzero closed forms") {
  // Families whose only formula is identically zero.
  const std::set<std::string> zero_only{"lematD", "cx_b4"};
  for (const auto& o : list_oracles()) {
    if (zero_only.count(o.id)) continue;
    CAPTURE(o.id);
    int nonzero = 0;
    for (int d = 0; d < 60; ++d) {
      std::mt19937_64 g(1000 + d);
      const int p = o.p_min + d % (std::min(o.p_max, 4) - o.p_min + 1);
      if (std::abs(run_oracle(draw_oracle(o.id, p, g)).closed) > 1e-6) ++nonzero;
    }
    CHECK(nonzero >= 12);
  }
}
