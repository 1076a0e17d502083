// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <tuple>

#include "CLI11.hpp"
#include "affsym/canonical_pair.hpp"
#include "affsym/cli.hpp"
#include "affsym/error.hpp"
#include "affsym/geometry.hpp"
#include "affsym/tensor_ops.hpp"
#include "affsym/verify.hpp"

using namespace affsym;
using Eigen::MatrixXd;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [violated: " << what << "]";
    }
  }
};

std::string g_dir = AFFSYM_SCENARIO_DIR;

cli::ScenarioFile scenario(const std::string& name) { return cli::load_scenario(g_dir + "/" + name + ".json"); }

std::vector<std::string> shipped_scenarios() {
  std::vector<std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(g_dir))
    if (e.is_regular_file() && e.path().extension() == ".json") out.push_back(e.path().stem().string());
  std::sort(out.begin(), out.end());
  return out;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

// Example reproduction: S, tau, h closed forms; R.Omega, R^2.Omega values; R^3.Omega = 0.
void criterion1(Outcome& o) {
  const cli::ScenarioFile f = scenario("paper_example_n2");
  const geometry::Scenario& s = f.scenario;
  const std::vector<std::vector<double>> expected_points{
      {1, 2, std::numbers::pi / 4, std::numbers::pi / 6},
      {-1, 1, std::numbers::pi / 3, std::numbers::pi / 4},
      {2, 0.5, std::numbers::pi / 6, std::numbers::pi / 3}};
  o.require(s.sample_points.size() == 3, "three sample points");
  double s_other = 0, s_entry = 0, tau = 0, h_rel = 0, r1 = 0, r2 = 0, r3 = 0;
  for (std::size_t k = 0; k < std::min<std::size_t>(3, s.sample_points.size()); ++k) {
    const auto& p = s.sample_points[k];
    for (std::size_t c = 0; c < 4; ++c)
      o.require(std::abs(p[c] - expected_points[k][c]) < 1e-15, "sample point coordinates");
    const double x = p[0], y = p[1], z0 = p[2], z1 = p[3];
    const geometry::InducedStructure st = geometry::induced_structure(s, p);
    MatrixXd Sx = st.S;
    s_entry = std::max(s_entry, std::abs(Sx(1, 0) - 1.0));
    Sx(1, 0) = 0.0;
    s_other = std::max(s_other, Sx.cwiseAbs().maxCoeff());
    tau = std::max(tau, st.tau.cwiseAbs().maxCoeff());
    MatrixXd h = MatrixXd::Zero(4, 4);
    h(0, 1) = h(1, 0) = 1.0;
    h(2, 2) = x * y;
    h(3, 3) = y * std::sin(z0) / std::cos(z1);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        h_rel = std::max(h_rel, std::abs(st.h(i, j) - h(i, j)) / std::max(1.0, std::abs(h(i, j))));

    const tensor_ops::GeometricCurvature C(geometry::curvature(st));
    const MatrixXd w = geometry::omega_at(s, p);
    const tensor_ops::Tensor T = tensor_ops::Tensor::from_matrix(w);
    const std::vector<int> a1{0, 2, 0, 2}, a2{0, 2, 0, 2, 0, 2};
    r1 = std::max(r1, std::abs(tensor_ops::r_power_action_basis(C, T, 1, a1) + x * y * w(0, 1)));
    r2 = std::max(r2, std::abs(tensor_ops::r_power_action_basis(C, T, 2, a2) - x * y * w(1, 2)));
    r3 = std::max(r3, tensor_ops::r_power_tensor(C, T, 3).max_abs());
  }
  o.require(s_entry < 1e-10, "S(d_x) = d_y");
  o.require(s_other < 1e-10, "other S entries < 1e-10");
  o.require(tau < 1e-10, "tau < 1e-10");
  o.require(h_rel <= 1e-9, "h closed forms within 1e-9 relative");
  o.require(r1 < 1e-8, "R.Omega = -xy w12 within 1e-8");
  o.require(r2 < 1e-8, "R^2.Omega = xy w23 within 1e-8");
  o.require(r3 < 1e-8, "max |R^3.Omega| < 1e-8");
  o.detail << "S other " << sci(s_other) << ", tau " << sci(tau) << ", h rel " << sci(h_rel) << ", R err "
           << sci(r1) << ", R^2 err " << sci(r2) << ", max|R^3 Omega| " << sci(r3);
}

void criterion2(Outcome& o) {
  double worst = 0;
  int points = 0;
  const auto names = shipped_scenarios();
  for (const auto& name : names) {
    const cli::ScenarioFile f = scenario(name);
    for (const auto& p : f.scenario.sample_points) {
      const geometry::InducedStructure st = geometry::induced_structure(f.scenario, p);
      const geometry::Residuals r = geometry::fundamental_residuals(st, geometry::curvature(st));
      const double m = std::max({r.gauss, r.codazzi_h, r.codazzi_s, r.ricci});
      o.require(m < 1e-8, name + " residual < 1e-8");
      worst = std::max(worst, m);
      ++points;
    }
  }
  o.require(names.size() >= 4, "four shipped scenarios");
  o.detail << names.size() << " scenarios, " << points << " points, max residual " << sci(worst);
}

void criterion3(Outcome& o) {
  std::vector<std::string> ids;
  for (const auto& info : verify::list_oracles()) ids.push_back(info.id);
  const auto reps = verify::run_catalog(ids, 100, 4, 20240601);
  int draws = 0, failures = 0, reach4 = 0, can4 = 0;
  double worst = 0;
  for (const auto& r : reps) {
    draws += r.draws;
    failures += r.failures;
    worst = std::max(worst, r.max_scaled_err);
    const auto& info = verify::oracle_info(r.id);
    o.require(r.draws >= 100, r.id + " has 100 draws");
    if (info.p_max >= 4) {
      ++can4;
      if (r.p_hi == 4) ++reach4;
    }
    for (const auto& f : r.failed)
      o.detail << " [" << r.id << " p=" << f.p << " " << f.tuple << " brute=" << f.brute << " closed=" << f.closed
               << "]";
  }
  o.require(ids.size() >= 30, ">= 30 families");
  o.require(failures == 0, "every draw within 1e-9 max(1,|closed|)");
  o.require(reach4 == can4, "p = 4 reached where the formula allows");
  o.detail << ids.size() << " families, " << draws << " draws, " << failures << " failures, max scaled err "
           << sci(worst) << ", p=4 reached by " << reach4 << "/" << can4;
}

void criterion4(Outcome& o) {
  using Key = std::tuple<bool, int, long, long, int>;
  auto multiset = [](const std::vector<model::BlockSpec>& blocks) {
    std::map<Key, int> m;
    for (const auto& b : blocks) {
      if (const auto* r = std::get_if<model::RealBlock>(&b)) {
        ++m[{false, r->size, std::lround(r->lambda * 1e4), 0, r->sign}];
      } else {
        const auto& c = std::get<model::ComplexBlock>(b);
        ++m[{true, c.half_size, std::lround(c.alpha * 1e4), std::lround(std::abs(c.beta) * 1e4), 0}];
      }
    }
    return m;
  };
  int mismatches = 0, complex_cases = 0, errors = 0;
  double r1 = 0, r2 = 0, cond = 0, sep = 1e300;
  std::set<int> dims;
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const canonical_pair::RoundTripCase rc = canonical_pair::make_round_trip_case(seed);
    dims.insert(static_cast<int>(rc.A.rows()));
    cond = std::max(cond, rc.conjugator_cond);
    sep = std::min(sep, rc.min_separation);
    if (std::any_of(rc.blocks.begin(), rc.blocks.end(), [](const auto& b) { return model::is_complex(b); }))
      ++complex_cases;
    try {
      const canonical_pair::CanonicalPair cp = canonical_pair::decompose(rc.A, rc.H);
      if (multiset(cp.blocks) != multiset(rc.blocks)) ++mismatches;
      r1 = std::max(r1, cp.residual_transform);
      r2 = std::max(r2, cp.residual_form);
    } catch (const Error&) {
      ++errors;
    }
  }
  int sip_bad = 0;
  for (int n = 1; n <= 12; ++n) {
    const canonical_pair::Signature want{(n + 1) / 2, n / 2};
    if (!(canonical_pair::sip_signature(n) == want) || !(canonical_pair::inertia(canonical_pair::sip(n)) == want))
      ++sip_bad;
  }
  o.require(mismatches == 0 && errors == 0, "block and sign multisets recovered");
  o.require(r1 < 1e-6 && r2 < 1e-6, "residuals < 1e-6");
  o.require(cond < 1e3 && sep > 1e-3, "generator within condition/separation bounds");
  o.require(*dims.begin() >= 4 && *dims.rbegin() <= 10, "dims 4..10");
  o.require(complex_cases > 0, "mixed real/complex cases");
  o.require(sip_bad == 0, "sip signature formula n=1..12");
  o.detail << "500 cases (dims " << *dims.begin() << "-" << *dims.rbegin() << ", " << complex_cases
           << " with complex blocks), mismatches " << mismatches << ", errors " << errors << ", residuals "
           << sci(r1) << "/" << sci(r2) << ", max cond " << sci(cond) << ", min sep " << sci(sep)
           << ", sip n=1..12 ok " << 12 - sip_bad << "/12";
}

void criterion5(Outcome& o) {
  int shapes = 0, missing = 0, hits = 0, lemma_hits = 0;
  for (const auto& [name, shape] : verify::inadmissible_shapes()) {
    const verify::WitnessReport w = verify::theorem_witness(shape, 4, 20, 0xACCE97ULL);
    ++shapes;
    missing += w.missing;
    for (const auto& h : w.hits) {
      if (h.found) ++hits;
      if (h.from_lemma) ++lemma_hits;
    }
    o.require(w.missing == 0 && w.hits.size() == 80, "witness for every p <= 4 and draw: " + name);
  }
  o.require(shapes == 7, "seven inadmissible shapes");

  std::map<std::string, std::map<std::string, int>> verdicts;
  for (const std::string name : {"paper_example_n2", "paraboloid", "centroaffine_sphere"}) {
    const cli::ScenarioFile f = scenario(name);
    for (const auto& x : f.scenario.sample_points)
      for (int p = 1; p <= 3; ++p)
        ++verdicts[name][verify::verdict_name(verify::check_rank_theorem(f.scenario, x, p, 1e-8).verdict)];
  }
  const auto& ex = verdicts["paper_example_n2"];
  const auto& par = verdicts["paraboloid"];
  const auto& sph = verdicts["centroaffine_sphere"];
  auto n = [](const std::map<std::string, int>& m, const char* k) {
    const auto it = m.find(k);
    return it == m.end() ? 0 : it->second;
  };
  // R^p omega vanishes on the example only from p = 3 on; smaller p are vacuous there
  o.require(n(ex, "PASS") == 3 && n(ex, "FAIL") == 0, "PASS on paper_example_n2 (p = 3)");
  o.require(n(par, "PASS") == 9, "PASS on paraboloid");
  o.require(n(sph, "VACUOUS") == 6, "VACUOUS on centroaffine_sphere");
  o.detail << shapes << " shapes x 4 powers x 20 draws: " << hits << " witnesses (" << lemma_hits
           << " from named tuples), " << missing << " missing; rank theorem example PASS " << n(ex, "PASS")
           << "/VACUOUS " << n(ex, "VACUOUS") << ", paraboloid PASS " << n(par, "PASS") << ", sphere VACUOUS "
           << n(sph, "VACUOUS") << ", FAIL total "
           << n(ex, "FAIL") + n(par, "FAIL") + n(sph, "FAIL");
}

void criterion6(Outcome& o) {
  double worst = 0;
  int tuples = 0;
  for (const std::string name : {"centroaffine_sphere", "paper_example_n2"}) {
    const cli::ScenarioFile f = scenario(name);
    const geometry::Scenario& s = f.scenario;
    const tensor_ops::CovariantField W = tensor_ops::CovariantField::omega(s);
    std::mt19937_64 rng(verify::family_seed(6, name));
    std::uniform_int_distribution<int> idx(0, s.dim - 1);
    for (int t = 0; t < 50; ++t) {
      const auto& x = s.sample_points[static_cast<std::size_t>(t) % s.sample_points.size()];
      const tensor_ops::GeometricCurvature C(geometry::curvature(geometry::induced_structure(s, x)));
      const int pairs[2] = {idx(rng), idx(rng)};
      const int ys[2] = {idx(rng), idx(rng)};
      const auto r = tensor_ops::alternating_sum_identity(W, s, C, 1, x, pairs, ys);
      const double d = std::abs(r.lhs - r.rhs);
      o.require(d < 1e-7, name + " |lhs - rhs| < 1e-7");
      worst = std::max(worst, d);
      ++tuples;
    }
  }
  o.detail << tuples << " tuples, max |lhs - rhs| " << sci(worst);
}

void criterion7(Outcome& o) {
  cli::Options opt;
  opt.seed = 7;
  opt.trials = 25;
  std::vector<std::pair<std::string, std::function<cli::RunReport()>>> runs;
  for (const auto& name : shipped_scenarios()) {
    const cli::ScenarioFile f = scenario(name);
    runs.push_back({"check-geometry " + name, [f, opt] { return cli::cmd_check_geometry(f, opt); }});
  }
  runs.push_back({"oracles", [opt] { return cli::cmd_oracles(opt); }});
  const canonical_pair::RoundTripCase rc = canonical_pair::make_round_trip_case(7);
  runs.push_back({"decompose", [rc, opt] { return cli::cmd_decompose(cli::MatrixPair{int(rc.A.rows()), rc.A, rc.H}, opt); }});
  int identical = 0;
  for (const auto& [label, run] : runs) {
    const std::string a = cli::dump_without_timing(run());
    const std::string b = cli::dump_without_timing(run());
    if (a == b) ++identical;
    o.require(a == b, label + " byte-identical");
  }
  opt.seed = 8;
  const bool seed_matters =
      cli::dump_without_timing(cli::cmd_oracles(opt)) != cli::dump_without_timing(runs[runs.size() - 2].second());
  o.require(seed_matters, "a different seed changes the oracle report");
  o.detail << identical << "/" << runs.size() << " reports byte-identical across repeated runs";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<int> only;
  app.add_option("--scenarios", g_dir, "scenario directory")->capture_default_str();
  app.add_option("criteria", only, "criteria to run (default all)")->check(CLI::Range(1, 7));
  CLI11_PARSE(app, argc, argv);

  struct Criterion {
    int id;
    const char* title;
    double budget_s;
    void (*run)(Outcome&);
  };
  const Criterion all[] = {
      {1, "example reproduction", 30, criterion1},
      {2, "fundamental-equation residuals", 60, criterion2},
      {3, "oracle catalog", 300, criterion3},
      {4, "canonical-pair round trip", 0, criterion4},
      {5, "theorem witnesses and rank theorem", 0, criterion5},
      {6, "alternating-sum identity", 0, criterion6},
      {7, "determinism", 0, criterion7},
  };
  bool ok = true;
  for (const auto& c : all) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [error: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_s > 0 && secs >= c.budget_s) {
      o.pass = false;
      o.detail << " [over the " << c.budget_s << " s budget]";
    }
    ok = ok && o.pass;
    char head[96];
    std::snprintf(head, sizeof head, "criterion %d: %s  (%.2f s)  %s: ", c.id, o.pass ? "PASS" : "FAIL", secs, c.title);
    std::cout << head << o.detail.str() << std::endl;
  }
  return ok ? 0 : 1;
}
