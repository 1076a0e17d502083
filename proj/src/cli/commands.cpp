#include <fnmatch.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <variant>

#include "affsym/canonical_pair.hpp"
#include "affsym/cli.hpp"
#include "affsym/error.hpp"
#include "affsym/tensor_ops.hpp"
#include "affsym/verify.hpp"

#ifndef AFFSYM_VERSION
#define AFFSYM_VERSION "0.0.0"
#endif

namespace affsym::cli {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

RunReport new_report(const std::string& command, const Options& o) {
  RunReport r;
  r.tool_version = AFFSYM_VERSION;
  r.command = command;
  r.master_seed = o.seed;
  return r;
}

CheckRecord record(std::string name, Status st, double value, json params, json data = json::object(),
                   std::string detail = {}) {
  CheckRecord c;
  c.name = std::move(name);
  c.status = st;
  c.value = value;
  c.params = std::move(params);
  c.data = std::move(data);
  c.detail = std::move(detail);
  return c;
}

Status below(double v, double tol) { return std::isfinite(v) && v < tol ? Status::Pass : Status::Fail; }

// Default tolerance of the alternating-sum identity check; jets make it exact up
// to rounding, but the sum has 2^(2k) terms of size O(|R|).
constexpr double kIdentityTol = 1e-7;
constexpr double kResidualTol = 1e-6;  // decomposition residuals
constexpr int kIdentityTuples = 50;

struct GeometryPlan {
  double tol = 1e-8;
  const ScenarioFile* file = nullptr;
  const Options* opts = nullptr;

  const CheckSpec* spec(const std::string& name) const {
    for (const auto& c : file->checks)
      if (c.name == name) return &c;
    return nullptr;
  }
  double tol_for(const std::string& name, double dflt) const {
    const CheckSpec* c = spec(name);
    return c && c->tol ? *c->tol : dflt;
  }
  int p_for(const std::string& name) const {
    const CheckSpec* c = spec(name);
    return c && c->p_max ? *c->p_max : opts->p_max;
  }
};

std::vector<CheckRecord> check_point(const GeometryPlan& plan, std::size_t index) {
  const geometry::Scenario& s = plan.file->scenario;
  const std::vector<double>& x = s.sample_points[index];
  const json at{{"point", index}};
  std::vector<CheckRecord> out;
  auto timed = [&](auto&& fn) {
    const auto t0 = Clock::now();
    const std::size_t before = out.size();
    fn();
    const double ms = ms_since(t0);
    for (std::size_t i = before; i < out.size(); ++i) out[i].wall_time_ms = ms / static_cast<double>(out.size() - before);
  };
  const double tol = plan.opts->tol;

  try {
    const auto t0 = Clock::now();
    const geometry::InducedStructure st = geometry::induced_structure(s, x);
    const geometry::CurvatureTensor R = geometry::curvature(st);
    const double setup_ms = ms_since(t0);

    timed([&] {
      const double v = geometry::frame_consistency(s, st);
      out.push_back(record("frame_consistency", below(v, plan.tol_for("frame_consistency", tol)), v, at));
    });
    timed([&] {
      const geometry::Residuals r = geometry::fundamental_residuals(st, R);
      const std::pair<const char*, double> items[] = {{"residual_gauss", r.gauss},
                                                      {"residual_codazzi_h", r.codazzi_h},
                                                      {"residual_codazzi_s", r.codazzi_s},
                                                      {"residual_ricci", r.ricci}};
      for (const auto& [name, v] : items) out.push_back(record(name, below(v, plan.tol_for(name, tol)), v, at));
    });
    for (auto& c : out) c.wall_time_ms += setup_ms / static_cast<double>(out.size());
    timed([&] {
      const double v = geometry::gauss_model_deviation(st, R);
      out.push_back(record("gauss_model", below(v, plan.tol_for("gauss_model", tol)), v, at));
    });
    timed([&] {
      double v = 0.0;
      for (int X = 0; X < s.dim; ++X)
        for (int Y = X + 1; Y < s.dim; ++Y) {
          const tensor_ops::VectorPair pr = tensor_ops::nabla_S_codazzi(s, x, X, Y);
          v = std::max(v, (pr.lhs - pr.rhs).cwiseAbs().maxCoeff());
        }
      out.push_back(record("codazzi_s_operator", below(v, plan.tol_for("codazzi_s_operator", tol)), v, at));
    });

    const tensor_ops::GeometricCurvature C(R);
    const tensor_ops::CovariantField W = tensor_ops::CovariantField::omega(s);
    timed([&] {
      std::mt19937_64 rng(verify::splitmix64(plan.opts->seed ^ verify::fnv1a("alternating_identity") ^
                                              (0x9e37ULL * (index + 1))));
      std::uniform_int_distribution<int> idx(0, s.dim - 1);
      double v = 0.0;
      for (int t = 0; t < kIdentityTuples; ++t) {
        const int pairs[2] = {idx(rng), idx(rng)};
        const int ys[2] = {idx(rng), idx(rng)};
        const tensor_ops::ScalarPair r = tensor_ops::alternating_sum_identity(W, s, C, 1, x, pairs, ys);
        v = std::max(v, std::abs(r.lhs - r.rhs));
      }
      json p = at;
      p["k"] = 1;
      p["tuples"] = kIdentityTuples;
      out.push_back(record("alternating_identity", below(v, plan.tol_for("alternating_identity", kIdentityTol)), v, p));
    });

    const int p_rank = plan.p_for("rank_theorem");
    for (int p = 1; p <= p_rank; ++p) {
      timed([&] {
        const verify::RankCheck rc = verify::check_rank_theorem(s, x, p, plan.tol_for("rank_theorem", tol));
        const Status st2 = rc.verdict == verify::Verdict::Pass   ? Status::Pass
                           : rc.verdict == verify::Verdict::Fail ? Status::Fail
                                                                 : Status::Vacuous;
        json pp = at;
        pp["p"] = p;
        json d{{"r_max", num(rc.r_max)},
               {"nabla_max", rc.nabla_max ? num(*rc.nabla_max) : json(nullptr)},
               {"rank_S", rc.rank_s},
               {"admissible", rc.admissible},
               {"shape", rc.shape}};
        out.push_back(record("rank_theorem", st2, rc.r_max, pp, d, rc.note));
      });
    }
    if (const CheckSpec* v = plan.spec("r_power_vanishes")) {
      const int p = v->p_max.value_or(plan.opts->p_max);
      timed([&] {
        const double r = tensor_ops::r_power_tensor(C, tensor_ops::Tensor::from_matrix(geometry::omega_at(s, x)), p)
                             .max_abs();
        json pp = at;
        pp["p"] = p;
        out.push_back(record("r_power_vanishes", below(r, v->tol.value_or(tol)), r, pp));
      });
    }
  } catch (const Error& e) {
    out.push_back(record("sample_point", Status::Fail, std::numeric_limits<double>::quiet_NaN(), at, json::object(),
                         e.what()));
  }
  return out;
}

std::string sign_str(int s) { return s > 0 ? "+1" : "-1"; }

}  // namespace

const char* status_name(Status s) {
  switch (s) {
    case Status::Pass:
      return "PASS";
    case Status::Fail:
      return "FAIL";
    case Status::Vacuous:
      return "VACUOUS";
    case Status::Warn:
      return "WARN";
  }
  return "?";
}

void RunReport::canonicalize() {
  std::stable_sort(checks.begin(), checks.end(), [](const CheckRecord& a, const CheckRecord& b) {
    if (a.name != b.name) return a.name < b.name;
    return a.params < b.params;
  });
}

int RunReport::count(Status s) const {
  return static_cast<int>(std::count_if(checks.begin(), checks.end(), [s](const CheckRecord& c) { return c.status == s; }));
}

int RunReport::exit_code(bool strict) const {
  if (count(Status::Fail) > 0) return 1;
  if (strict && count(Status::Warn) > 0) return 1;
  return 0;
}

json to_json(const RunReport& r) {
  json j;
  j["tool"] = "affsym";
  j["tool_version"] = r.tool_version;
  j["command"] = r.command;
  j["scenario"] = r.scenario.empty() ? json(nullptr) : json(r.scenario);
  j["scenario_digest"] = r.scenario_digest.empty() ? json(nullptr) : json(r.scenario_digest);
  j["master_seed"] = r.master_seed;
  j["options"] = r.options;
  json summary = json::object();
  for (Status s : {Status::Pass, Status::Fail, Status::Vacuous, Status::Warn}) summary[status_name(s)] = r.count(s);
  j["summary"] = summary;
  json checks = json::array();
  for (const auto& c : r.checks) {
    json e;
    e["name"] = c.name;
    e["status"] = status_name(c.status);
    e["value"] = num(c.value);
    e["params"] = c.params;
    if (!c.data.empty()) e["data"] = c.data;
    if (!c.detail.empty()) e["detail"] = c.detail;
    e["wall_time_ms"] = c.wall_time_ms;
    checks.push_back(std::move(e));
  }
  j["checks"] = std::move(checks);
  j["wall_time_ms"] = r.wall_time_ms;
  return j;
}

std::string dump(const RunReport& r, int indent) { return to_json(r).dump(indent) + "\n"; }

std::string dump_without_timing(const RunReport& r) {
  json j = to_json(r);
  j.erase("wall_time_ms");
  for (auto& c : j["checks"]) c.erase("wall_time_ms");
  return j.dump(2) + "\n";
}

RunReport cmd_check_geometry(const ScenarioFile& f, const Options& o) {
  const auto t0 = Clock::now();
  GeometryPlan plan;
  plan.file = &f;
  plan.opts = &o;
  for (const char* name : {"rank_theorem", "r_power_vanishes"}) {
    const int p = name == std::string("r_power_vanishes") && plan.spec(name) ? plan.spec(name)->p_max.value_or(o.p_max)
                                                                             : plan.p_for(name);
    if (p < 1 || p > tensor_ops::kGeometricPowerCap)
      throw Error(ErrorCode::InvalidArgument, std::string(name) + ": p_max must be in 1.." +
                                                  std::to_string(tensor_ops::kGeometricPowerCap) +
                                                  " for geometric checks (got " + std::to_string(p) + ")");
  }
  RunReport r = new_report("check-geometry", o);
  r.scenario = f.source.name;
  r.scenario_digest = f.digest;
  r.options = {{"tol", o.tol}, {"p_max", o.p_max}, {"strict", o.strict}};

  std::vector<std::future<std::vector<CheckRecord>>> jobs;
  for (std::size_t i = 0; i < f.scenario.sample_points.size(); ++i)
    jobs.push_back(std::async(std::launch::async, [&plan, i] { return check_point(plan, i); }));
  for (auto& j : jobs)
    for (auto& c : j.get()) r.checks.push_back(std::move(c));
  r.canonicalize();
  r.wall_time_ms = ms_since(t0);
  return r;
}

RunReport cmd_oracles(const Options& o) {
  const auto t0 = Clock::now();
  if (o.trials < 1) throw Error(ErrorCode::InvalidArgument, "trials must be >= 1");
  if (o.p_max < 1) throw Error(ErrorCode::InvalidArgument, "p_max must be >= 1");
  std::vector<std::string> ids;
  for (const auto& info : verify::list_oracles())
    if (fnmatch(o.filter.c_str(), info.id.c_str(), 0) == 0) ids.push_back(info.id);
  if (ids.empty()) throw Error(ErrorCode::InvalidArgument, "filter '" + o.filter + "' matches no oracle id");

  RunReport r = new_report("oracles", o);
  r.options = {{"filter", o.filter}, {"p_max", o.p_max}, {"trials", o.trials}, {"strict", o.strict},
               {"rel_tol", verify::kOracleRelTol}};
  const auto t1 = Clock::now();
  const std::vector<verify::FamilyReport> reps = verify::run_catalog(ids, o.trials, o.p_max, o.seed);
  const double per_family = ms_since(t1) / static_cast<double>(reps.size());
  for (const auto& fr : reps) {
    for (const auto& ps : fr.by_p) {
      json d{{"draws", ps.draws}, {"failures", ps.failures}, {"max_scaled_err", num(ps.max_scaled_err)}};
      json failed = json::array();
      for (const auto& bad : fr.failed)
        if (bad.p == ps.p)
          failed.push_back(json{{"variant", bad.variant},
                                {"tuple", bad.tuple},
                                {"brute", num(bad.brute)},
                                {"closed", num(bad.closed)},
                                {"params", bad.params}});
      if (!failed.empty()) d["failed"] = std::move(failed);
      CheckRecord c =
          record(fr.id, ps.failures == 0 ? Status::Pass : Status::Fail, ps.max_abs_err, json{{"p", ps.p}}, d);
      c.wall_time_ms = per_family / static_cast<double>(fr.by_p.size());
      r.checks.push_back(std::move(c));
    }
  }
  r.canonicalize();
  r.wall_time_ms = ms_since(t0);
  return r;
}

RunReport cmd_list_oracles() {
  RunReport r = new_report("list-oracles", Options{});
  for (const auto& info : verify::list_oracles())
    r.checks.push_back(record(info.id, Status::Pass, 0.0,
                              json::object(),
                              json{{"p_min", info.p_min}, {"p_max", info.p_max}, {"variants", info.variants}},
                              info.description));
  r.canonicalize();
  return r;
}

RunReport cmd_decompose(const MatrixPair& m, const Options& o) {
  const auto t0 = Clock::now();
  RunReport r = new_report("decompose", o);
  r.options = {{"tol", o.tol}, {"dim", m.dim}, {"strict", o.strict}};
  canonical_pair::DecomposeOptions dopt;
  dopt.tol = o.tol;
  const canonical_pair::CanonicalPair cp = canonical_pair::decompose(m.A, m.H, dopt);
  const canonical_pair::ShapeSummary sh = canonical_pair::classify(cp);
  const double scale = std::max(1.0, cp.scale);

  r.checks.push_back(record("residual_transform", below(cp.residual_transform, kResidualTol * scale),
                            cp.residual_transform, json::object()));
  r.checks.push_back(record("residual_form", below(cp.residual_form, kResidualTol), cp.residual_form, json::object()));

  // Sign multiset per (kind, eigenvalue, size) class; per-block sign order is not canonical.
  std::map<std::string, std::pair<int, int>> classes;
  std::map<std::string, json> class_params;
  for (std::size_t i = 0; i < cp.blocks.size(); ++i) {
    const auto& b = cp.blocks[i];
    json p;
    double value = 0.0;
    if (const auto* rb = std::get_if<model::RealBlock>(&b)) {
      p["kind"] = "real";
      p["size"] = rb->size;
      p["lambda"] = rb->lambda;
      p["sign"] = rb->sign;
      value = rb->lambda;
      std::ostringstream key;
      key.precision(9);
      key << "real:" << rb->size << ":" << rb->lambda;
      auto& cnt = classes[key.str()];
      (rb->sign > 0 ? cnt.first : cnt.second) += 1;
      class_params[key.str()] = json{{"kind", "real"}, {"size", rb->size}, {"lambda", rb->lambda}};
    } else {
      const auto& cb = std::get<model::ComplexBlock>(b);
      p["kind"] = "complex";
      p["size"] = 2 * cb.half_size;
      p["alpha"] = cb.alpha;
      p["beta"] = cb.beta;
      value = cb.alpha;
    }
    r.checks.push_back(record("block", Status::Pass, value, json{{"index", i}}, p, model::describe(b)));
  }
  for (const auto& [key, cnt] : classes) {
    r.checks.push_back(record("sign_class", Status::Pass, cnt.first - cnt.second, class_params[key],
                              json{{"signs", json{{sign_str(1), cnt.first}, {sign_str(-1), cnt.second}}}}));
  }
  r.checks.push_back(record("rank", Status::Pass, sh.rank, json::object()));
  r.checks.push_back(record("classify", Status::Pass, sh.rank, json::object(),
                            json{{"raw_admissible", sh.raw_admissible},
                                 {"final_form", sh.final_form},
                                 {"max_real_size", sh.max_real_size},
                                 {"has_complex", sh.has_complex},
                                 {"s_zero", sh.s_zero}}));
  for (std::size_t i = 0; i < cp.warnings.size(); ++i)
    r.checks.push_back(record("warning", Status::Warn, 0.0, json{{"index", i}}, json::object(), cp.warnings[i]));
  r.canonicalize();
  const double ms = ms_since(t0);
  for (auto& c : r.checks) c.wall_time_ms = ms / static_cast<double>(r.checks.size());
  r.wall_time_ms = ms;
  return r;
}

}  // namespace affsym::cli
