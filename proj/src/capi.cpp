#include <cstring>
#include <new>
#include <string>

#include "affsym/affsym.h"
#include "affsym/cli.hpp"
#include "affsym/error.hpp"

struct affsym_scenario {
  affsym::cli::ScenarioFile file;
};

struct affsym_report {
  affsym::cli::RunReport report;
  std::string json;
  std::string json_untimed;
};

namespace {

thread_local std::string g_last_error;

static_assert(AFFSYM_ERR_INTERNAL == static_cast<int>(affsym::ErrorCode::Internal));
static_assert(AFFSYM_ERR_IO == static_cast<int>(affsym::ErrorCode::Io));

template <class F>
affsym_status guarded(F&& fn) {
  try {
    fn();
    g_last_error.clear();
    return AFFSYM_OK;
  } catch (const affsym::Error& e) {
    g_last_error = e.what();
    return static_cast<affsym_status>(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown exception";
  }
  return AFFSYM_ERR_INTERNAL;
}

affsym_status null_arg(const char* what) {
  g_last_error = std::string(what) + " must not be NULL";
  return AFFSYM_ERR_INVALID_ARGUMENT;
}

affsym::cli::Options convert(const affsym_options* o) {
  affsym_options d;
  affsym_options_default(&d);
  if (!o) o = &d;
  affsym::cli::Options out;
  out.seed = o->seed;
  out.tol = o->tol;
  out.p_max = o->p_max;
  out.trials = o->trials;
  out.filter = o->filter ? o->filter : "*";
  out.strict = o->strict != 0;
  return out;
}

affsym_report* wrap(affsym::cli::RunReport r) {
  auto* h = new affsym_report{std::move(r), {}, {}};
  h->json = affsym::cli::dump(h->report);
  h->json_untimed = affsym::cli::dump_without_timing(h->report);
  return h;
}

}  // namespace

extern "C" {

const char* affsym_version(void) { return AFFSYM_VERSION; }

const char* affsym_status_name(affsym_status s) {
  switch (s) {
    case AFFSYM_OK: return "ok";
    case AFFSYM_ERR_PARSE: return "parse";
    case AFFSYM_ERR_UNKNOWN_IDENTIFIER: return "unknown_identifier";
    case AFFSYM_ERR_DOMAIN: return "domain";
    case AFFSYM_ERR_ORDER_EXCEEDED: return "order_exceeded";
    case AFFSYM_ERR_SINGULAR_FRAME: return "singular_frame";
    case AFFSYM_ERR_NOT_SELF_ADJOINT: return "not_self_adjoint";
    case AFFSYM_ERR_SINGULAR_FORM: return "singular_form";
    case AFFSYM_ERR_HYPOTHESIS: return "hypothesis";
    case AFFSYM_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case AFFSYM_ERR_IO: return "io";
    case AFFSYM_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* affsym_last_error(void) { return g_last_error.c_str(); }

void affsym_options_default(affsym_options* opts) {
  if (!opts) return;
  const affsym::cli::Options d;
  opts->seed = d.seed;
  opts->tol = d.tol;
  opts->p_max = d.p_max;
  opts->trials = d.trials;
  opts->filter = "*";
  opts->strict = 0;
}

affsym_status affsym_scenario_load_file(const char* path, affsym_scenario** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] { *out = new affsym_scenario{affsym::cli::load_scenario(path)}; });
}

affsym_status affsym_scenario_load_json(const char* text, affsym_scenario** out) {
  if (!text) return null_arg("text");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] { *out = new affsym_scenario{affsym::cli::parse_scenario(text)}; });
}

void affsym_scenario_free(affsym_scenario* s) { delete s; }

const char* affsym_scenario_name(const affsym_scenario* s) { return s ? s->file.source.name.c_str() : nullptr; }
int affsym_scenario_dim(const affsym_scenario* s) { return s ? s->file.scenario.dim : -1; }
int affsym_scenario_point_count(const affsym_scenario* s) {
  return s ? static_cast<int>(s->file.scenario.sample_points.size()) : -1;
}
const char* affsym_scenario_digest(const affsym_scenario* s) { return s ? s->file.digest.c_str() : nullptr; }

affsym_status affsym_check_geometry(const affsym_scenario* s, const affsym_options* opts, affsym_report** out) {
  if (!s) return null_arg("scenario");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] { *out = wrap(affsym::cli::cmd_check_geometry(s->file, convert(opts))); });
}

affsym_status affsym_run_oracles(const affsym_options* opts, affsym_report** out) {
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] { *out = wrap(affsym::cli::cmd_oracles(convert(opts))); });
}

affsym_status affsym_list_oracles(affsym_report** out) {
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] { *out = wrap(affsym::cli::cmd_list_oracles()); });
}

affsym_status affsym_decompose_json(const char* text, const affsym_options* opts, affsym_report** out) {
  if (!text) return null_arg("text");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] { *out = wrap(affsym::cli::cmd_decompose(affsym::cli::parse_matrix_pair(text), convert(opts))); });
}

affsym_status affsym_decompose_file(const char* path, const affsym_options* opts, affsym_report** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    *out = wrap(affsym::cli::cmd_decompose(affsym::cli::parse_matrix_pair(affsym::cli::read_file(path)), convert(opts)));
  });
}

const char* affsym_report_json(const affsym_report* r) { return r ? r->json.c_str() : nullptr; }
const char* affsym_report_json_untimed(const affsym_report* r) { return r ? r->json_untimed.c_str() : nullptr; }

int affsym_report_exit_code(const affsym_report* r, int strict) {
  return r ? r->report.exit_code(strict != 0) : affsym::cli::kExitInputError;
}

int affsym_report_count(const affsym_report* r, const char* status) {
  if (!r) return -1;
  if (!status) return static_cast<int>(r->report.checks.size());
  using affsym::cli::Status;
  for (Status s : {Status::Pass, Status::Fail, Status::Vacuous, Status::Warn})
    if (std::strcmp(status, affsym::cli::status_name(s)) == 0) return r->report.count(s);
  return -1;
}

void affsym_report_free(affsym_report* r) { delete r; }

}  // extern "C"
