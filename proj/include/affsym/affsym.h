#ifndef AFFSYM_AFFSYM_H
#define AFFSYM_AFFSYM_H

/* C interface to the affsym checks. All handles are opaque; every function
 * returning affsym_status leaves a message retrievable with affsym_last_error()
 * (thread-local) when the status is not AFFSYM_OK. Strings returned through
 * handles stay valid until the handle is freed. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define AFFSYM_API __declspec(dllexport)
#else
#define AFFSYM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum affsym_status {
  AFFSYM_OK = 0,
  AFFSYM_ERR_PARSE = 1,
  AFFSYM_ERR_UNKNOWN_IDENTIFIER = 2,
  AFFSYM_ERR_DOMAIN = 3,
  AFFSYM_ERR_ORDER_EXCEEDED = 4,
  AFFSYM_ERR_SINGULAR_FRAME = 5,
  AFFSYM_ERR_NOT_SELF_ADJOINT = 6,
  AFFSYM_ERR_SINGULAR_FORM = 7,
  AFFSYM_ERR_HYPOTHESIS = 8,
  AFFSYM_ERR_INVALID_ARGUMENT = 9,
  AFFSYM_ERR_IO = 10,
  AFFSYM_ERR_INTERNAL = 11
} affsym_status;

typedef struct affsym_scenario affsym_scenario;
typedef struct affsym_report affsym_report;

typedef struct affsym_options {
  uint64_t seed;      /* default 0 */
  double tol;         /* default 1e-8 */
  int p_max;          /* default 3 */
  int trials;         /* oracle draws per family, default 100 */
  const char* filter; /* oracle id glob, default "*"; NULL means "*" */
  int strict;         /* WARN records fail the run when nonzero */
} affsym_options;

AFFSYM_API const char* affsym_version(void);
AFFSYM_API const char* affsym_status_name(affsym_status s);
AFFSYM_API const char* affsym_last_error(void);
AFFSYM_API void affsym_options_default(affsym_options* opts);

/* Scenario files (JSON). */
AFFSYM_API affsym_status affsym_scenario_load_file(const char* path, affsym_scenario** out);
AFFSYM_API affsym_status affsym_scenario_load_json(const char* text, affsym_scenario** out);
AFFSYM_API void affsym_scenario_free(affsym_scenario* s);
AFFSYM_API const char* affsym_scenario_name(const affsym_scenario* s);
AFFSYM_API int affsym_scenario_dim(const affsym_scenario* s);
AFFSYM_API int affsym_scenario_point_count(const affsym_scenario* s);
AFFSYM_API const char* affsym_scenario_digest(const affsym_scenario* s);

/* Commands. On success *out receives a report to be released with affsym_report_free. */
AFFSYM_API affsym_status affsym_check_geometry(const affsym_scenario* s, const affsym_options* opts,
                                               affsym_report** out);
AFFSYM_API affsym_status affsym_run_oracles(const affsym_options* opts, affsym_report** out);
AFFSYM_API affsym_status affsym_list_oracles(affsym_report** out);
/* Matrix file: {"dim": n, "A": [...], "H": [...]} with row-major arrays. */
AFFSYM_API affsym_status affsym_decompose_file(const char* path, const affsym_options* opts, affsym_report** out);
AFFSYM_API affsym_status affsym_decompose_json(const char* text, const affsym_options* opts, affsym_report** out);

/* Reports. */
AFFSYM_API const char* affsym_report_json(const affsym_report* r);
/* Same document with every wall_time_ms field removed. */
AFFSYM_API const char* affsym_report_json_untimed(const affsym_report* r);
AFFSYM_API int affsym_report_exit_code(const affsym_report* r, int strict);
/* status: "PASS", "FAIL", "VACUOUS", "WARN", or NULL for all records. */
AFFSYM_API int affsym_report_count(const affsym_report* r, const char* status);
AFFSYM_API void affsym_report_free(affsym_report* r);

#ifdef __cplusplus
}
#endif

#endif
