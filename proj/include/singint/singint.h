/* singint - Runge-Kutta solvers for single-integrand Stratonovich SDEs.
 *
 * C interface of the shared library. All entry points take an opaque
 * context that carries the last error message, return an integer status
 * (SI_OK / SI_ERR_VALIDATION / SI_ERR_NUMERICAL), and hand results back
 * as malloc'd strings the caller releases with si_string_free().
 * Study inputs are JSON configuration documents; outputs are CSV or JSON
 * report documents (see README for the schemas).
 */

#ifndef SINGINT_SINGINT_H
#define SINGINT_SINGINT_H

#ifdef __cplusplus
extern "C" {
#endif

#define SI_OK 0
#define SI_ERR_VALIDATION 1
#define SI_ERR_NUMERICAL 2

typedef struct si_context si_context;

si_context* si_context_create(void);
void si_context_destroy(si_context* ctx);

/* Message of the most recent failure on this context; empty string if none.
 * The pointer stays valid until the next call on the same context. */
const char* si_last_error(const si_context* ctx);

void si_string_free(char* s);

/* JSON array of built-in method names. */
int si_list_methods(si_context* ctx, char** out_json);

/* Order analysis of a built-in method (by name) or a tableau document
 * (a JSON object string with keys s, A, b). Reports the deterministic
 * order p_d (checked up to max_check, at most 12), the predicted SDE
 * order floor(p_d/2), and the bracket notation of the first tree failing
 * the next order's conditions ("" if none up to max_check).
 */
int si_method_order(si_context* ctx, const char* method, int max_check,
                    int* p_d, int* p_sde, char** failing_tree);

/* Validates a tableau document and echoes its parsed, completed form. */
int si_tableau_check(si_context* ctx, const char* tableau_json,
                     char** out_json);

/* Pathwise-coupled mean-square convergence study. Either output may be
 * NULL if not wanted. */
int si_mean_square_study(si_context* ctx, const char* config_json,
                         char** out_csv, char** out_json);

/* Weak convergence study with moment-matched increments. */
int si_weak_study(si_context* ctx, const char* config_json, char** out_csv,
                  char** out_json);

/* One trajectory of `method` on a driving path realized from the config's
 * master_seed, integrated at finest_level. CSV columns: t,y0,..,y{d-1}. */
int si_trajectory(si_context* ctx, const char* config_json, char** out_csv);

/* Invariant drift along one shared path per method. Config keys: problem,
 * sigma, a, methods, h, horizon, master_seed, record_stride. CSV columns:
 * method,invariant,t,drift. The JSON output also carries the max drift and
 * truncation info per method. */
int si_invariant_drift(si_context* ctx, const char* config_json,
                       char** out_csv, char** out_json);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SINGINT_SINGINT_H */
