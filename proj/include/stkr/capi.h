#ifndef STKR_CAPI_H
#define STKR_CAPI_H

/* C interface to the STKR toolkit. All functions return a status code
 * (STKR_OK on success); on failure stkr_last_error() describes the problem
 * for the calling thread. Returned strings are heap-allocated and must be
 * released with stkr_string_free(). */

#ifdef __cplusplus
extern "C" {
#endif

#define STKR_OK 0
#define STKR_ERR_INVALID_ARGUMENT 1
#define STKR_ERR_PARSE 2
#define STKR_ERR_CONVERGENCE 3
#define STKR_ERR_IO 4
#define STKR_ERR_CHECK_FAILED 5
#define STKR_ERR_INTERNAL 6

typedef struct stkr_dataset stkr_dataset;

/* Message for the most recent failure on this thread ("" if none). */
const char* stkr_last_error(void);

void stkr_string_free(char* s);

/* Edge file: "i j" per line; label file: "i c" per line; '#' comments. */
int stkr_dataset_load(const char* edge_path, const char* label_path, stkr_dataset** out);
void stkr_dataset_free(stkr_dataset* ds);
long long stkr_dataset_num_nodes(const stkr_dataset* ds);
long long stkr_dataset_num_edges(const stkr_dataset* ds);
int stkr_dataset_num_classes(const stkr_dataset* ds);

/* Experiment configs are key-value text, one "key = value(s)" pair per line,
 * '#' comments. Keys: name, method (lp|stkr-lap|stkr-poly|stkr-topd|krr),
 * mode (transductive|inductive), p_test, seeds (space-separated), tol,
 * out_dir, and optional grid axes T/eta/p/beta/d (space-separated lists).
 * Sweeps additionally read p_list / eta_list. */

/* Runs the full protocol; writes results.csv / summary.csv / timings.csv to
 * out_dir when set, and hands back the summary CSV. */
int stkr_run_experiment(const stkr_dataset* ds, const char* config_text, char** summary_out);

int stkr_sweep_p(const stkr_dataset* ds, const char* config_text, char** csv_out);
int stkr_sweep_eta(const stkr_dataset* ds, const char* config_text, char** csv_out);

/* Runs the spectral oracle's lemma checks on synthetic kernels. Returns
 * STKR_OK when every check passes, STKR_ERR_CHECK_FAILED otherwise; the
 * report (one PASS/FAIL line per check) is returned either way. */
int stkr_verify(unsigned long long seed, char** report_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* STKR_CAPI_H */
