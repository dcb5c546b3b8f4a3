/* C interface to the Koopman eigenfrequency detection library.
 *
 * All entry points return a status code:
 *   KP_OK       success
 *   KP_ECONFIG  invalid configuration or arguments
 *   KP_ENUMERIC numerical failure (integration, eigensolve, normalization)
 *   KP_EIO      file system failure
 * kp_last_error() returns a message for the most recent failure on the
 * calling thread.
 */
#ifndef KOOPMAN_KOOPMAN_H
#define KOOPMAN_KOOPMAN_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define KP_OK 0
#define KP_ECONFIG 1
#define KP_ENUMERIC 2
#define KP_EIO 3

/* Opaque pipeline context: configuration plus all intermediate state. */
typedef struct kp_ctx kp_ctx;

const char* kp_version(void);
const char* kp_last_error(void);

/* Create a context from a JSON config file or from JSON text. */
int kp_ctx_create_from_file(const char* config_path, kp_ctx** out);
int kp_ctx_create_from_json(const char* json_text, kp_ctx** out);
void kp_ctx_destroy(kp_ctx* ctx);

/* Pipeline stages. Each stage runs any missing prerequisite stages and
 * writes its artifacts under the configured output directory. */
int kp_generate(kp_ctx* ctx);  /* generate benchmark data or ingest a CSV */
int kp_embed(kp_ctx* ctx);     /* delay-coordinate embedding */
int kp_spectrum(kp_ctx* ctx);  /* kernel eigendecomposition + RKHS norms */
int kp_select(kp_ctx* ctx);    /* frequency detection + eigenfunctions */
int kp_baseline(kp_ctx* ctx);  /* DFT power spectrum (+ covariance path) */
int kp_run(kp_ctx* ctx);       /* full pipeline + manifest */

/* Evaluate stored per-sample weights (CSV `n,re,im`) at the delay-embedded
 * points of a series CSV; writes `t,re,im` to out_csv. */
int kp_extend(kp_ctx* ctx, const char* weights_csv, const char* points_csv,
              const char* out_csv);

/* Results of the selection stage. */
int kp_candidate_count(kp_ctx* ctx, int* out);
int kp_candidate(kp_ctx* ctx, int index, double* omega, double* w_l0,
                 double* w_l1, double* ratio);

/* Diagnostics populated by kp_spectrum. */
int kp_epsilon_used(kp_ctx* ctx, double* out);
int kp_basis_size(kp_ctx* ctx, int* out);
int kp_degenerate_boundary(kp_ctx* ctx, int* out); /* 1 when the eigenvalue
                                                      at the truncation edge
                                                      is degenerate */

#ifdef __cplusplus
}
#endif

#endif /* KOOPMAN_KOOPMAN_H */
