/* SPDX-License-Identifier: Apache-2.0
 *
 * C interface to the covariant-dynamics toolkit. All state lives behind
 * opaque handles; every call returns a status code and leaves a per-thread
 * error message readable through qdyn_last_error().
 */

#ifndef QDYN_QDYN_H
#define QDYN_QDYN_H

#include <stddef.h>

#if defined(_WIN32)
#define QDYN_API __declspec(dllexport)
#else
#define QDYN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qdyn_status {
  QDYN_OK = 0,
  QDYN_ERR_INVALID_ARGUMENT = 1, /* bad handle, bad config, out-of-range input */
  QDYN_ERR_DOMAIN = 2,           /* documented model errors ("space mismatch", ...) */
  QDYN_ERR_INTERNAL = 3
} qdyn_status;

QDYN_API const char* qdyn_version(void);

/* Message for the most recent failure on the calling thread ("" if none). */
QDYN_API const char* qdyn_last_error(void);

/* Releases strings returned through char** out-parameters. */
QDYN_API void qdyn_string_destroy(char* s);

/* ---- spaces and operators ------------------------------------------------ */

typedef struct qdyn_space qdyn_space;
typedef struct qdyn_operator qdyn_operator;
typedef struct qdyn_generator qdyn_generator;

QDYN_API qdyn_status qdyn_space_fock(int dim, qdyn_space** out);
QDYN_API qdyn_status qdyn_space_qubit(qdyn_space** out);
QDYN_API qdyn_status qdyn_space_grid1d(int n_points, double dx, qdyn_space** out);
QDYN_API void qdyn_space_destroy(qdyn_space* s);
QDYN_API qdyn_status qdyn_space_dim(const qdyn_space* s, int* out);

/* Dense column-major complex matrix with interleaved layout:
 * data[2*(i + dim*j)] is Re(M[i][j]), data[2*(i + dim*j) + 1] is Im. */
QDYN_API qdyn_status qdyn_operator_create(const qdyn_space* s, const double* data,
                                          qdyn_operator** out);
QDYN_API void qdyn_operator_destroy(qdyn_operator* op);
/* capacity must be at least 2*dim*dim doubles. */
QDYN_API qdyn_status qdyn_operator_data(const qdyn_operator* op, double* data,
                                        size_t capacity);

/* ---- model generators ----------------------------------------------------- */

QDYN_API qdyn_status qdyn_generator_dho(const qdyn_space* fock, double omega,
                                        double eta, double beta,
                                        int zero_temperature, qdyn_generator** out);
QDYN_API qdyn_status qdyn_generator_two_level(const qdyn_space* qubit, double omega,
                                              double eta, double beta,
                                              int zero_temperature,
                                              qdyn_generator** out);
QDYN_API void qdyn_generator_destroy(qdyn_generator* g);

/* ---- dynamics -------------------------------------------------------------- */

/* rho0 must be a valid density matrix. use_expm nonzero selects the dense
 * exponential propagator; zero selects the adaptive integrator at rel_tol. */
QDYN_API qdyn_status qdyn_evolve(const qdyn_generator* g, const qdyn_operator* rho0,
                                 double t, int use_expm, double rel_tol,
                                 qdyn_operator** out);
QDYN_API qdyn_status qdyn_apply_generator(const qdyn_generator* g,
                                          const qdyn_operator* rho,
                                          qdyn_operator** out);
/* (1/2) || a - b ||_1 */
QDYN_API qdyn_status qdyn_trace_distance(const qdyn_operator* a,
                                         const qdyn_operator* b, double* out);

/* ---- scalar oracles --------------------------------------------------------- */

QDYN_API qdyn_status qdyn_thermal_occupation(double omega, double beta, double hbar,
                                             double* out);
QDYN_API qdyn_status qdyn_cat_coherence(double alpha_re, double alpha_im,
                                        double beta_re, double beta_im, double eta,
                                        double t, double* out);

/* ---- scenario layer ----------------------------------------------------------
 * Configs are JSON text: {"scenario": "<name>", "params": {...}}. Strings
 * returned through char** are owned by the caller; release them with
 * qdyn_string_destroy. */

QDYN_API qdyn_status qdyn_list_scenarios(char** catalog_json);

/* Never executes numerics. diagnostics_json receives a JSON array of
 * field-level messages (empty array when valid). */
QDYN_API qdyn_status qdyn_validate_config(const char* config_json,
                                          char** diagnostics_json, int* valid);

/* Runs one scenario; artifacts and report.json are written under out_dir
 * (pass NULL or "" to skip). workers <= 0 means one worker. */
QDYN_API qdyn_status qdyn_run_scenario(const char* config_json, const char* out_dir,
                                       int workers, char** report_json,
                                       int* all_pass);

#ifdef __cplusplus
}
#endif

#endif /* QDYN_QDYN_H */
