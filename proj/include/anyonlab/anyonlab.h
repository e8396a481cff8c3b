#ifndef ANYONLAB_H
#define ANYONLAB_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum al_status {
  AL_OK = 0,
  AL_ERR_INVALID_ARGUMENT = 1,
  AL_ERR_PARSE = 2,
  AL_ERR_IO = 3,
  AL_ERR_UNKNOWN_CHARGE = 4,
  AL_ERR_INVALID_MODEL = 5,
  AL_ERR_UNSUPPORTED = 6,
  AL_ERR_NUMERICAL = 7,
  AL_ERR_ZERO_PROBABILITY = 8,
  AL_ERR_INTERNAL = 9
} al_status;

typedef struct al_model al_model;
typedef struct al_result al_result;

typedef struct al_complex {
  double re;
  double im;
} al_complex;

const char* al_version(void);
const char* al_status_name(al_status status);
/* Message for the most recent failing call on this thread; "" if none. */
const char* al_last_error(void);

/* `reference` is a built-in name ("ising", "hierarchy(2,5)", ...) or a model file path. */
al_status al_model_load(const char* reference, al_model** out);
void al_model_free(al_model* model);

int al_model_charge_count(const al_model* model);
/* The returned pointer lives as long as the model. */
const char* al_model_charge_label(const al_model* model, int charge);
al_status al_model_charge_index(const al_model* model, const char* label, int* out);
al_status al_model_quantum_dimension(const al_model* model, int charge, double* out);
al_status al_model_topological_spin(const al_model* model, int charge, al_complex* out);
al_status al_model_monodromy(const al_model* model, int a, int b, al_complex* out);
/* *passed is 1 when every consistency check holds; *worst_residual is the largest residual. */
al_status al_model_verify(const al_model* model, int* passed, double* worst_residual);
/* Canonical model text; release with al_string_free. */
al_status al_model_export(const al_model* model, char** out);
void al_string_free(char* text);

/* Diagonal interferometer probability p^->_{aa1,b} for a single probe charge. */
al_status al_mz_p_right(const al_model* model, int a, int probe, double transmission, double theta, double* out);
al_status al_fqh_p_right(const al_model* model, int a, int probe, double tunneling, double beta, double* out);

typedef struct al_command {
  const char* verb;        /* verify, classes, run, curve, plan, export-model */
  const char* model;       /* optional, overrides the config's model */
  const char* config_path; /* optional */
  const char* config_text; /* optional inline JSON, used when config_path is NULL */
  const char* out;         /* optional output path */
  const char* format;      /* "json" (default) or "csv" */
  int has_seed;
  uint64_t seed;
  int has_max_tunneling;
  double max_tunneling;
} al_command;

/* Always produces a result unless out is NULL; inspect al_result_exit_code. */
al_status al_run_command(const al_command* command, al_result** out);
int al_result_exit_code(const al_result* result);
const char* al_result_payload(const al_result* result);
const char* al_result_summary(const al_result* result);
void al_result_free(al_result* result);

#ifdef __cplusplus
}
#endif

#endif
