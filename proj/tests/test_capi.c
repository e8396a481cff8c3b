#include <math.h>
#include <stdio.h>
#include <string.h>

#include "anyonlab/anyonlab.h"

#define PI 3.14159265358979323846

static int failures = 0;

#define EXPECT(cond)                                                   \
  do {                                                                 \
    if (!(cond)) {                                                     \
      fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                      \
    }                                                                  \
  } while (0)

int main(void) {
  al_model* fib = NULL;
  EXPECT(al_model_load("fib", &fib) == AL_OK);
  EXPECT(al_model_charge_count(fib) == 2);
  EXPECT(strcmp(al_model_charge_label(fib, 1), "eps") == 0);
  EXPECT(al_model_charge_label(fib, 5) == NULL);

  int eps = -1;
  EXPECT(al_model_charge_index(fib, "eps", &eps) == AL_OK && eps == 1);
  EXPECT(al_model_charge_index(fib, "tau", &eps) == AL_ERR_UNKNOWN_CHARGE);
  EXPECT(strstr(al_last_error(), "tau") != NULL);

  const double phi = (1.0 + sqrt(5.0)) / 2.0;
  double d = 0.0;
  EXPECT(al_model_quantum_dimension(fib, 1, &d) == AL_OK && fabs(d - phi) < 1e-12);
  EXPECT(al_model_quantum_dimension(fib, 9, &d) == AL_ERR_UNKNOWN_CHARGE);

  al_complex spin;
  EXPECT(al_model_topological_spin(fib, 1, &spin) == AL_OK);
  EXPECT(fabs(atan2(spin.im, spin.re) - 4.0 * PI / 5.0) < 1e-12);

  int passed = 0;
  double worst = 1.0;
  EXPECT(al_model_verify(fib, &passed, &worst) == AL_OK && passed == 1 && worst < 1e-9);

  double p = -1.0;
  EXPECT(al_mz_p_right(fib, 1, 1, 0.5, PI, &p) == AL_OK);
  EXPECT(fabs(p - (1.0 - 1.0 / (2.0 * phi))) < 1e-12);
  EXPECT(al_mz_p_right(fib, 0, 1, 0.5, PI, &p) == AL_OK && fabs(p) < 1e-12);
  EXPECT(al_mz_p_right(fib, 0, 1, 1.5, PI, &p) == AL_ERR_INVALID_ARGUMENT);

  char* text = NULL;
  EXPECT(al_model_export(fib, &text) == AL_OK && text && strstr(text, "\"fib\"") != NULL);
  al_model* again = NULL;
  al_string_free(text);
  al_model_free(fib);

  EXPECT(al_model_load("not_a_model", &again) != AL_OK && again == NULL);
  EXPECT(al_model_load(NULL, &again) == AL_ERR_INVALID_ARGUMENT);

  al_model* mr = NULL;
  EXPECT(al_model_load("moore_read", &mr) == AL_OK);
  int one = -1, sigma = -1;
  EXPECT(al_model_charge_index(mr, "(1,[0]_8)", &one) == AL_OK);
  EXPECT(al_model_charge_index(mr, "(sigma,[1]_8)", &sigma) == AL_OK);
  EXPECT(al_fqh_p_right(mr, one, sigma, 0.0, 0.3, &p) == AL_OK && fabs(p - 1.0) < 1e-14);
  EXPECT(al_fqh_p_right(mr, one, sigma, 0.5, 0.3, &p) == AL_ERR_INVALID_ARGUMENT);
  al_model_free(mr);

  al_command cmd;
  memset(&cmd, 0, sizeof cmd);
  cmd.verb = "verify";
  cmd.model = "ising";
  al_result* res = NULL;
  EXPECT(al_run_command(&cmd, &res) == AL_OK);
  EXPECT(al_result_exit_code(res) == 0);
  EXPECT(strstr(al_result_payload(res), "\"passed\": true") != NULL);
  al_result_free(res);

  cmd.verb = "plan";
  cmd.model = NULL;
  cmd.config_text = "{\"run\": {\"p\": [0.25, 0.75], \"alpha\": 0.0455}}";
  cmd.format = "csv";
  EXPECT(al_run_command(&cmd, &res) == AL_OK);
  EXPECT(al_result_exit_code(res) == 0);
  EXPECT(strncmp(al_result_payload(res), "first,second,alpha", 18) == 0);
  al_result_free(res);

  cmd.verb = "nonsense";
  EXPECT(al_run_command(&cmd, &res) == AL_OK);
  EXPECT(al_result_exit_code(res) == 2);
  EXPECT(strlen(al_result_summary(res)) > 0);
  al_result_free(res);

  EXPECT(al_run_command(NULL, &res) == AL_ERR_INVALID_ARGUMENT);
  EXPECT(strcmp(al_status_name(AL_ERR_ZERO_PROBABILITY), "zero_probability") == 0);
  EXPECT(strlen(al_version()) > 0);

  if (failures) fprintf(stderr, "%d failure(s)\n", failures);
  return failures ? 1 : 0;
}
