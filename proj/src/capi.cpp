#include "anyonlab/anyonlab.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "anyonlab/fqh.hpp"
#include "anyonlab/harness.hpp"
#include "anyonlab/mach_zehnder.hpp"
#include "anyonlab/model_io.hpp"

struct al_model {
  al::AnyonModel model;
};

struct al_result {
  al::CommandResult result;
};

namespace {

thread_local std::string last_error;

al_status status_for(al::ErrorKind kind) {
  switch (kind) {
    case al::ErrorKind::unknown_charge: return AL_ERR_UNKNOWN_CHARGE;
    case al::ErrorKind::invalid_model: return AL_ERR_INVALID_MODEL;
    case al::ErrorKind::numerical: return AL_ERR_NUMERICAL;
    case al::ErrorKind::zero_probability: return AL_ERR_ZERO_PROBABILITY;
    case al::ErrorKind::invalid_argument: return AL_ERR_INVALID_ARGUMENT;
    case al::ErrorKind::unsupported: return AL_ERR_UNSUPPORTED;
    case al::ErrorKind::parse: return AL_ERR_PARSE;
    case al::ErrorKind::io: return AL_ERR_IO;
  }
  return AL_ERR_INTERNAL;
}

// Runs `body`, translating exceptions into a status and a thread-local message.
template <class F>
al_status guarded(F&& body) {
  try {
    last_error.clear();
    body();
    return AL_OK;
  } catch (const al::Error& e) {
    last_error = e.what();
    return status_for(e.kind());
  } catch (const std::exception& e) {
    last_error = e.what();
    return AL_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown failure";
    return AL_ERR_INTERNAL;
  }
}

al_status null_argument(const char* name) {
  last_error = std::string(name) + " must not be NULL";
  return AL_ERR_INVALID_ARGUMENT;
}

void check_charge(const al_model* m, int charge) {
  if (charge < 0 || charge >= m->model.size())
    al::fail(al::ErrorKind::unknown_charge, "charge index " + std::to_string(charge) + " is out of range");
}

}  // namespace

extern "C" {

const char* al_version(void) { return al::kLibraryVersion; }

const char* al_status_name(al_status status) {
  switch (status) {
    case AL_OK: return "ok";
    case AL_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case AL_ERR_PARSE: return "parse";
    case AL_ERR_IO: return "io";
    case AL_ERR_UNKNOWN_CHARGE: return "unknown_charge";
    case AL_ERR_INVALID_MODEL: return "invalid_model";
    case AL_ERR_UNSUPPORTED: return "unsupported";
    case AL_ERR_NUMERICAL: return "numerical";
    case AL_ERR_ZERO_PROBABILITY: return "zero_probability";
    case AL_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* al_last_error(void) { return last_error.c_str(); }

al_status al_model_load(const char* reference, al_model** out) {
  if (!reference) return null_argument("reference");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] { *out = new al_model{al::resolve_model(reference)}; });
}

void al_model_free(al_model* model) { delete model; }

int al_model_charge_count(const al_model* model) { return model ? model->model.size() : 0; }

const char* al_model_charge_label(const al_model* model, int charge) {
  if (!model || charge < 0 || charge >= model->model.size()) return nullptr;
  return model->model.label(charge).c_str();
}

al_status al_model_charge_index(const al_model* model, const char* label, int* out) {
  if (!model) return null_argument("model");
  if (!label || !out) return null_argument(!label ? "label" : "out");
  return guarded([&] {
    auto idx = model->model.fusion().find(label);
    if (!idx) al::fail(al::ErrorKind::unknown_charge, std::string("no charge labelled '") + label + "'");
    *out = *idx;
  });
}

al_status al_model_quantum_dimension(const al_model* model, int charge, double* out) {
  if (!model || !out) return null_argument(!model ? "model" : "out");
  return guarded([&] {
    check_charge(model, charge);
    *out = model->model.d(charge);
  });
}

al_status al_model_topological_spin(const al_model* model, int charge, al_complex* out) {
  if (!model || !out) return null_argument(!model ? "model" : "out");
  return guarded([&] {
    check_charge(model, charge);
    const al::cplx z = model->model.theta(charge);
    *out = {z.real(), z.imag()};
  });
}

al_status al_model_monodromy(const al_model* model, int a, int b, al_complex* out) {
  if (!model || !out) return null_argument(!model ? "model" : "out");
  return guarded([&] {
    check_charge(model, a);
    check_charge(model, b);
    const al::cplx z = model->model.monodromy_scalar(a, b);
    *out = {z.real(), z.imag()};
  });
}

al_status al_model_verify(const al_model* model, int* passed, double* worst_residual) {
  if (!model || !passed) return null_argument(!model ? "model" : "passed");
  return guarded([&] {
    const auto report = al::verify_model(model->model);
    *passed = report.passed() ? 1 : 0;
    if (worst_residual) *worst_residual = report.worst_residual();
  });
}

al_status al_model_export(const al_model* model, char** out) {
  if (!model || !out) return null_argument(!model ? "model" : "out");
  *out = nullptr;
  return guarded([&] {
    const std::string text = al::export_model(model->model);
    char* buf = static_cast<char*>(std::malloc(text.size() + 1));
    if (!buf) throw std::bad_alloc();
    std::memcpy(buf, text.c_str(), text.size() + 1);
    *out = buf;
  });
}

void al_string_free(char* text) { std::free(text); }

al_status al_mz_p_right(const al_model* model, int a, int probe, double transmission, double theta, double* out) {
  if (!model || !out) return null_argument(!model ? "model" : "out");
  return guarded([&] {
    check_charge(model, a);
    check_charge(model, probe);
    const auto settings = al::InterferometerSettings::symmetric(transmission, theta);
    settings.validate();
    const auto p = al::p_coefficients(model->model, al::ProbeEnsemble::single(probe), settings);
    *out = p.diagonal(al::kOutcomeRight, a);
  });
}

al_status al_fqh_p_right(const al_model* model, int a, int probe, double tunneling, double beta, double* out) {
  if (!model || !out) return null_argument(!model ? "model" : "out");
  return guarded([&] {
    check_charge(model, a);
    check_charge(model, probe);
    const auto settings = al::FqhSettings::symmetric(tunneling, beta);
    settings.validate();
    *out = al::p_exact_diagonal(model->model, a, probe, settings).right.real();
  });
}

al_status al_run_command(const al_command* command, al_result** out) {
  if (!command || !out) return null_argument(!command ? "command" : "out");
  if (!command->verb) return null_argument("command->verb");
  *out = nullptr;
  return guarded([&] {
    al::CommandRequest req;
    req.verb = command->verb;
    if (command->model) req.model = command->model;
    if (command->config_path) req.config_path = command->config_path;
    if (command->config_text) req.config_text = command->config_text;
    if (command->out) req.out = command->out;
    if (command->format) req.format = command->format;
    if (command->has_seed) req.seed = command->seed;
    if (command->has_max_tunneling) req.max_tunneling = command->max_tunneling;
    auto* res = new al_result{al::run_command(req)};
    if (res->result.exit_code != al::kExitOk) last_error = res->result.summary;
    *out = res;
  });
}

int al_result_exit_code(const al_result* result) { return result ? result->result.exit_code : al::kExitUsage; }

const char* al_result_payload(const al_result* result) { return result ? result->result.payload.c_str() : ""; }

const char* al_result_summary(const al_result* result) { return result ? result->result.summary.c_str() : ""; }

void al_result_free(al_result* result) { delete result; }

}  // extern "C"
