#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "anyonlab/model_io.hpp"

namespace al {

inline constexpr const char* kLibraryVersion = "0.1.0";

// Exit codes shared by the harness, the C API and the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitVerificationFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

int exit_code_for(ErrorKind kind);

struct CommandRequest {
  std::string verb;         // verify | classes | run | curve | plan | export-model
  std::string model;        // overrides the config's model reference when set
  std::string config_path;  // JSON experiment config
  std::string config_text;  // inline config, used when config_path is empty
  std::string out;          // output file; falls back to run.output in the config
  std::string format = "json";
  std::optional<std::uint64_t> seed;
  std::optional<double> max_tunneling;
};

struct CommandResult {
  int exit_code = kExitOk;
  Json record;          // full result record (empty for export-model)
  std::string payload;  // text written to `out` or printed: JSON, CSV or a model file
  std::string summary;  // short human-readable report
  std::string written_to;
};

// Never throws: library errors become an exit code and a message in `summary`.
CommandResult run_command(const CommandRequest& request);

std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace al
