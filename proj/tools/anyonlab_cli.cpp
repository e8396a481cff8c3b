#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "anyonlab/anyonlab.h"

namespace {

struct Options {
  std::string model;
  std::string config;
  std::string out;
  std::string format = "json";
  std::optional<std::uint64_t> seed;
  std::optional<double> max_tunneling;
};

void add_common(CLI::App* cmd, Options& opt, bool experiment) {
  cmd->add_option("--model", opt.model, "built-in model name or model file");
  cmd->add_option("--out", opt.out, "write the result here instead of stdout");
  if (!experiment) return;
  cmd->add_option("--config", opt.config, "experiment configuration (JSON)")->check(CLI::ExistingFile);
  cmd->add_option("--format", opt.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--seed", opt.seed, "base seed for sampling runs");
  cmd->add_option("--max-tunneling-override", opt.max_tunneling,
                  "raise the tunneling bound above which the FQH device refuses to run");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Anyonic charge measurement by interferometry"};
  app.set_version_flag("--version", std::string(al_version()));
  app.require_subcommand(1);

  Options opt;
  struct Verb {
    const char* name;
    const char* help;
    bool experiment;
  };
  const Verb verbs[] = {
      {"verify", "check a model's consistency equations", true},
      {"classes", "list the charge classes a probe setup can distinguish", true},
      {"run", "update a target state by probe measurements", true},
      {"curve", "conductance against the interferometer phase", true},
      {"plan", "how many probes a distinction needs", true},
      {"export-model", "write a model in the canonical file format", false},
  };
  for (const auto& v : verbs) add_common(app.add_subcommand(v.name, v.help), opt, v.experiment);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const std::string verb = app.get_subcommands().front()->get_name();
  al_command cmd{};
  cmd.verb = verb.c_str();
  cmd.model = opt.model.empty() ? nullptr : opt.model.c_str();
  cmd.config_path = opt.config.empty() ? nullptr : opt.config.c_str();
  cmd.out = opt.out.empty() ? nullptr : opt.out.c_str();
  cmd.format = opt.format.c_str();
  if (opt.seed) {
    cmd.has_seed = 1;
    cmd.seed = *opt.seed;
  }
  if (opt.max_tunneling) {
    cmd.has_max_tunneling = 1;
    cmd.max_tunneling = *opt.max_tunneling;
  }

  al_result* result = nullptr;
  const al_status status = al_run_command(&cmd, &result);
  if (status != AL_OK) {
    std::cerr << "error: " << al_last_error() << '\n';
    return 2;
  }
  const int code = al_result_exit_code(result);
  // With --out the file holds the result; otherwise stdout does.
  if (opt.out.empty()) std::fputs(al_result_payload(result), stdout);
  std::fputs(al_result_summary(result), stderr);
  al_result_free(result);
  return code;
}
