// Experiment runner: every subcommand reproduces one of the lab's studies
// from a config file. Exit codes: 0 success, 2 config error, 3 runtime error.

#include <CLI11.hpp>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "lab/lab.h"

namespace {

struct CommonArgs {
  std::string config_path;
  std::uint64_t seed = 0;
  bool has_seed = false;
  std::string out_dir;
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "experiment config file")->required();
  cmd->add_option("--seed", args.seed, "override the config's base seed")
      ->each([&args](const std::string&) { args.has_seed = true; });
  cmd->add_option("--out", args.out_dir, "override the config's output directory");
  cmd->add_option("--threads", args.threads,
                  "worker threads (LAB_THREADS env var wins over this flag)");
}

int exit_code(lab_status status) {
  switch (status) {
    case LAB_OK: return 0;
    case LAB_ERR_CONFIG: return 2;
    default: return 3;
  }
}

int run_subcommand(const std::string& name, const CommonArgs& args, bool validate_only) {
  lab_config* cfg = nullptr;
  lab_status status = lab_config_open(args.config_path.c_str(), &cfg);
  if (status != LAB_OK) {
    std::fprintf(stderr, "error: %s\n", lab_last_error());
    return exit_code(status);
  }

  if (validate_only) {
    status = lab_config_validate(cfg);
    if (status != LAB_OK)
      std::fprintf(stderr, "invalid config: %s\n", lab_last_error());
    else
      std::printf("ok: %s\n", lab_config_experiment(cfg));
    lab_config_close(cfg);
    return exit_code(status);
  }

  if (name != lab_config_experiment(cfg)) {
    std::fprintf(stderr, "error: config is for experiment '%s', not '%s'\n",
                 lab_config_experiment(cfg), name.c_str());
    lab_config_close(cfg);
    return 2;
  }

  lab_run_options opts{};
  opts.out_dir = args.out_dir.empty() ? nullptr : args.out_dir.c_str();
  opts.seed = args.seed;
  opts.has_seed = args.has_seed ? 1 : 0;
  opts.threads = args.threads;
  status = lab_run(cfg, &opts);
  if (status != LAB_OK) std::fprintf(stderr, "error: %s\n", lab_last_error());
  lab_config_close(cfg);
  return exit_code(status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"label-noise robustness lab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(lab_version()));

  const std::vector<std::string> experiments = {
      "noise-sweep",    "representation-duel", "learner-verification", "infected-balls",
      "boundary-raster", "fine2coarse",        "majority-mc"};

  std::vector<CommonArgs> arg_blocks(experiments.size() + 1);
  std::string chosen;
  bool validate_only = false;

  for (std::size_t i = 0; i < experiments.size(); ++i) {
    CLI::App* cmd = app.add_subcommand(experiments[i], "run the " + experiments[i] + " experiment");
    add_common(cmd, arg_blocks[i]);
    cmd->callback([&, i] { chosen = experiments[i]; });
  }
  CLI::App* validate = app.add_subcommand("validate-config", "parse and schema-check a config");
  add_common(validate, arg_blocks.back());
  validate->callback([&] {
    chosen = "validate-config";
    validate_only = true;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  std::size_t index = validate_only ? experiments.size()
                                    : static_cast<std::size_t>(std::find(experiments.begin(),
                                                                         experiments.end(), chosen) -
                                                               experiments.begin());
  return run_subcommand(chosen, arg_blocks[index], validate_only);
}
