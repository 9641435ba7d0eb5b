#include <CLI11.hpp>
#include <cstdio>
#include <exception>

#include "kwl/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"kwl - steep potential well laboratory"};
  app.require_subcommand(1);

  std::string config_path;
  kwl::RunOptions options;
  auto* run = app.add_subcommand("run", "execute the pipeline described by a config file");
  run->add_option("config", config_path, "experiment config file")->required();
  run->add_option("--out", options.out_dir, "output directory (overrides [output] dir)");
  run->add_option("--stage", options.stage, "run through this stage only");
  run->add_option("--threads", options.threads, "worker threads for independent couplings");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // malformed invocation is a config error
  }

  try {
    const kwl::ExperimentConfig config = kwl::parse_config_file(config_path);
    return kwl::run_experiment(config, options);
  } catch (const kwl::Error& e) {
    std::fprintf(stderr, "kwl: %s\n", e.what());
    return e.code() == kwl::ErrorCode::ConfigError ? 2 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "kwl: %s\n", e.what());
    return 1;
  }
}
