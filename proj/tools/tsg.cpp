#include "tsg/commands.hpp"
#include "tsg/config.hpp"
#include "tsg/error.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Goursat problems on time scales: solve, refinement study, verification"};
  app.require_subcommand(1);

  std::string config_path;
  tsg::CommandOptions opts;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "run configuration file")->required();
    sub->add_option("--out", opts.out_dir, "output directory")->capture_default_str();
  };
  auto* solve = app.add_subcommand("solve", "solve and write solution CSV + report");
  auto* study = app.add_subcommand("study", "h-refinement study at a probe point");
  auto* verify = app.add_subcommand("verify", "solve and audit the differential/integral equivalence");
  add_common(solve);
  add_common(study);
  add_common(verify);
  verify->add_flag("--fault-inject", opts.fault_inject, "perturb the solution before auditing");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : tsg::kExitError;
  }

  tsg::RunConfig config;
  try {
    config = tsg::load_config(config_path);
  } catch (const tsg::ValidationError& e) {
    std::cerr << "error: invalid field '" << e.field() << "': " << e.what() << '\n';
    return tsg::kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return tsg::kExitError;
  }

  if (*solve)
    return tsg::cmd_solve(config, opts, std::cout, std::cerr);
  if (*study)
    return tsg::cmd_study(config, opts, std::cout, std::cerr);
  return tsg::cmd_verify(config, opts, std::cout, std::cerr);
}
