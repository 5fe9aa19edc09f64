#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "csf/parallel.hpp"
#include "csf/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"charged-scalar-field evolution and diagnostics"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "evolve a configured system and write reports");
  std::string config, out_dir;
  std::vector<std::string> overrides;
  int threads = 0;
  run->add_option("--config", config, "key=value config file")->required();
  run->add_option("--out", out_dir, "output directory (default: CSF_OUTPUT_DIR or cwd)");
  run->add_option("--set", overrides, "config overrides, key=value");
  run->add_option("--threads", threads, "worker cap (0 = default)");

  // verify
  auto* verify = app.add_subcommand("verify", "run a property suite");
  std::string suite;
  double h = 0.08, h2 = 0.04;
  verify->add_option("suite", suite, "geometry | identities | inequalities | convergence")
      ->required();
  verify->add_option("--h", h, "coarse step for order measurements");
  verify->add_option("--h2", h2, "fine step for order measurements");
  verify->add_option("--threads", threads, "worker cap (0 = default)");

  // report
  auto* report = app.add_subcommand("report", "re-check thresholds from stored reports");
  std::string dir = ".";
  report->add_option("--dir", dir, "run directory holding monitors.txt");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : csf::kExitConfig;
  }

  if (threads > 0) csf::par::set_threads(threads);

  if (run->parsed()) {
    csf::RunOptions opt;
    opt.config_path = config;
    opt.overrides = overrides;
    opt.out_dir = csf::resolve_output_dir(out_dir);
    opt.threads = threads;
    return csf::cmd_run(opt, std::cout);
  }
  if (verify->parsed()) return csf::cmd_verify(suite, h, h2, std::cout);
  return csf::cmd_report(dir, std::cout);
}
