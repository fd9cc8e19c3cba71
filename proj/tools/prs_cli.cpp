#include <iostream>

#include <CLI11.hpp>

#include "prs/commands.hpp"
#include "prs/config.hpp"
#include "prs/parallel.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Photon recoil spectroscopy simulator for a two-ion crystal"};
  prs::RunRequest request;
  request.threads = prs::default_thread_count();

  app.add_option("command", request.command, "modes | dynamics | spectrum | widthcurve | reduced | dtable")
      ->check(CLI::IsMember(prs::command_names()));
  app.add_option("-c,--config", request.config_path, "JSON scenario file")->check(CLI::ExistingFile);
  app.add_option("-p,--preset", request.preset, "named parameter set")->check(CLI::IsMember(prs::preset_names()));
  app.add_option("-s,--set", request.overrides, "override a value, e.g. --set laser.fwhm_hz=10e6")
      ->allow_extra_args(false);
  app.add_option("-j,--threads", request.threads, "worker threads (default: logical cores)")
      ->check(CLI::PositiveNumber);
  app.add_flag("--print-config", request.print_config, "print the resolved configuration and exit");

  try {
    app.parse(argc, argv);
    if (request.command.empty() && !request.print_config) throw CLI::RequiredError("command");
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : prs::exit_config;
  }
  return prs::run(request, std::cout, std::cerr);
}
