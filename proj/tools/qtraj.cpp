#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "qtraj/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Classical trajectories from quantum densities: synthesize, verify and compare."};
  std::string command;
  std::string config;
  std::string output;
  app.add_option("command", command, "synth | verify | marginal | momentum | potential | bohm | ensemble")
      ->required()
      ->check(CLI::IsMember(qtraj::cli::commands()));
  app.add_option("config", config, "YAML run configuration")->required();
  app.add_option("-o,--output", output, "output directory (overrides output.directory)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return qtraj::cli::kExitInvalid;
  }
  std::optional<std::filesystem::path> out;
  if (!output.empty()) out = output;
  return qtraj::cli::run(command, config, out, std::cerr);
}
