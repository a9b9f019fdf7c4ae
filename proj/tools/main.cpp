#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "app/config.hpp"
#include "app/run.hpp"

int main(int argc, char** argv) {
  using namespace jacobi::app;
  CLI::App cli{"Jacobi curves, curvature and Maslov indices of Hamiltonian flows"};
  cli.set_version_flag("--version", JACOBI_VERSION);
  std::string command, config, out = "out";
  std::optional<std::uint64_t> seed;
  bool parallel = false;
  std::vector<std::string> choices = commands();
  choices.push_back("validate");
  cli.add_option("command", command, "What to run")->required()->check(CLI::IsMember(choices));
  cli.add_option("--config", config, "JSON run configuration")->required();
  cli.add_option("--out", out, "Output directory");
  cli.add_option("--seed", seed, "Override the config seed");
  cli.add_flag("--parallel", parallel, "Use OpenMP kernels");
  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  if (command == "validate") {
    std::ifstream f(config);
    if (!f) {
      std::cerr << "cannot open " << config << "\n";
      return kExitValidation;
    }
    std::vector<std::string> diags;
    try {
      parse_config(Json::parse(f), diags);
    } catch (const std::exception& e) {
      std::cerr << "config is not valid JSON: " << e.what() << "\n";
      return kExitValidation;
    }
    f.clear();
    f.seekg(0);
    const RunConfig cfg = parse_config(Json::parse(f), diags);
    const auto more = validate(cfg);
    diags.insert(diags.end(), more.begin(), more.end());
    for (const auto& d : diags) std::cout << d << "\n";
    return diags.empty() ? kExitOk : kExitValidation;
  }
  return run_cli(command, config, out, seed, parallel, std::cerr);
}
