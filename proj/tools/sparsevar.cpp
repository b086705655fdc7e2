#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "sparsevar/cli.hpp"
#include "sparsevar/errors.hpp"

using namespace sparsevar;

int main(int argc, char** argv) {
  CLI::App app{"Sparse VAR estimation, simulation and verification"};
  app.set_version_flag("--version", std::string(kVersion));
  std::string command;
  std::string config_path;
  CliOverrides ov;
  app.add_option("command", command, "simulate | estimate | benchmark | verify")->required();
  app.add_option("--config", config_path, "configuration file");
  app.add_option("--seed", ov.seed, "master seed (u64)");
  app.add_option("--threads", ov.threads, "worker threads");
  app.add_option("--out", ov.out, "output directory");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int status = app.exit(e);
    return status == 0 ? 0 : static_cast<int>(ErrorClass::kConfig);
  }

  try {
    ov.command = parse_command(command);
    std::string text;
    std::string origin = "<command line>";
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw ConfigError("cannot read config file '" + config_path + "'");
      std::ostringstream ss;
      ss << in.rdbuf();
      text = ss.str();
      origin = config_path;
    }
    return run(parse_config(text, origin, ov), std::cerr);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(e.error_class());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return static_cast<int>(ErrorClass::kInternal);
  }
}
