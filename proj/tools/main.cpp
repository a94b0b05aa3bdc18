#include <cstdio>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"

using nrw::cli::Config;
using nrw::cli::ConfigError;

int main(int argc, char** argv) {
  CLI::App app{"Radial wave channel-of-energy verification driver"};
  app.set_help_flag("--help", "Print this help and exit");  // --h is the grid step
  std::string command, config_path;
  app.add_option("command", command, "verify-*/check-* command, w-tail-rates or sweep");
  app.add_option("-c,--config", config_path, "key = value config file; flags override it");

  // Every config key is also a flag.
  const char* keys[] = {"dim",  "h",     "cfl",   "t_final", "r_max",   "data",      "amp",    "width",
                        "lambda", "R",   "R0",    "R1",      "levels",  "seed",      "trials", "samples",
                        "states", "functions", "output", "T", "eps", "workers", "snapshots", "base"};
  std::map<std::string, std::string> flags;
  for (const char* k : keys) app.add_option(std::string("--") + k, flags[k], std::string("config key '") + k + "'");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : nrw::cli::kConfigError;
  }

  try {
    Config cfg = config_path.empty() ? Config::parse("", "command line") : Config::load(config_path);
    for (const char* k : keys)
      if (app.count(std::string("--") + k)) cfg.set(k, flags[k], std::string("--") + k);
    if (command.empty()) command = cfg.str("command", "");
    if (command.empty()) throw ConfigError(cfg.source() + ": no command given (positional or 'command' key)");
    return nrw::cli::run_and_write(command, cfg, cfg.str("output", "nrw_out"));
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return nrw::cli::kConfigError;
  }
}
