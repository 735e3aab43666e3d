#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "speiser_cli/commands.hpp"
#include "speiser_cli/config.hpp"

namespace {

constexpr int kUsageError = 2;

}  // namespace

int main(int argc, char** argv) {
  using namespace speiser::cli;

  CLI::App app{"Julia-set dimension experiments for elliptic maps of Speiser class"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out;
  std::vector<std::string> overrides;
  unsigned threads = 0;
  std::uint64_t seed = 0;
  app.add_option("-c,--config", config_path, "key = value config file")->check(CLI::ExistingFile);
  app.add_option("-o,--out", out, "output file");
  app.add_option("-s,--set", overrides, "override one config entry, key=value");
  auto* threads_opt = app.add_option("-t,--threads", threads, "worker threads (0 = all cores)");
  auto* seed_opt = app.add_option("--seed", seed, "random seed for sampled checks");

  auto* verify = app.add_subcommand("verify", "run the invariant suite");
  auto* render = app.add_subcommand("render", "classify a grid and write a PGM image");
  auto* sweep = app.add_subcommand("sweep", "fixed points, box dimension and envelopes over lambda_grid");
  auto* lower = app.add_subcommand("dim-lower", "Bowen lower bounds t(N)");
  auto* upper = app.add_subcommand("dim-upper", "pole-series exponent and closed-form upper bound");
  auto* show = app.add_subcommand("config", "print the effective configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  ExperimentConfig config;
  try {
    config = config_path.empty() ? parse_config("") : load_config(config_path);
    for (const auto& entry : overrides) {
      const auto eq = entry.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + entry + "'");
      set_config_value(config, entry.substr(0, eq), entry.substr(eq + 1));
    }
    if (!out.empty()) config.out = out;
    if (*threads_opt) config.threads = threads;
    if (*seed_opt) config.seed = seed;
    if (!overrides.empty()) config = parse_config(serialize(config));
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsageError;
  }

  try {
    if (*verify) return cmd_verify(config, std::cout);
    if (*render) return cmd_render(config, std::cout);
    if (*sweep) return cmd_sweep(config, std::cout);
    if (*lower) return cmd_dim_lower(config, std::cout);
    if (*upper) return cmd_dim_upper(config, std::cout);
    if (*show) {
      std::cout << serialize(config);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kUsageError;
}
