#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <string>

#include "curvlab/campaign.hpp"
#include "curvlab/errors.hpp"
#include "curvlab/report.hpp"

namespace {

constexpr int kExitError = 1;

int run(const std::string& command, const std::string& config_path, std::optional<std::uint64_t> seed,
        const std::string& out_dir) {
  curvlab::Campaign c;
  c.command = command;
  if (!config_path.empty()) {
    c.params = curvlab::Config::load(config_path);
    c.base_dir = std::filesystem::path(config_path).parent_path().string();
    if (c.base_dir.empty()) c.base_dir = ".";
  }
  if (c.params.has("seed")) {
    try {
      c.seed = std::stoull(c.params.get("seed"));
    } catch (const std::exception&) {
      throw curvlab::ConfigError("key 'seed' expects a nonnegative integer");
    }
  }
  if (seed) c.seed = *seed;
  const curvlab::CampaignOutput out = curvlab::run_campaign(c);
  curvlab::write_outputs(out, out_dir, command);
  const auto summary = curvlab::find_records(out.report, "summary");
  std::cout << command << ": " << (summary.empty() ? "done" : summary.back().at("status"))
            << " (report " << (std::filesystem::path(out_dir) / (command + ".report")).string()
            << ")\n";
  return out.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"curvlab: numerical checks for curvature cones and the Hamilton ODE"};
  app.set_version_flag("--version", std::string(curvlab::kToolVersion));
  app.require_subcommand(1);

  std::string config_path, out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::string selected;

  for (const auto& spec : curvlab::command_specs()) {
    CLI::App* sub = app.add_subcommand(spec.name, spec.summary);
    sub->add_option("--config", config_path, "campaign file (key = value lines)")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "campaign seed (overrides the config)");
    sub->add_option("--out", out_dir, "output directory");
    sub->callback([&selected, name = spec.name] { selected = name; });
  }
  std::string describe_target;
  CLI::App* desc = app.add_subcommand("describe", "print the parameter schema of a command");
  desc->add_option("command", describe_target, "command name")->required();
  desc->callback([&selected] { selected = "describe"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  try {
    if (selected == "describe") {
      std::cout << curvlab::describe(describe_target);
      return 0;
    }
    return run(selected, config_path, seed, out_dir);
  } catch (const curvlab::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return kExitError;
}
