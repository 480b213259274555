#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace curvlab {

struct ParamSpec {
  std::string key;
  std::string default_value;
  std::string help;
};

struct CommandSpec {
  std::string name;
  std::string summary;
  std::string claim;  // the statement the campaign checks
  std::vector<ParamSpec> params;
};

const std::vector<CommandSpec>& command_specs();
/// Throws ConfigError for an unknown command.
const CommandSpec& command_spec(const std::string& name);
/// Parameter schema, defaults and checked statement of a command.
std::string describe(const std::string& command);

/// Flat line-oriented configuration: `key = value` per line, `#` starts a
/// comment, blank lines are ignored. Keys may appear once.
class Config {
 public:
  /// Throws ConfigError naming the line or key at fault.
  static Config parse(std::string_view text);
  static Config load(const std::string& path);

  const std::map<std::string, std::string>& values() const { return values_; }
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::string& get(const std::string& key) const { return values_.at(key); }
  void set(const std::string& key, const std::string& value) { values_[key] = value; }

 private:
  std::map<std::string, std::string> values_;
};

struct Campaign {
  std::string command;
  Config params;
  std::uint64_t seed = 1;
  /// Directory relative tensor files are resolved against.
  std::string base_dir = ".";
};

struct CampaignOutput {
  /// 0 all checks passed, 2 a violation or counterexample was recorded.
  int exit_code = 0;
  std::string report;
  /// Extra files (CSV), name relative to the output directory.
  std::vector<std::pair<std::string, std::string>> files;
};

/// Runs one campaign. The report depends only on the command, the resolved
/// parameters and the seed. Throws ConfigError for unknown keys or bad
/// values and Error subclasses for runtime failures.
CampaignOutput run_campaign(const Campaign& campaign);

/// Writes <dir>/<command>.report and the extra files; creates `dir`.
void write_outputs(const CampaignOutput& out, const std::string& dir, const std::string& command);

}  // namespace curvlab
