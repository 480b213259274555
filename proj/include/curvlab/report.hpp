#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "curvlab/cones.hpp"
#include "curvlab/ode.hpp"

namespace curvlab {

inline constexpr const char* kToolName = "curvlab";
inline constexpr const char* kToolVersion = "0.1.0";

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view data);
std::string hex64(std::uint64_t v);

/// Shortest round-trip decimal form of a double ("inf", "-inf", "nan" for
/// non-finite values).
std::string format_double(double v);

/// One report line: space-separated key=value pairs in insertion order.
/// Values containing spaces, quotes, '=' or backslashes are written in double
/// quotes with backslash escapes.
class Record {
 public:
  explicit Record(std::string kind) { add("record", std::move(kind)); }
  Record& add(const std::string& key, const std::string& value);
  Record& add(const std::string& key, const char* value) { return add(key, std::string(value)); }
  Record& add(const std::string& key, double value) { return add(key, format_double(value)); }
  Record& add(const std::string& key, int value) { return add(key, std::to_string(value)); }
  Record& add(const std::string& key, std::int64_t value) { return add(key, std::to_string(value)); }
  Record& add(const std::string& key, std::uint64_t value) { return add(key, std::to_string(value)); }
  Record& add(const std::string& key, bool value) { return add(key, value ? "true" : "false"); }
  std::string str() const { return line_; }

 private:
  std::string line_;
};

/// Inverse of Record::str. Throws InputError on malformed input.
std::map<std::string, std::string> parse_record(std::string_view line);

/// Records of a multi-line report whose `record` field equals `kind`.
std::vector<std::map<std::string, std::string>> find_records(const std::string& report,
                                                             const std::string& kind);

/// "e1;e2;e3;e4" with comma-separated components.
std::string serialize_frame(const Frame4& f);
Frame4 parse_frame(const std::string& s, int n);

/// Trajectory CSV: t,scal,ric_sq,margin with one margin per sample (NaN
/// where a margin was not evaluated).
std::string trajectory_csv(const Trajectory& traj, const std::vector<double>& margins);

}  // namespace curvlab
