#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "curvlab/report.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out;
};

Run run_cli(const std::string& args) {
  const fs::path log = fs::temp_directory_path() / "curvlab_cli_test.log";
  const std::string cmd = std::string(CURVLAB_CLI) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  std::ifstream is(log);
  std::stringstream ss;
  ss << is.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

fs::path scratch_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("curvlab_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("membership exit codes") {
  const fs::path d = scratch_dir("membership");
  std::ofstream(d / "id.cfg") << "cone = chat\ntensor = identity\n";
  std::ofstream(d / "neg.cfg") << "cone = ctilde\ntensor = negative_plane\n";
  const Run ok = run_cli("membership --config " + (d / "id.cfg").string() + " --out " + (d / "a").string());
  CHECK(ok.code == 0);
  CHECK(fs::exists(d / "a" / "membership.report"));
  const Run bad = run_cli("membership --config " + (d / "neg.cfg").string() + " --out " + (d / "b").string());
  CHECK(bad.code == 2);
  const std::string rep = slurp(d / "b" / "membership.report");
  CHECK(curvlab::find_records(rep, "counterexample").size() == 1);
}

TEST_CASE("configuration errors exit 1 naming the key") {
  const fs::path d = scratch_dir("errors");
  std::ofstream(d / "typo.cfg") << "tensr = identity\n";
  const Run r = run_cli("membership --config " + (d / "typo.cfg").string() + " --out " + d.string());
  CHECK(r.code == 1);
  CHECK(r.out.find("tensr") != std::string::npos);
  CHECK(run_cli("membership --config " + (d / "missing.cfg").string()).code == 1);
  CHECK(run_cli("no-such-command").code == 1);
  CHECK(run_cli("describe bogus").code == 1);
}

TEST_CASE("seed flag overrides the config and reruns are byte-identical") {
  const fs::path d = scratch_dir("seed");
  std::ofstream(d / "g.cfg") << "tensor = gaussian\nseed = 3\n";
  const std::string cfg = " --config " + (d / "g.cfg").string();
  CHECK(run_cli("membership" + cfg + " --out " + (d / "x").string()).code != 1);
  CHECK(run_cli("membership" + cfg + " --out " + (d / "y").string()).code != 1);
  CHECK(run_cli("membership" + cfg + " --seed 9 --out " + (d / "z").string()).code != 1);
  const std::string x = slurp(d / "x" / "membership.report");
  CHECK(x == slurp(d / "y" / "membership.report"));
  CHECK(curvlab::find_records(x, "campaign")[0].at("seed") == "3");
  const std::string z = slurp(d / "z" / "membership.report");
  CHECK(curvlab::find_records(z, "campaign")[0].at("seed") == "9");
}

TEST_CASE("describe prints the schema") {
  const Run r = run_cli("describe dim3");
  CHECK(r.code == 0);
  for (const char* key : {"rho", "count", "horizon", "tol"}) CHECK(r.out.find(key) != std::string::npos);
  CHECK(run_cli("describe constants").out.find("1e-3") != std::string::npos);
  CHECK(run_cli("describe sweep").out.find("1,2,4,8") != std::string::npos);
}

}  // TEST_SUITE
