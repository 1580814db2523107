#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "fsreach/serialize.hpp"

namespace fs = std::filesystem;
using fsreach::json;

namespace {

const char* cli_path() { return FSREACH_CLI_PATH; }

fs::path work_dir() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "fsreach_cli_tests";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run_cli(const std::string& args, std::string* output = nullptr,
            const std::string& env_prefix = "") {
  const fs::path log = work_dir() / "last_run.log";
  const std::string cmd = env_prefix + std::string(cli_path()) + " " + args +
                          " >" + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  if (output) {
    std::ifstream in(log);
    std::stringstream ss;
    ss << in.rdbuf();
    *output = ss.str();
  }
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void strip_timing(json& j) {
  if (j.is_object()) {
    j.erase("timing_ms");
    for (auto& [k, v] : j.items()) strip_timing(v);
  } else if (j.is_array()) {
    for (auto& v : j) strip_timing(v);
  }
}

json planar_scenario(const std::string& name, int Ns, int grid, bool with_seed) {
  json j = {
      {"name", name},
      {"model",
       {{"kind", "constant"},
        {"N", 4},
        {"A", {{1.0, 0.0}, {0.0, 1.0}}},
        {"F", {{1.0, 0.0}, {0.0, 1.0}}},
        {"disturbance",
         {{"mean", {0.0, 0.0}}, {"cov", {{11.62, 0.59}, {0.59, 3.75}}}}}}},
      {"x0", {2.0, 2.0}},
      {"obstacle",
       {{"type", "box"}, {"center", {0.0, 0.0}}, {"half_width", {20.0, 20.0}}}},
      {"query",
       {{"tau", 1},
        {"alpha", 0.001},
        {"algorithm", "minkowski"},
        {"tol", 1e-4},
        {"K", 10},
        {"n_des", 32}}},
      {"oracle", {{"Ns", Ns}, {"nx", grid}, {"ny", grid}}},
      {"output_dir", (work_dir() / name).string()}};
  if (with_seed) j["oracle"]["seed"] = 20240501;
  return j;
}

fs::path write_scenario(const json& j, const std::string& stem) {
  const fs::path p = work_dir() / (stem + ".cfg");
  std::ofstream out(p);
  out << j.dump(2) << "\n";
  return p;
}

}  // namespace

TEST_CASE("help exits cleanly") {
  std::string out;
  CHECK(run_cli("--help", &out) == 0);
  CHECK(out.find("occupyset") != std::string::npos);
}

TEST_CASE("builtin vehicle occupancy query") {
  std::string out;
  const std::string dir = (work_dir() / "builtin").string();
  const int code = run_cli(
      "occupancy --model unicycle --tau 8 --at 10.2,10.2 --out " + dir, &out);
  CHECK(code == 0);
  CHECK(out.find("phi(") != std::string::npos);
  const json rec = json::parse(read_file(fs::path(dir) / "unicycle-uniform_occupancy.json"));
  CHECK(rec.at("phi").get<double>() >= 0.0);
  CHECK(rec.at("phi").get<double>() <= 1.0);
  CHECK(rec.contains("scenario_hash"));
}

TEST_CASE("bad inputs map to the parse exit code") {
  const fs::path sc = write_scenario(planar_scenario("small", 500, 10, true),
                                     "small_parse");
  std::string out;
  CHECK(run_cli("occupyset --scenario " + sc.string() + " --alpha 2.0", &out) == 2);
  CHECK(out.find("alpha out of range") != std::string::npos);
  CHECK(run_cli("occupyset --scenario " + sc.string() + " --frobnicate", &out) == 2);
  CHECK(run_cli("occupyset --scenario /no/such/file.cfg", &out) == 2);
  CHECK(run_cli("occupyset", &out) == 2);
  CHECK(out.find("no scenario given") != std::string::npos);
  CHECK(run_cli("occupancy --model unicycle", &out) == 2);
  CHECK(run_cli("cover --scenario " + sc.string(), &out) == 2);
  CHECK(out.find("not a switched model") != std::string::npos);
}

TEST_CASE("numerical failures map to their own exit code") {
  json j = planar_scenario("halfplane", 500, 10, true);
  j["obstacle"] = {{"type", "hpolytope"},
                   {"A", {{1.0, 0.0}}},
                   {"b", {1.0}}};
  const fs::path sc = write_scenario(j, "halfplane");
  std::string out;
  CHECK(run_cli("occupancy --scenario " + sc.string() + " --at 0,0", &out) == 3);
  CHECK(out.find("error:") != std::string::npos);
}

TEST_CASE("oracle reruns reproduce result files") {
  const json a = planar_scenario("det", 4000, 25, true);
  const fs::path pa = write_scenario(a, "det_a");

  const int ca = run_cli("oracle --scenario " + pa.string());
  const std::string csv_a = read_file(work_dir() / "det" / "det_oracle.csv");
  json va = json::parse(read_file(work_dir() / "det" / "det_verdict.json"));

  const int cb = run_cli("oracle --scenario " + pa.string());
  const std::string csv_b = read_file(work_dir() / "det" / "det_oracle.csv");
  json vb = json::parse(read_file(work_dir() / "det" / "det_verdict.json"));

  CHECK(ca == cb);
  CHECK(csv_a == csv_b);
  strip_timing(va);
  strip_timing(vb);
  CHECK(va == vb);
}

TEST_CASE("seed precedence: flag, then scenario, then environment") {
  json base = planar_scenario("envseed", 1500, 12, false);
  const fs::path sc = write_scenario(base, "envseed");
  const fs::path out1 = work_dir() / "envseed";
  const std::string csv = (out1 / "envseed_oracle.csv").string();

  run_cli("oracle --scenario " + sc.string(), nullptr, "FSREACH_SEED=1 ");
  const std::string env1 = read_file(csv);
  run_cli("oracle --scenario " + sc.string(), nullptr, "FSREACH_SEED=1 ");
  const std::string env1_again = read_file(csv);
  run_cli("oracle --scenario " + sc.string(), nullptr, "FSREACH_SEED=2 ");
  const std::string env2 = read_file(csv);
  CHECK(env1 == env1_again);
  CHECK(env1 != env2);

  run_cli("oracle --scenario " + sc.string() + " --seed 1", nullptr,
          "FSREACH_SEED=2 ");
  const std::string flag_beats_env = read_file(csv);
  CHECK(flag_beats_env == env1);

  json seeded = planar_scenario("envseed", 1500, 12, true);
  seeded["oracle"]["seed"] = 1;
  const fs::path sc_seeded = write_scenario(seeded, "envseed_pinned");
  run_cli("oracle --scenario " + sc_seeded.string(), nullptr, "FSREACH_SEED=2 ");
  const std::string scenario_beats_env = read_file(csv);
  CHECK(scenario_beats_env == env1);
}
