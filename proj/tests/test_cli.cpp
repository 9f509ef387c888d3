#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "hypervekua/fields.hpp"
#include "hypervekua/io.hpp"

using namespace hypervekua;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Sandbox {
  fs::path dir;
  Sandbox() {
    dir = fs::temp_directory_path() /
          ("hypervekua_cli_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Sandbox() { fs::remove_all(dir); }

  void write(const std::string& name, const std::string& text) const {
    std::ofstream(dir / name) << text;
  }

  // Runs the CLI inside the sandbox; returns the exit status.
  int run(const std::string& args, const std::string& env = "") const {
    const std::string cmd = "cd '" + dir.string() + "' && " + env + " '" HYPERVEKUA_CLI "' " + args +
                            " > stdout.txt 2> stderr.txt";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  json read_json(const std::string& name) const { return json::parse(read_file(dir / name)); }
  std::string read(const std::string& name) const { return read_file(dir / name); }
};

std::vector<std::map<std::string, double>> read_csv(const fs::path& path) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  std::vector<std::string> header;
  std::stringstream hs(line);
  for (std::string h; std::getline(hs, h, ',');) header.push_back(h);
  std::vector<std::map<std::string, double>> rows;
  while (std::getline(in, line)) {
    std::stringstream ls(line);
    std::map<std::string, double> row;
    std::size_t col = 0;
    for (std::string cell; std::getline(ls, cell, ',');) {
      row[header.at(col++)] = cell.empty() ? NAN : parse_real(cell);
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_CASE("powers with zero potential reproduce classical powers") {
  Sandbox box;
  box.write("c.json", R"({"potential": "zero", "center": [0, 0], "coefficient": [1, 0],
                          "exponents": [3, 3], "out": "out"})");
  REQUIRE(box.run("powers --config c.json") == 0);
  double worst = 0;
  for (const auto& r : read_csv(box.dir / "out/powers_m0_n3.csv")) {
    const hnum z{r.at("x"), r.at("t")};
    worst = std::max(worst, max_norm(hnum{r.at("re"), r.at("im")} - pow(z, 3)));
  }
  CHECK(worst <= 1e-10);
  const json sidecar = box.read_json("out/powers_m0_n3.json");
  CHECK(sidecar["n"] == 3);
  CHECK(sidecar["potential"] == "zero");
  CHECK(sidecar["path"] == "straight");
}

TEST_CASE("powers record the closed-form comparison") {
  Sandbox box;
  box.write("c.json", R"({"potential": "const:1", "exponents": [1, 2], "center": [0.3, 0.6]})");
  REQUIRE(box.run("powers --config c.json --out res") == 0);
  const json s = box.read_json("res/summary.json");
  CHECK(s["passed"] == true);
  CHECK(s["command"] == "powers");
  CHECK(s["config"]["potential"] == "const:1");
  CHECK(s["input_hash"]["config"].get<std::string>().size() == 40);
  CHECK(s["timestamp"].is_string());
  const json& n1 = s["results"][0];
  CHECK(n1["closed_form"]["checked"] == true);
  CHECK(n1["closed_form"]["max_discrepancy"].get<double>() <= 1e-6);
  const json& n2 = s["results"][1];
  CHECK(n2["closed_form"]["checked"] == false);
  CHECK(n2["closed_form"]["rederived_max_discrepancy"].get<double>() <= 1e-10);
  CHECK(n2["closed_form"]["singular_nodes"] == 21);
}

TEST_CASE("tolerance failures exit with status 1") {
  Sandbox box;
  CHECK(box.run("powers --out o --tol 1e-12") == 1);
  CHECK(box.read_json("o/summary.json")["passed"] == false);
  CHECK(box.read_json("o/summary.json")["config"]["tolerances"]["residual"] == 1e-12);
}

TEST_CASE("error JSON and exit status 2") {
  Sandbox box;
  box.write("bad.json", R"({"potential": "sech:1"})");
  CHECK(box.run("powers --config bad.json --out e1") == 2);
  CHECK(box.read_json("e1/error.json")["error"]["code"] == "POTENTIAL_PARSE");
  CHECK(box.read("stderr.txt").find("POTENTIAL_PARSE") != std::string::npos);

  box.write("center.json", R"({"center": [3, 0.5]})");
  CHECK(box.run("modes --config center.json --out e2") == 2);
  CHECK(box.read_json("e2/error.json")["error"]["code"] == "CENTER_OUT_OF_DOMAIN");

  box.write("k.json", R"({"spectral": {"k": []}})");
  CHECK(box.run("spectral --config k.json --out e3") == 2);
  CHECK(box.read_json("e3/error.json")["error"]["code"] == "CONFIG_INVALID");

  box.write("unknown.json", R"({"potentail": "zero"})");
  CHECK(box.run("powers --config unknown.json --out e4") == 2);
  CHECK(box.read_json("e4/error.json")["error"]["code"] == "CONFIG_INVALID");

  box.write("res.json", R"({"domain": {"nx": 2}})");
  CHECK(box.run("powers --config res.json --out e5") == 2);
  CHECK(box.read_json("e5/error.json")["error"]["code"] == "CONFIG_INVALID");

  box.write("step.json", R"({"spectral": {"k": [0.5, 30], "step": 0.25}})");
  CHECK(box.run("spectral --config step.json --out e6") == 2);
  const json err = box.read_json("e6/error.json")["error"];
  CHECK(err["code"] == "STEP_TOO_LARGE");
  CHECK(err.contains("k"));

  CHECK(box.run("sequence --out e7", "HYPERVEKUA_THREADS=zero") == 2);
  CHECK(box.run("frobnicate") == 2);
}

TEST_CASE("modes of the identity power") {
  Sandbox box;
  box.write("c.json", R"({"potential": "zero", "center": [0, 0], "exponents": [1, 1]})");
  REQUIRE(box.run("modes --config c.json --out m") == 0);
  for (const auto& r : read_csv(box.dir / "m/modes_m0_n1.csv")) {
    CHECK(r.at("n_plus") == doctest::Approx((r.at("x") - r.at("t")) / 2).epsilon(1e-12));
    CHECK(r.at("n_minus") == doctest::Approx((r.at("x") + r.at("t")) / 2).epsilon(1e-12));
  }
}

TEST_CASE("modes with a sech potential meet the residual tolerance") {
  Sandbox box;
  box.write("c.json", R"({"potential": "sech:1:1", "exponents": [0, 2], "m": 1})");
  REQUIRE(box.run("modes --config c.json --out m") == 0);
  for (const auto& r : box.read_json("m/summary.json")["results"]) {
    CHECK(r["max_residual"].get<double>() <= 5e-5);
  }
}

TEST_CASE("spectral runs") {
  Sandbox box;
  box.write("zero.json", R"({"potential": "zero", "spectral": {"k": [1]}})");
  REQUIRE(box.run("spectral --config zero.json --out z") == 0);
  for (const auto& r : read_csv(box.dir / "z/spectral_k1.csv")) {
    CHECK(r.at("abs_n1") == doctest::Approx(1.0).epsilon(1e-12));
  }
  box.write("sech.json", R"({"potential": "sech:1:1", "spectral": {"k": [1]}})");
  REQUIRE(box.run("spectral --config sech.json --out s") == 0);
  const json r = box.read_json("s/summary.json")["results"][0];
  CHECK(r["drift_per_unit_x"].get<double>() <= 1e-8);
  CHECK(r["max_bridge_residual"].get<double>() <= 1e-4);
}

TEST_CASE("sequence export") {
  Sandbox box;
  REQUIRE(box.run("sequence --out q") == 0);
  const json manifest = box.read_json("q/pair_m1.json");
  CHECK(manifest["pair"] == "zs[1]");
  std::ifstream f(box.dir / "q/pair_m1_F.csv");
  const HyperField F = read_field_csv(f);
  const double S = 2 * std::atan(std::tanh(0.5 / 2));
  CHECK(max_norm(F({0.5, 0.5}) - hnum{std::cos(S), std::sin(S)}) <= 1e-15);
  const json s = box.read_json("q/summary.json");
  CHECK(s["results"][0]["successor_of_next"] == true);
  CHECK(s["results"][1]["period_2"] == true);
}

TEST_CASE("table potentials resolve against the config directory") {
  Sandbox box;
  fs::create_directories(box.dir / "cfg");
  // kink at x = -1, outside the difference stencils
  box.write("cfg/s.csv", "x,s\n-2,0\n-1,1\n3,0.5\n");
  box.write("cfg/c.json", R"({"potential": "table:s.csv", "exponents": [1, 1], "out": "o"})");
  REQUIRE(box.run("powers --config cfg/c.json") == 0);
  const json s = box.read_json("cfg/o/summary.json");
  CHECK(s["input_hash"]["potential_table"] == git_blob_hash("x,s\n-2,0\n-1,1\n3,0.5\n"));
}

TEST_CASE("output is deterministic across thread counts") {
  Sandbox box;
  box.write("c.json", R"({"exponents": [2, 3], "domain": {"nx": 11, "nt": 9}})");
  REQUIRE(box.run("powers --config c.json --out a --threads 1") == 0);
  REQUIRE(box.run("powers --config c.json --out b", "HYPERVEKUA_THREADS=4") == 0);
  for (const char* f : {"powers_m0_n2.csv", "powers_m0_n3.csv", "powers_m0_n3.json"}) {
    CHECK(box.read(std::string("a/") + f) == box.read(std::string("b/") + f));
  }
  json sa = box.read_json("a/summary.json"), sb = box.read_json("b/summary.json");
  for (json* s : {&sa, &sb}) {
    s->erase("timestamp");
    (*s)["config"].erase("out");
    s->erase("input_hash");
  }
  CHECK(sa == sb);
}

TEST_CASE("check runs the property suite") {
  Sandbox box;
  REQUIRE(box.run("check --out c") == 0);
  const json s = box.read_json("c/summary.json");
  CHECK(s["passed"] == true);
  REQUIRE(s["results"].size() == 9);
  for (const auto& r : s["results"]) CHECK(r["pass"] == true);
  CHECK(box.read("stdout.txt").find("PASS  9.") != std::string::npos);
}
