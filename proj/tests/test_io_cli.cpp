#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "relay_harvest/scenario_io.hpp"
#include "relay_harvest/solver.hpp"

using namespace relay_harvest;
namespace fs = std::filesystem;

namespace {

std::string data_path(const std::string& name) { return std::string(RH_DATA_DIR) + "/" + name; }

int run_cli(const std::string& args) {
  const std::string cmd = std::string(RH_CLI_PATH) + " " + args + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

fs::path temp_dir() {
  auto p = fs::temp_directory_path() / "relay_harvest_test";
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("scenario JSON round trip is stable") {
  const auto text = read_file(data_path("fig5.json"));
  auto s = scenario_from_json(text);
  const auto emitted = scenario_to_json(s);
  auto s2 = scenario_from_json(emitted);
  CHECK(scenario_to_json(s2) == emitted);
  CHECK(s.gains.sr1 == 2.0);
  CHECK(s.buffer_capacity == kInf);
  CHECK(s.relay_count == 2);
}

TEST_CASE("unknown fields are rejected") {
  CHECK_THROWS_AS(scenario_from_json(R"({"gains":{"sr1":1,"r1d":1},"epochs":[{"tau":1}],)"
                                     R"("relays":1,"extra":1})"),
                  SchemaError);
  CHECK_THROWS_AS(scenario_from_json(R"({"gains":{"sr1":1,"r1d":1,"bogus":2},)"
                                     R"("epochs":[{"tau":1}],"relays":1})"),
                  SchemaError);
}

TEST_CASE("Bmax accepts numbers and the string inf") {
  auto s = scenario_from_json(R"({"gains":{"sr1":1,"r1d":1},)"
                              R"("epochs":[{"tau":1,"Es":1,"Er1":1}],"relays":1,"Bmax":0.25})");
  CHECK(s.buffer_capacity == 0.25);
  auto t = scenario_from_json(R"({"gains":{"sr1":1,"r1d":1},)"
                              R"("epochs":[{"tau":1,"Es":1,"Er1":1}],"relays":1,"Bmax":"inf"})");
  CHECK(t.buffer_capacity == kInf);
}

TEST_CASE("solution document round trip reproduces the throughput") {
  auto s = scenario_from_json(read_file(data_path("symmetric_single.json")));
  auto sol = solve(s);
  const auto text = solution_to_json(sol, s);
  auto back = solution_from_json(text);
  CHECK(std::abs(back.solution.throughput - sol.throughput) <=
        1e-10 * std::max(1.0, sol.throughput));
  CHECK(std::abs(policy_throughput(back.solution.policy) - sol.throughput) <=
        1e-10 * std::max(1.0, sol.throughput));
}

TEST_CASE("cli solve writes a certified result and is byte-stable") {
  const auto dir = temp_dir();
  const auto out1 = (dir / "sym1.json").string();
  const auto out2 = (dir / "sym2.json").string();
  CHECK(run_cli("solve " + data_path("symmetric_single.json") + " -o " + out1) == 0);
  CHECK(run_cli("solve " + data_path("symmetric_single.json") + " -o " + out2) == 0);
  const auto a = read_file(out1);
  CHECK(a == read_file(out2));
  CHECK(a.find("throughput_nats") != std::string::npos);
  auto loaded = solution_from_json(a);
  CHECK(loaded.solution.throughput == doctest::Approx(std::log(2.0)).epsilon(1e-6));
}

TEST_CASE("cli solve rejects malformed scenarios with exit 1") {
  const auto dir = temp_dir();
  const auto bad = (dir / "bad.json").string();
  write_file(bad, "{\"gains\": 3}");
  CHECK(run_cli("solve " + bad) == 1);
}

TEST_CASE("cli verify accepts a fresh result and rejects a tampered one") {
  const auto dir = temp_dir();
  const auto out = (dir / "res.json").string();
  REQUIRE(run_cli("solve " + data_path("fig5.json") + " --modes sr -o " + out) == 0);
  CHECK(run_cli("verify " + out) == 0);
  // inflate the stored throughput: objective mismatch, exit 3
  auto text = read_file(out);
  const auto pos = text.find("\"throughput_nats\": ");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, std::string("\"throughput_nats\": ").size(),
               "\"throughput_nats\": 9");
  const auto tampered = (dir / "tampered.json").string();
  write_file(tampered, text);
  CHECK(run_cli("verify " + tampered) == 3);
}

TEST_CASE("cli sweep emits csv to stdout") {
  const auto dir = temp_dir();
  const auto spec = (dir / "spec.json").string();
  write_file(spec, std::string("{\"base_path\": \"") + data_path("fig5.json") +
                       "\", \"param\": {\"arrival\": {\"node\": \"r2\", \"epoch\": 1}}, " +
                       "\"values\": [0.6], \"mode_sets\": [[\"sr_i\", \"sr_ii\"]]}");
  const std::string out = (dir / "sweep.csv").string();
  const std::string cmd = std::string(RH_CLI_PATH) + " sweep " + spec + " > " + out + " 2>/dev/null";
  REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
  const auto csv = read_file(out);
  CHECK(csv.rfind("value,mode_set,", 0) == 0);
  CHECK(csv.find("certified") != std::string::npos);
}

TEST_CASE("mode flags parse the documented shorthands") {
  CHECK(parse_mode_flag("sr") == ModeSet::sr());
  CHECK(parse_mode_flag("bc+sr") == ModeSet::sr().with(Mode::Broadcast));
  CHECK(parse_mode_flag("mac+sr") == ModeSet::sr().with(Mode::MultiAccess));
  CHECK(parse_mode_flag("all") == ModeSet::all());
  CHECK_THROWS_AS(parse_mode_flag("bogus"), SchemaError);
}

TEST_CASE("fixture scenarios validate") {
  for (const char* name : {"fig3_eh.json", "fig3_br.json", "fig5.json", "fig6.json"}) {
    auto s = scenario_from_json(read_file(data_path(name)));
    CHECK(s.validated);
  }
}
