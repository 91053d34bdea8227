#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hrtool_cli.hpp"

using json = nlohmann::ordered_json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> words{"hrtool"};
  for (std::string w; in >> w;) words.push_back(w);
  std::vector<char*> argv;
  for (auto& w : words) argv.push_back(w.data());
  std::ostringstream out, err;
  const int code = hrtool::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

json run_json(const std::string& line) {
  auto j = json::parse(run(line).out);
  j.erase("timing_ms");
  return j;
}

std::string trim(std::string s) {
  const auto a = s.find_first_not_of(" \t"), b = s.find_last_not_of(" \t");
  return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

// Structural equality; floating-point leaves agree to 1e-10 relative.
void compare(const json& got, const json& want, const std::string& path) {
  INFO("at " << path);
  if (want.is_number_float() || (want.is_number() && got.is_number_float())) {
    REQUIRE(got.is_number());
    const double g = got.get<double>(), w = want.get<double>();
    CHECK(std::abs(g - w) <= 1e-10 * std::max(1.0, std::abs(w)));
    return;
  }
  REQUIRE(got.type() == want.type());
  if (want.is_object()) {
    REQUIRE(got.size() == want.size());
    for (auto it = want.begin(); it != want.end(); ++it) {
      REQUIRE(got.contains(it.key()));
      compare(got[it.key()], it.value(), path + "." + it.key());
    }
  } else if (want.is_array()) {
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < want.size(); ++i) compare(got[i], want[i], path + "[" + std::to_string(i) + "]");
  } else {
    CHECK(got == want);
  }
}

std::vector<std::pair<std::string, std::string>> golden_cases() {
  std::ifstream in(std::string(GOLDEN_DIR) + "/cases.txt");
  std::vector<std::pair<std::string, std::string>> v;
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '#') continue;
    const auto bar = line.find('|');
    v.emplace_back(trim(line.substr(0, bar)), trim(line.substr(bar + 1)));
  }
  return v;
}

}  // namespace

TEST_CASE("golden reports", "[cli]") {
  const auto cases = golden_cases();
  REQUIRE(cases.size() >= 21);
  std::set<std::string> commands;
  for (const auto& [name, args] : cases) {
    INFO(name << ": hrtool " << args);
    const auto r = run(args);
    REQUIRE(r.code == 0);
    auto got = json::parse(r.out);
    CHECK(got["timing_ms"].is_number_integer());
    got.erase("timing_ms");
    std::ifstream f(std::string(GOLDEN_DIR) + "/" + name + ".json");
    REQUIRE(f.good());
    compare(got, json::parse(f), name);
    commands.insert(got["command"].get<std::string>());
  }
  // One fixture per leaf command.
  CHECK(commands.size() == 21);
}

TEST_CASE("report schema", "[cli]") {
  const auto j = json::parse(run("constants hardy-rellich --dim 3 --alpha 0").out);
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  CHECK(keys == std::vector<std::string>{"schema_version", "command", "inputs", "results", "checks", "timing_ms"});
  CHECK(j["schema_version"] == "1.0");
  CHECK(j["results"]["value"]["exact"] == "25/36");
  CHECK(run_json("constants hardy-rellich --dim 3 --alpha 0 --arithmetic double")["results"]["value"]["exact"].is_null());
}

TEST_CASE("exit codes", "[cli]") {
  CHECK(run("gamma --dim 5 --alpha 1/2 --expect gamma=27/16").code == 0);
  CHECK(run("gamma --dim 5 --alpha 0.5 --expect gamma=1.6875").code == 0);
  const auto bad = run("gamma --dim 5 --alpha 1/2 --expect gamma=1");
  CHECK(bad.code == 1);
  CHECK(json::parse(bad.out)["checks"][0]["pass"] == false);
  CHECK(run("sweep hardy1d --eps 0.1,0.01").code == 1);
  CHECK(run("gamma --dim 1 --alpha 0").code == 2);
  CHECK(run("gamma --dim 3 --alpha x").code == 2);
  CHECK(run("gamma --dim 3 --frobnicate").code == 2);
  CHECK(run("constants hardy-rellich --dim 3 --domain cap:4").code == 2);
  CHECK(run("constants hardy-rellich --dim 3 --lambda only:5").code == 2);
  CHECK(run("spectrum cap --dim 3 --theta0 1 --domain hemisphere").code == 2);
  CHECK(run("coeffs punctured-ball --dim 3 --domain hemisphere").code == 2);
  CHECK(run("gamma --dim 3 --expect nosuchkey=1").code == 2);
  const auto usage = run("gamma --dim 3 --alpha x");
  CHECK(usage.err.find("Usage") != std::string::npos);
  CHECK(run("--help").code == 0);
  CHECK(run("").code == 2);
}

TEST_CASE("csv and markdown renderings", "[cli]") {
  const auto csv = run("--format csv table weight-free --dims 3..5");
  CHECK(csv.code == 0);
  CHECK(csv.out.find("timing") == std::string::npos);
  CHECK(csv.out.find("25/36") != std::string::npos);
  CHECK(std::count(csv.out.begin(), csv.out.end(), '\n') >= 4);

  const auto md = run("--format md spectrum sphere --dim 3 --count 3");
  CHECK(md.code == 0);
  CHECK(md.out.find("| ") != std::string::npos);
  CHECK(md.out.find("---") != std::string::npos);
  CHECK(md.out.find("timing") == std::string::npos);

  ::setenv("HARDY_RELLICH_FORMAT", "csv", 1);
  const auto env = run("gamma --dim 4 --alpha 0");
  ::unsetenv("HARDY_RELLICH_FORMAT");
  CHECK(env.out.front() != '{');
  CHECK(run("gamma --dim 4 --alpha 0").out.front() == '{');
}

TEST_CASE("config files preset options", "[cli]") {
  const auto path = std::filesystem::temp_directory_path() / "hrtool_test.cfg";
  std::ofstream(path) << "dim=5\nalpha=1/2\n";
  const auto j = run_json("--config " + path.string() + " gamma");
  CHECK(j["results"]["gamma"]["exact"] == "27/16");
  const auto k = run_json("--config " + path.string() + " gamma --dim 4");
  CHECK(k["inputs"]["dim"] == 4);
  std::filesystem::remove(path);
}

TEST_CASE("reports are reproducible byte for byte", "[cli]") {
  const std::string cmd = "verify inequality --id HR --dim 4 --alpha 1 --domain sphere --trials 16";
  const auto a = run_json(cmd + " --seed 5 --threads 1").dump();
  const auto b = run_json(cmd + " --seed 5 --threads 4").dump();
  CHECK(a.size() > 0);
  // threads is echoed in the inputs; the results must match.
  CHECK(json::parse(a)["results"] == json::parse(b)["results"]);
  CHECK(run_json(cmd + " --seed 5 --threads 2").dump() == run_json(cmd + " --seed 5 --threads 2").dump());
  CHECK(json::parse(a)["results"] != run_json(cmd + " --seed 6")["results"]);
}
