#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "cli_config.hpp"
#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("dlab_cli_tests_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Run run(const std::string& args, const std::string& env = "") {
  const fs::path err = scratch() / "stderr.txt";
  const std::string cmd = env + (env.empty() ? "" : " ") + "\"" DLAB_CLI_PATH "\" " + args + " 2>\"" +
                          err.string() + "\"";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = slurp(err);
  return r;
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  f << text;
}

}  // namespace

TEST_CASE("cli: config text parsing") {
  const auto kv = dlab_cli::parse_config_text("# c\nM = 10\n--N=20  # trailing\n\n");
  REQUIRE(kv.size() == 2);
  CHECK(kv[0] == std::make_pair(std::string("M"), std::string("10")));
  CHECK(kv[1] == std::make_pair(std::string("N"), std::string("20")));
  CHECK_THROWS_AS(dlab_cli::parse_config_text("M 10\n"), dlab_cli::ConfigError);
  CHECK_THROWS_AS(dlab_cli::parse_config_text("M =\n"), dlab_cli::ConfigError);
  CHECK_THROWS_AS(dlab_cli::parse_config_text("M = 1\nM = 2\n"), dlab_cli::ConfigError);
  CHECK(dlab_cli::expand_config({"window", "--M", "3"}) ==
        std::vector<std::string>{"window", "--M", "3"});
  CHECK_THROWS_AS(dlab_cli::expand_config({"window", "--config"}), dlab_cli::ConfigError);
}

TEST_CASE("cli: window") {
  const Run r = run("window --M 1e6 --N 1e8");
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["command"] == "window");
  CHECK(j["X"].get<double>() == 1e14);
  CHECK(j.contains("Q_lo"));
}

TEST_CASE("cli: usage errors") {
  CHECK(run("").code == 1);
  CHECK(run("nonsense").code == 1);
  CHECK(run("window --M 10").code == 1);
  const Run bad = run("window --M 1.5e0 --N -3");
  CHECK(bad.code == 1);
  CHECK(bad.err.find("error") != std::string::npos);
  CHECK(run("discrepancy --M 2.5 --N 10 --Q 3").code == 1);
  CHECK(run("--help").code == 0);
}

TEST_CASE("cli: precondition and tolerance exit codes") {
  CHECK(run("bdh --N 50 --Q-max 60").code == 2);
  CHECK(run("poisson-check --M 100 --q 7 --H 0.001").code == 2);
  const Run sw = run("sw-check --N 200 --kind moebius --q-max 5 --tol 1e-300");
  CHECK(sw.code == 3);
  CHECK(!sw.out.empty());
  CHECK(run("sw-check --N 200 --kind moebius --q-max 5").code == 0);
  CHECK(run("dispersion --N 40 --M 30 --Q 8 --tol -1").code == 3);
}

TEST_CASE("cli: config file with flag precedence") {
  const fs::path cfg = scratch() / "run.cfg";
  write(cfg, "command = discrepancy\nM = 20\nN = 30\nQ = 5\nbeta = sign\nseed = 4\n");
  const Run a = run("--config \"" + cfg.string() + "\"");
  REQUIRE(a.code == 0);
  const json ja = json::parse(a.out);
  CHECK(ja["command"] == "discrepancy");
  CHECK(ja["M"] == 20);
  CHECK(ja["beta"] == "sign");
  const Run b = run("discrepancy --config \"" + cfg.string() + "\" --Q 7");
  REQUIRE(b.code == 0);
  CHECK(json::parse(b.out)["Q"] == 7);
  const Run direct = run("discrepancy --M 20 --N 30 --Q 5 --beta sign --seed 4");
  CHECK(direct.out == a.out);

  write(cfg, "M = 20\nM = 21\n");
  CHECK(run("window --config \"" + cfg.string() + "\" --N 5").code == 1);
  CHECK(run("window --config /nonexistent.cfg").code == 1);
}

TEST_CASE("cli: sequence file input") {
  const std::string file = std::string(DLAB_TEST_DATA_DIR) + "/sample_sequence.txt";
  const Run ok = run("discrepancy --M 4 --N 10 --Q 3 --beta-file \"" + file + "\"");
  REQUIRE(ok.code == 0);
  CHECK(json::parse(ok.out)["beta"] == "file");
  const Run strict = run("discrepancy --M 4 --N 10 --Q 3 --order 1 --beta-file \"" + file + "\"");
  CHECK(strict.code == 1);
  CHECK(strict.err.find("13") != std::string::npos);
  CHECK(run("discrepancy --M 4 --N 10 --Q 3 --beta-file /nonexistent").code == 1);
}

TEST_CASE("cli: table limit from the environment") {
  CHECK(run("discrepancy --M 10 --N 1000 --Q 3", "DISPERSION_LAB_TABLE_LIMIT=100").code == 1);
  CHECK(run("discrepancy --M 10 --N 40 --Q 3", "DISPERSION_LAB_TABLE_LIMIT=100").code == 0);
  CHECK(run("titchmarsh --X 1e4", "DISPERSION_LAB_TABLE_LIMIT=1000").code == 1);
  CHECK(run("window --M 10 --N 10", "DISPERSION_LAB_TABLE_LIMIT=abc").code == 0);
  CHECK(run("discrepancy --M 10 --N 40 --Q 3", "DISPERSION_LAB_TABLE_LIMIT=abc").code == 1);
}

TEST_CASE("cli: csv, manifest and replay") {
  const fs::path csv = scratch() / "d.csv";
  const fs::path man = scratch() / "d.json";
  const Run r = run("discrepancy --M 16 --N 40 --Q 6 --beta random --seed 9 --csv \"" + csv.string() +
                    "\" --manifest \"" + man.string() + "\" --workers 3");
  REQUIRE(r.code == 0);
  const std::string table = slurp(csv);
  CHECK(table.rfind("q,E,abs_E\r\n", 0) == 0);
  CHECK(table.find("Delta,,") != std::string::npos);

  const json m = json::parse(slurp(man));
  CHECK(m["tool"] == "dlab");
  CHECK(m["command"] == "discrepancy");
  CHECK(m["workers"] == 3);
  CHECK(m["exit_code"] == 0);
  CHECK(m["params"]["seed"] == "9");
  CHECK(m["stdout_sha256"].get<std::string>().size() == 64);
  CHECK(m["csv_sha256"].get<std::string>().size() == 64);
  for (const auto& a : m["args"]) CHECK(a.get<std::string>().find("--csv") == std::string::npos);

  const Run rep = run("replay \"" + man.string() + "\" --workers 2");
  CHECK(rep.code == 0);
  const json jr = json::parse(rep.out);
  CHECK(jr["match"] == true);
  CHECK(jr["replayed"] == "discrepancy");

  json tampered = m;
  tampered["stdout_sha256"] = std::string(64, '0');
  write(man, tampered.dump());
  CHECK(run("replay \"" + man.string() + "\"").code == 3);
  write(man, "{not json");
  CHECK(run("replay \"" + man.string() + "\"").code == 1);
}

TEST_CASE("cli: output does not depend on the worker count") {
  for (const char* args : {"dispersion --N 60 --M 40 --Q 10 --beta random --seed 2",
                           "kloosterman --c-max 25", "titchmarsh --X 1e4"}) {
    const Run one = run(std::string(args) + " --workers 1");
    const Run four = run(std::string(args) + " --workers 4");
    REQUIRE(one.code == 0);
    CHECK(one.out == four.out);
  }
}
