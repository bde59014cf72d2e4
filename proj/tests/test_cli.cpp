#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "extgraph/cli.hpp"
#include "extgraph/error.hpp"
#include "extgraph/io.hpp"

using namespace extgraph;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream o, e;
  const int code = run_cli(args, o, e);
  return {code, o.str(), e.str()};
}

fs::path fresh(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("extgraph_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir))
    if (entry.is_regular_file()) files[fs::relative(entry.path(), dir).string()] = read_text_file(entry.path().string());
  return files;
}

std::string s(const fs::path& p) { return p.string(); }

}  // namespace

TEST_CASE("config parsing") {
  const auto kv = parse_config("# comment\nmarginal_quantile = 0.9\n\nseed=3 # trailing\nstructure=\"saturated\"\n");
  CHECK(kv.at("marginal-quantile") == "0.9");
  CHECK(kv.at("seed") == "3");
  CHECK(kv.at("structure") == "saturated");
  try {
    parse_config("a=1\nbroken\n");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Parse);
    CHECK(e.line() == 2);
  }
}

TEST_CASE("gen writes data and truth") {
  const fs::path d = fresh("gen");
  Run r = run({"--seed", "5", "gen", "--kind", "scmevm", "--graph", "five", "--n", "300", "--out-dir", s(d / "sc")});
  CHECK(r.code == kExitOk);
  for (int i = 1; i <= 5; ++i) CHECK(fs::exists(d / "sc" / ("site_" + std::to_string(i) + ".csv")));
  const Json truth = read_json_file(s(d / "sc" / "truth.json"));
  CHECK(truth["graph"]["edges"].size() == 6);
  r = run({"gen", "--kind", "gaussian", "--graph", "five", "--n", "200", "--out-dir", s(d / "g")});
  CHECK(r.code == kExitOk);
  const CsvTable t = read_csv(s(d / "g" / "data.csv"));
  CHECK(t.values.rows() == 200);
  CHECK(t.column_ids == std::vector<std::string>{"X1", "X2", "X3", "X4", "X5"});
  CHECK(run({"gen", "--kind", "nonsense", "--out-dir", s(d / "x")}).code == kExitError);
  fs::remove_all(d);
}

TEST_CASE("fit end to end and error reporting") {
  const fs::path d = fresh("fit");
  REQUIRE(run({"gen", "--kind", "gaussian", "--graph", "five", "--n", "3000", "--out-dir", s(d)}).code == 0);
  write_json_file(s(d / "graph.json"), read_json_file(s(d / "truth.json"))["graph"]);
  Run r = run({"fit", "--input", s(d / "data.csv"), "--structure", "graphical:" + s(d / "graph.json"), "--method",
               "three", "--out-dir", s(d / "fit")});
  CHECK(r.code == kExitOk);
  const Json m = read_json_file(s(d / "fit" / "model.json"));
  CHECK(m["schema"] == "scmevm-v1");
  CHECK(m["fits"].size() == 5);
  CHECK(fs::exists(d / "fit" / "convergence.csv"));
  CHECK(fs::exists(d / "fit" / "qq_site_5.csv"));
  CHECK(read_json_file(s(d / "fit" / "fit_sidecar.json"))["seed"] == 1);

  r = run({"fit", "--input", s(d / "missing.csv"), "--out-dir", s(d / "x")});
  CHECK(r.code == kExitError);
  CHECK(Json::parse(r.err)["kind"] == "io");

  write_text_file(s(d / "bad.csv"), "1,2,3\n4,5,6\n");
  r = run({"fit", "--input", s(d / "bad.csv"), "--out-dir", s(d / "x")});
  CHECK(r.code == kExitError);
  const Json e = Json::parse(r.err);
  CHECK(e["kind"] == "parse");
  CHECK(e["line"] == 1);

  // too few rows for any site: partial model, exit 2
  write_text_file(s(d / "short.csv"), csv_string({"a", "b", "c"}, read_csv(s(d / "data.csv")).values.topRows(120).leftCols(3)));
  r = run({"fit", "--input", s(d / "short.csv"), "--marginal-quantile", "0.8", "--out-dir", s(d / "short")});
  CHECK(r.code == kExitPartial);
  CHECK(read_json_file(s(d / "short" / "model.json"))["partial"] == true);
  fs::remove_all(d);
}

TEST_CASE("select-graph outputs") {
  const fs::path d = fresh("sel");
  REQUIRE(run({"gen", "--kind", "gaussian", "--graph", "empty", "--d", "5", "--n", "4000", "--out-dir", s(d)}).code == 0);
  Run r = run({"select-graph", "--input", s(d / "data.csv"), "--rho-grid", "0.3", "--out-dir", s(d / "one")});
  CHECK(r.code == kExitOk);
  const Json rep = read_json_file(s(d / "one" / "selection_report.json"));
  CHECK(rep["per_rho"].size() == 1);
  CHECK(read_json_file(s(d / "one" / "graph.json"))["edges"].empty());
  CHECK(fs::exists(d / "one" / "weighted_rho_1.csv"));
  fs::remove_all(d);
}

TEST_CASE("simulate is reproducible") {
  const fs::path d = fresh("sim");
  REQUIRE(run({"gen", "--kind", "gaussian", "--graph", "five", "--n", "3000", "--out-dir", s(d)}).code == 0);
  REQUIRE(run({"fit", "--input", s(d / "data.csv"), "--out-dir", s(d / "fit")}).code == 0);
  for (const char* mode : {"tail", "unconditional"}) {
    for (const char* sub : {"a", "b"}) {
      const Run r = run({"--seed", "9", "simulate", "--model", s(d / "fit" / "model.json"), "--n", "500", "--mode",
                         mode, "--out-dir", s(d / (std::string(mode) + sub))});
      CHECK(r.code == kExitOk);
    }
    CHECK(snapshot(d / (std::string(mode) + "a")) == snapshot(d / (std::string(mode) + "b")));
  }
  const CsvTable t = read_csv(s(d / "taila" / "samples.csv"));
  CHECK(t.values.rows() == 500);
  CHECK(t.column_ids == read_csv(s(d / "data.csv")).column_ids);
  const Json side = read_json_file(s(d / "taila" / "simulate_sidecar.json"));
  CHECK(side.contains("effective_sample_size"));
  CHECK(side["seed"] == 9);
  fs::remove_all(d);
}

TEST_CASE("measure and bootstrap") {
  const fs::path d = fresh("mes");
  REQUIRE(run({"gen", "--kind", "comonotone", "--graph", "empty", "--d", "3", "--n", "5000", "--out-dir", s(d)}).code == 0);
  Run r = run({"measure", "--input", s(d / "data.csv"), "--measure", "eta", "--u-grid", "0.8,0.9,0.95", "--out-dir",
               s(d / "m")});
  CHECK(r.code == kExitOk);
  std::istringstream in(read_text_file(s(d / "m" / "measure.csv")));
  std::string line;
  std::getline(in, line);
  CHECK(line == "j,k,measure,u,estimate,stderr");
  int rows = 0;
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::stringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) f.push_back(c);
    REQUIRE(f.size() == 6);
    CHECK(f[2] == "eta");
    CHECK(std::stod(f[4]) == doctest::Approx(1.0).epsilon(0.01));
    ++rows;
  }
  CHECK(rows == 9);
  r = run({"bootstrap", "--input", s(d / "data.csv"), "--n-boot", "5", "--u-grid", "0.9", "--out-dir", s(d / "b")});
  CHECK(r.code == kExitOk);
  CHECK(fs::exists(d / "b" / "bootstrap.csv"));
  fs::remove_all(d);
}

TEST_CASE("reproduce") {
  const fs::path d = fresh("rep");
  Run r = run({"reproduce", "--study", "nope", "--out-dir", s(d)});
  CHECK(r.code == kExitError);
  const Json e = Json::parse(r.err);
  CHECK(e["known"].size() == 4);
  r = run({"reproduce", "--study", "s41_bias", "--reps", "2", "--out-dir", s(d)});
  CHECK(r.code == kExitOk);
  CHECK(fs::exists(d / "s41_bias.csv"));
  fs::remove_all(d);
}

TEST_CASE("config file values yield to flags") {
  const fs::path d = fresh("cfg");
  write_text_file(s(d / "run.cfg"), "n = 150\nkind = gaussian\ngraph = five\n");
  Run r = run({"--config", s(d / "run.cfg"), "gen", "--n", "120", "--out-dir", s(d / "o")});
  CHECK(r.code == kExitOk);
  CHECK(read_csv(s(d / "o" / "data.csv")).values.rows() == 120);
  write_text_file(s(d / "broken.cfg"), "n = 150\nnot a pair\n");
  r = run({"--config", s(d / "broken.cfg"), "gen", "--out-dir", s(d / "p")});
  CHECK(r.code == kExitError);
  CHECK(Json::parse(r.err)["line"] == 2);
  fs::remove_all(d);
}

TEST_CASE("thread count does not change results") {
  const fs::path d = fresh("thr");
  REQUIRE(run({"gen", "--kind", "gaussian", "--graph", "five", "--n", "2000", "--out-dir", s(d)}).code == 0);
  REQUIRE(run({"--threads", "1", "fit", "--input", s(d / "data.csv"), "--out-dir", s(d / "t1")}).code == 0);
  REQUIRE(run({"--threads", "3", "fit", "--input", s(d / "data.csv"), "--out-dir", s(d / "t3")}).code == 0);
  CHECK(snapshot(d / "t1") == snapshot(d / "t3"));
  fs::remove_all(d);
}

TEST_CASE("binary exit codes") {
  const char* exe = std::getenv("EXTGRAPH_CLI");
  if (exe == nullptr) return;
  const fs::path d = fresh("bin");
  const std::string cmd = std::string(exe) + " fit --input " + s(d / "none.csv") + " --out-dir " + s(d / "o") +
                          " 2> " + s(d / "err.json");
  const int status = std::system(cmd.c_str());
  CHECK(WEXITSTATUS(status) == 1);
  CHECK(Json::parse(read_text_file(s(d / "err.json")))["kind"] == "io");
  fs::remove_all(d);
}
