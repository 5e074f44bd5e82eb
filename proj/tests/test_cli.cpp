#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "promo/report.hpp"

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(PROMOLANG_BIN) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("promo_cli_" + std::to_string(rand()))) {
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("synth is byte-identical for a fixed seed") {
  TempDir a, b;
  REQUIRE(run("synth --n 50 --seed 7 --out " + a.path.string()) == 0);
  REQUIRE(run("synth --n 50 --seed 7 --out " + b.path.string()) == 0);
  CHECK(promo::read_file(a / "corpus.jsonl") == promo::read_file(b / "corpus.jsonl"));
  CHECK(fs::exists(a / "manifest.json"));

  TempDir c;
  REQUIRE(run("synth --n 50 --seed 8 --out " + c.path.string()) == 0);
  CHECK(promo::read_file(a / "corpus.jsonl") != promo::read_file(c / "corpus.jsonl"));
}

TEST_CASE("analyze emits a feature row per document") {
  TempDir d;
  REQUIRE(run("synth --n 5 --seed 3 --out " + d.path.string()) == 0);
  REQUIRE(run("analyze --corpus " + (d / "corpus.jsonl") + " --out " + d.path.string()) ==
          0);
  std::ifstream features(d / "features.csv");
  REQUIRE(features.good());
  std::string line;
  std::size_t rows = 0;
  std::getline(features, line);
  CHECK(line.rfind("doc_id,promo_fraction", 0) == 0);
  while (std::getline(features, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 5);
}

TEST_CASE("regress runs end to end on analyzed features") {
  TempDir d;
  REQUIRE(run("synth --n 400 --seed 3 --beta 60 --out " + d.path.string()) == 0);
  REQUIRE(run("analyze --corpus " + (d / "corpus.jsonl") + " --out " + d.path.string()) ==
          0);
  {
    std::ofstream spec(d / "model.spec");
    spec << "family=logit\noutcome=funded\npredictors=promo_fraction\n"
         << "margins_focal=promo_fraction\ngrid=0,0.01,0.02,0.03\n";
  }
  REQUIRE(run("regress --features " + (d / "features.csv") + " --spec " +
              (d / "model.spec") + " --out " + d.path.string() + " --chart") == 0);
  CHECK(fs::exists(d / "fit.csv"));
  CHECK(fs::exists(d / "margins.csv"));
  CHECK(fs::exists(d / "margins.html"));
}

TEST_CASE("experiment produces one drop-fraction row per level") {
  TempDir d;
  REQUIRE(run("synth --n 12 --seed 5 --out " + d.path.string()) == 0);
  REQUIRE(run("experiment --corpus " + (d / "corpus.jsonl") + " --synonyms " + DATA_DIR +
              "/synonyms.tsv --ratings " + DATA_DIR + "/ratings.csv" +
              " --levels 25,50,75,100 --trials 20 --seed 4 --out " + d.path.string()) == 0);
  std::ifstream table(d / "drop_fractions.csv");
  REQUIRE(table.good());
  std::string line;
  std::size_t rows = 0;
  while (std::getline(table, line))
    if (!line.empty() && line[0] != '#' && line[0] != 'l') ++rows;
  CHECK(rows == 4);
}

TEST_CASE("exit codes distinguish usage and data errors") {
  CHECK(run("definitely-not-a-subcommand") == 1);
  CHECK(run("analyze") == 1);  // missing required --corpus
  TempDir d;
  CHECK(run("analyze --corpus /nonexistent/corpus.jsonl --out " + d.path.string()) == 2);
}
