#include "gaitsom/text_io.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cstdlib>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int status;
  std::string out;
  std::string err;
};

Outcome cli(const std::string& args, const fs::path& scratch) {
  const auto out = scratch / "stdout.txt";
  const auto err = scratch / "stderr.txt";
  const std::string cmd = std::string("\"") + GAITSOM_CLI + "\" " + args + " >\"" + out.string() + "\" 2>\"" + err.string() + "\"";
  const int raw = std::system(cmd.c_str());
  const int status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return {status, gaitsom::read_text_file(out), gaitsom::read_text_file(err)};
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("stage-by-stage commands chain through their outputs") {
  const auto dir = oracle::temp_dir("cli_chain");
  const auto d = dir.string();

  auto r = cli("synth --out \"" + d + "/data\" -n 5 --seed 4", dir);
  REQUIRE_MESSAGE(r.status == 0, r.err);
  CHECK(fs::exists(dir / "data/dataset.csv"));
  CHECK(fs::exists(dir / "data/config.json"));

  r = cli("cwt --input \"" + d + "/data/dataset.csv\" --out \"" + d + "/scal\" --no-pgm", dir);
  REQUIRE_MESSAGE(r.status == 0, r.err);
  CHECK(fs::exists(dir / "scal/index.csv"));
  CHECK_FALSE(fs::exists(dir / "scal/Normal-01_hip-right.pgm"));

  r = cli("features --input \"" + d + "/scal\" --out \"" + d + "/feat\"", dir);
  REQUIRE_MESSAGE(r.status == 0, r.err);
  CHECK(r.out.find("length 320") != std::string::npos);

  r = cli("train --input \"" + d + "/feat/features.csv\" --out \"" + d + "/map\" --map 4x4 --epochs 6 --seed 4", dir);
  REQUIRE_MESSAGE(r.status == 0, r.err);
  for (const char* f : {"som.json", "umatrix.csv", "umatrix.pgm", "clusters.csv", "attraction.csv", "bmu.csv"}) {
    CHECK_MESSAGE(fs::exists(dir / "map" / f), f);
  }

  r = cli("eval --input \"" + d + "/feat/features.csv\" --out \"" + d + "/loo\" --map 4x4 --epochs 6", dir);
  REQUIRE_MESSAGE(r.status == 0, r.err);
  CHECK(fs::exists(dir / "loo/report.json"));
  CHECK(r.out.find("kappa") != std::string::npos);

  r = cli("eval --input \"" + d + "/feat/features.csv\" --model \"" + d + "/map/som.json\" --test \"" + d +
              "/feat/features.csv\" --out \"" + d + "/test\"",
          dir);
  REQUIRE_MESSAGE(r.status == 0, r.err);
  CHECK(fs::exists(dir / "test/confusion.csv"));
}

TEST_CASE("run with a config file and flag overrides") {
  const auto dir = oracle::temp_dir("cli_run");
  gaitsom::write_text_file(dir / "cfg.json", R"({"seed": 2, "synth": {"preset": "normal_vs_spastic", "n_subjects": 4},
    "som": {"epochs": 5}})");
  const auto r = cli("run --config \"" + (dir / "cfg.json").string() + "\" --out \"" + (dir / "out").string() +
                         "\" --map 3x3 --no-loocv --no-pgm",
                     dir);
  REQUIRE_MESSAGE(r.status == 0, r.err);
  CHECK(r.out.find("subjects: 8") != std::string::npos);
  const auto echoed = gaitsom::read_text_file(dir / "out/config.json");
  CHECK(echoed.find("\"rows\": 3") != std::string::npos);
  CHECK(echoed.find("\"epochs\": 5") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "out/report.json"));
  CHECK_FALSE(fs::exists(dir / "out/umatrix.pgm"));
}

TEST_CASE("failures exit nonzero with the stage in the message") {
  const auto dir = oracle::temp_dir("cli_fail");
  gaitsom::write_text_file(dir / "bad.csv", "subject_id,label,joint,side,pct,angle_deg\ns1,Normal,hip,right,0,nan\n");

  auto r = cli("cwt --input \"" + (dir / "bad.csv").string() + "\" --out \"" + (dir / "o").string() + "\"", dir);
  CHECK(r.status != 0);
  CHECK(r.err.rfind("gaitsom: cwt: ", 0) == 0);

  r = cli("run --input \"" + (dir / "bad.csv").string() + "\" --out \"" + (dir / "r").string() + "\"", dir);
  CHECK(r.status != 0);
  CHECK(r.err.find("gaitsom: ingest: ") != std::string::npos);
  CHECK(fs::exists(dir / "r/FAILED"));

  r = cli("train --input \"" + (dir / "bad.csv").string() + "\" --out \"" + (dir / "t").string() + "\" --map 7", dir);
  CHECK(r.status != 0);
  CHECK(r.err.find("ROWSxCOLS") != std::string::npos);

  r = cli("synth --out \"" + (dir / "s").string() + "\" --preset unknown", dir);
  CHECK(r.status != 0);

  r = cli("--version", dir);
  CHECK(r.status == 0);
  CHECK(r.out.find("gaitsom 1.0.0") != std::string::npos);
}

}
