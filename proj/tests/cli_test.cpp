/* Copyright 2026 The Storylens Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"
#include "test_util.hpp"

using nlohmann::json;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout + stderr
};

RunResult run(const std::string& args) {
  const std::string command = std::string(STORYLENS_TOOL) + " " + args + " 2>&1";
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult result;
  char buffer[4096];
  std::size_t n;
  while ((n = fread(buffer, 1, sizeof(buffer), pipe)) > 0) result.output.append(buffer, n);
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

// Writes a minimal corpus plus a benign scripted provider into dir.
struct Fixture {
  test_util::TempDir dir;
  std::string units, profiles, candidates, provider;

  Fixture() {
    units = dir.write("units.jsonl",
                      R"({"book_id":"b","chapter_id":"c","genre":"Detective",)"
                      R"("original_text":"Holmes walked in. Watson waited."})"
                      "\n")
                .string();
    profiles =
        dir.write("profiles.jsonl", R"({"profile_id":"p","plot":"mysteries"})" "\n").string();
    std::string cands;
    for (int r = 1; r <= 3; ++r)
      cands += R"({"candidate_id":"cand)" + std::to_string(r) +
               R"(","book_id":"b","chapter_id":"c","profile_id":"p","text":"Rewrite )" +
               std::to_string(r) + R"( text here.","rank":)" + std::to_string(r) + "}\n";
    candidates = dir.write("candidates.jsonl", cands).string();
    const auto script =
        dir.write("script.jsonl", R"({"match":"","response":"none","mode":"any"})" "\n");
    provider = dir.write("provider.json",
                         R"({"type":"scripted","script":")" + script.string() + R"("})")
                   .string();
  }
};

}  // namespace

TEST_CASE("evaluate writes a JSON report with one row per candidate") {
  Fixture fx;
  const auto out = (fx.dir.path() / "report.json").string();
  const auto result = run("evaluate --units " + fx.units + " --profiles " + fx.profiles +
                          " --candidates " + fx.candidates + " --provider " + fx.provider +
                          " --metrics fidelity,coherence --out " + out + " --deterministic");
  CHECK(result.exit_code == 0);
  const auto report = json::parse(test_util::read_file(out));
  REQUIRE(report.at("per_candidate").size() == 3);
  CHECK(report.at("per_candidate")[0].at("candidate_id") == "cand1");
  CHECK(report.at("per_candidate")[0].at("f_local") == 1.0);
  CHECK(report.at("provenance").at("timestamp") == "1970-01-01T00:00:00Z");
}

TEST_CASE("evaluate twice with --deterministic is byte-identical") {
  Fixture fx;
  const auto out1 = (fx.dir.path() / "r1.json").string();
  const auto out2 = (fx.dir.path() / "r2.json").string();
  const std::string base = "evaluate --units " + fx.units + " --profiles " + fx.profiles +
                           " --candidates " + fx.candidates + " --provider " + fx.provider +
                           " --metrics fidelity --seed 7 --deterministic --out ";
  CHECK(run(base + out1).exit_code == 0);
  CHECK(run(base + out2).exit_code == 0);
  CHECK(test_util::read_file(out1) == test_util::read_file(out2));
}

TEST_CASE("usage and config errors exit with code 2") {
  Fixture fx;
  SUBCASE("missing required flags") {
    CHECK(run("evaluate --units " + fx.units).exit_code == 2);
  }
  SUBCASE("missing candidates file") {
    const auto result = run("evaluate --units " + fx.units + " --profiles " + fx.profiles +
                            " --candidates /nonexistent.jsonl --provider " + fx.provider);
    CHECK(result.exit_code == 2);
  }
  SUBCASE("unknown metric") {
    const auto result = run("evaluate --units " + fx.units + " --profiles " + fx.profiles +
                            " --candidates " + fx.candidates + " --provider " + fx.provider +
                            " --metrics bogus");
    CHECK(result.exit_code == 2);
    CHECK(result.output.find("unknown metric") != std::string::npos);
  }
  SUBCASE("unknown subcommand") {
    CHECK(run("frobnicate").exit_code == 2);
  }
}

TEST_CASE("evaluate --strict exits 1 on row failures") {
  Fixture fx;
  // Satisfaction without a scorer fails per-row.
  const auto result = run("evaluate --units " + fx.units + " --profiles " + fx.profiles +
                          " --candidates " + fx.candidates + " --provider " + fx.provider +
                          " --metrics satisfaction --strict --out " +
                          (fx.dir.path() / "r.json").string());
  CHECK(result.exit_code == 1);
}

TEST_CASE("pairs build emits pairs.jsonl lines") {
  Fixture fx;
  const auto out = (fx.dir.path() / "pairs.jsonl").string();
  const auto result =
      run("pairs build --candidates " + fx.candidates + " --scheme all_pairs --out " + out);
  CHECK(result.exit_code == 0);
  std::istringstream lines(test_util::read_file(out));
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) {
    const auto j = json::parse(line);
    CHECK(j.contains("winner_id"));
    CHECK(j.contains("difficulty"));
    ++count;
  }
  CHECK(count == 3);  // C(3,2)
}

TEST_CASE("eval-model compare reproduces win rates") {
  Fixture fx;
  const auto scores = fx.dir.write(
      "scores.json", R"({"methods":["a","b","c"],"scores":[[3],[2],[1]]})");
  const auto out = (fx.dir.path() / "compare.json").string();
  const auto result = run("eval-model compare --scores " + scores.string() + " --out " + out);
  CHECK(result.exit_code == 0);
  const auto j = json::parse(test_util::read_file(out));
  REQUIRE(j.size() == 3);
  CHECK(j[0].at("method") == "a");
  CHECK(j[0].at("win_rate") == 1.0);
  CHECK(j[1].at("win_rate") == 0.5);
  CHECK(j[2].at("top1_rate") == 0.0);
}

TEST_CASE("report render converts JSON to the markdown table") {
  Fixture fx;
  const auto report_path = (fx.dir.path() / "report.json").string();
  REQUIRE(run("evaluate --units " + fx.units + " --profiles " + fx.profiles +
              " --candidates " + fx.candidates + " --provider " + fx.provider +
              " --metrics fidelity,coherence --deterministic --out " + report_path)
              .exit_code == 0);
  const auto md_path = (fx.dir.path() / "report.md").string();
  CHECK(run("report render --in " + report_path + " --out " + md_path).exit_code == 0);
  const auto md = test_util::read_file(md_path);
  CHECK(md.find("| Candidate | Local Fid. | Global Fid. | Coh. | Sat. |") !=
        std::string::npos);
  CHECK(md.find("cand2") != std::string::npos);
  CHECK(md.find("**Mean**") != std::string::npos);
}

TEST_CASE("eval-model train and score run end to end on scripted embeddings") {
  Fixture fx;
  // Five ranked candidates so every difficulty bin is populated under
  // all_pairs; embeddings come from the scripted hash projection.
  std::string cands;
  for (int r = 1; r <= 5; ++r)
    cands += R"({"candidate_id":"t)" + std::to_string(r) +
             R"(","book_id":"b","chapter_id":"c","profile_id":"p","text":"Training rewrite )" +
             std::to_string(r) + R"(.","rank":)" + std::to_string(r) + "}\n";
  const auto tc = fx.dir.write("train_candidates.jsonl", cands).string();
  const auto model = (fx.dir.path() / "scorer.json").string();
  const auto log = (fx.dir.path() / "train.log").string();
  const auto train_result =
      run("eval-model train --candidates " + tc + " --profiles " + fx.profiles +
          " --provider " + fx.provider + " --epochs 2 --hidden 4 --out " + model + " --log " +
          log);
  CHECK(train_result.exit_code == 0);
  CHECK(json::parse(test_util::read_file(model)).at("feature_layout") == "cat-prod-absdiff");

  // Log lines are valid JSONL with easy-before-hard phase-1 ordering.
  std::istringstream lines(test_util::read_file(log));
  std::string line;
  bool saw_hard_phase1 = false;
  while (std::getline(lines, line)) {
    const auto j = json::parse(line);
    if (j.at("phase") == 1) {
      if (j.at("difficulty") == "hard") saw_hard_phase1 = true;
      if (j.at("difficulty") == "easy") CHECK(!saw_hard_phase1);
    }
  }
  CHECK(saw_hard_phase1);

  const auto scores_out = (fx.dir.path() / "scores.jsonl").string();
  const auto score_result = run("eval-model score --scorer " + model + " --provider " +
                                fx.provider + " --profiles " + fx.profiles +
                                " --candidates " + tc + " --out " + scores_out);
  CHECK(score_result.exit_code == 0);
  std::istringstream score_lines(test_util::read_file(scores_out));
  int rows = 0;
  while (std::getline(score_lines, line)) {
    const auto j = json::parse(line);
    CHECK(j.contains("s_sat"));
    ++rows;
  }
  CHECK(rows == 5);
}
