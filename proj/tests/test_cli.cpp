// Copyright 2026 The AmbigNLG Toolkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
};

// Runs the CLI in `cwd`, capturing stdout; stderr is discarded.
Run cli(const std::string& args, const fs::path& cwd) {
  const std::string cmd = "cd '" + cwd.string() + "' && '" + AMBIGNLG_PATH + "' " + args +
                          " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe);
  std::string out;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("ambig_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

const fs::path kMock = fs::path(AMBIG_SOURCE_DIR) / "data" / "mock";

}  // namespace

TEST_CASE("usage errors exit 1") {
  const auto dir = scratch("usage");
  CHECK(cli("--bogus", dir).code == 1);
  CHECK(cli("score --candidates a.txt", dir).code == 1);
  CHECK(cli("eval-suggest --dataset d.jsonl --mode guess", dir).code == 1);
  CHECK(cli("--help", dir).code == 0);
  fs::remove_all(dir);
}

TEST_CASE("score") {
  const auto dir = scratch("score");
  std::ofstream(dir / "c.txt") << "solar panels convert light\n";
  std::ofstream(dir / "r.txt") << "solar panels convert light\n";
  const auto r = cli("score --candidates c.txt --references r.txt", dir);
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["mean_f1"].get<double>() == doctest::Approx(1.0));
  CHECK(cli("score --candidates missing.txt --references r.txt", dir).code == 2);
  fs::remove_all(dir);
}

TEST_CASE("provider failures exit 2") {
  const auto dir = scratch("budget");
  const auto cfg = (kMock / "config.json").string();
  const auto ds = (kMock / "identify_eval.jsonl").string();
  CHECK(cli("eval-identify --config '" + cfg + "' --no-cache --max-calls 0 --icl-k 0 --dataset '" +
                ds + "'",
            dir)
            .code == 2);
  CHECK(cli("eval-mitigation --config '" + cfg + "' --dataset missing.jsonl", dir).code == 2);
  fs::remove_all(dir);
}

TEST_CASE("identification with the oracle script") {
  const auto r = cli("eval-identify --config config.json --mock-script oracle.json --no-cache "
                     "--dataset identify_eval.jsonl --demo-pool demos.jsonl --icl-k 0",
                     kMock);
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["exact_match"].get<double>() == doctest::Approx(1.0));
}
