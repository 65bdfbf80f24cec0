// Copyright 2026 The tofec Authors.
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


#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "tofec/traces.h"

#ifdef TOFEC_CLI_PATH

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(TOFEC_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("tofec_cli_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("cli fit") {
  TempDir t;
  {
    std::ofstream p(t / "p.txt");
    tofec::write_params(p, {20, 20, 10, 15});
  }
  CHECK(run_cli("synth-trace --params " + (t / "p.txt") + " --sizes 0.5,1,1.5,3 --count 2000 -o " +
                (t / "trace.csv")) == 0);
  CHECK(run_cli("fit " + (t / "trace.csv") + " -o " + (t / "fit.txt")) == 0);
  const auto fitted = tofec::read_params_file(t / "fit.txt");
  CHECK(fitted.psi_slope == doctest::Approx(15).epsilon(0.15));

  std::ofstream one(t / "one.csv");
  one << "chunk_size_mb,delay_ms\n";
  for (int i = 0; i < 30; ++i) one << "1," << 50 + i << "\n";
  one.close();
  CHECK(run_cli("fit " + (t / "one.csv")) == 2);
  CHECK(run_cli("fit " + (t / "missing.csv")) == 2);
}

TEST_CASE("cli solve and thresholds") {
  TempDir t;
  {
    std::ofstream p(t / "p.txt");
    tofec::write_params(p, {20, 20, 10, 15});
  }
  const std::string cls = "--params " + (t / "p.txt") + " -L 16 --file-size-mb 3";
  CHECK(run_cli("solve " + cls + " --queue 0.1,1,10 -o " + (t / "q.csv")) == 0);
  std::istringstream q(slurp(t / "q.csv"));
  std::string line;
  std::getline(q, line);
  CHECK(line == "mode,value,class_id,lambda_bar,Q,n,k,r");
  double prev_n = 1e300;
  while (std::getline(q, line)) {
    std::stringstream ss(line);
    std::string cell;
    for (int i = 0; i < 6; ++i) std::getline(ss, cell, ',');
    const double n = std::stod(cell);
    CHECK(n < prev_n);
    prev_n = n;
  }
  CHECK(run_cli("solve " + cls + " --load 16") == 2);
  CHECK(run_cli("solve " + cls + " --load 8 -o " + (t / "l.csv")) == 0);

  CHECK(run_cli("thresholds " + cls + " -o " + (t / "h.csv")) == 0);
  const std::string h = slurp(t / "h.csv");
  CHECK(std::count(h.begin(), h.end(), '\n') == 1 + 13 + 7);
  CHECK(run_cli("thresholds " + cls + " --k-max 1 --r-max 1 -o " + (t / "h1.csv")) == 0);
  const std::string h1 = slurp(t / "h1.csv");
  CHECK(std::count(h1.begin(), h1.end(), '\n') == 1 + 2 + 2);
}

TEST_CASE("cli simulate and sweep") {
  TempDir t;
  const std::string cfg = std::string(TOFEC_SCENARIO_DIR) + "/poisson.json";
  CHECK(run_cli("simulate " + cfg + " --requests-out " + (t / "r1.csv") + " --summary-out " +
                (t / "s1.csv")) == 0);
  CHECK(run_cli("simulate " + cfg + " --requests-out " + (t / "r2.csv") + " --summary-out " +
                (t / "s2.csv")) == 0);
  CHECK(slurp(t / "r1.csv") == slurp(t / "r2.csv"));
  CHECK(slurp(t / "s1.csv") == slurp(t / "s2.csv"));
  CHECK(slurp(t / "s1.csv").rfind("# config: {", 0) == 0);

  CHECK(run_cli("sweep " + cfg + " --capacity-fractions 0.95 --strategies \"static(6,3)\" -o " +
                (t / "ov.csv")) == 1);
  CHECK(run_cli("sweep " + cfg + " --rates 0.02 --strategies tofec --envelope \"\" -o " +
                (t / "one.csv")) == 0);
  const std::string one = slurp(t / "one.csv");
  CHECK(std::count(one.begin(), one.end(), '\n') == 2 + 1 + 1);
  CHECK(run_cli("simulate " + (t / "nope.json")) == 2);
  CHECK(run_cli("bogus") == 2);
}

TEST_CASE("cli encode and decode") {
  TempDir t;
  {
    std::ofstream f(t / "in.bin", std::ios::binary);
    for (int i = 0; i < 3000; ++i) f.put(static_cast<char>(i * 7));
  }
  CHECK(run_cli("encode " + (t / "in.bin") + " -o " + (t / "c.tfec") + " --strip-size 500 -r 2") == 0);
  CHECK(run_cli("decode " + (t / "c.tfec") + " -o " + (t / "out.bin") + " -k 2 --chunks 2,4") == 0);
  CHECK(slurp(t / "in.bin") == slurp(t / "out.bin"));
  CHECK(run_cli("decode " + (t / "c.tfec") + " -o " + (t / "x.bin") + " -k 2 --chunks 2,2") == 2);
}

#endif
