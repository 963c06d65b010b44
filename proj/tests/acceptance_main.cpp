// Acceptance gate: runs every verification criterion at its stated
// tolerance and prints one pass/fail line per criterion. Exits nonzero on
// any failure. Criterion 10 invokes the CLI twice and compares report
// bytes.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "recpol/acceptance.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool run_replicate_determinism(std::uint64_t seed, std::string& detail) {
  const std::string cli = RECPOL_CLI_PATH;
  const std::string base = "acceptance_replicate_";
  const std::string out1 = base + "1.json";
  const std::string out2 = base + "2.json";
  for (const std::string& out : {out1, out2}) {
    const std::string cmd = "\"" + cli + "\" replicate --seed " +
                            std::to_string(seed) + " --out " + out +
                            " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    if (rc != 0) {
      detail = "replicate exited with status " + std::to_string(rc);
      return false;
    }
  }
  const std::string a = read_file(out1);
  const std::string b = read_file(out2);
  std::remove(out1.c_str());
  std::remove(out2.c_str());
  if (a.empty() || a != b) {
    detail = "reports differ or are empty";
    return false;
  }
  detail = "two runs, " + std::to_string(a.size()) + " identical bytes";
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 424242;
  bool all_pass = true;

  const auto results = recpol::run_acceptance_criteria(seed);
  for (const auto& r : results) {
    std::printf("[%s] %d %-32s %7.3fs  %s\n", r.pass ? "PASS" : "FAIL", r.id,
                r.name.c_str(), r.seconds, r.detail.c_str());
    all_pass = all_pass && r.pass;
  }

  std::string detail;
  const auto start = std::chrono::steady_clock::now();
  const bool determinism = run_replicate_determinism(seed, detail);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("[%s] %d %-32s %7.3fs  %s\n", determinism ? "PASS" : "FAIL", 10,
              "replicate-determinism", seconds, detail.c_str());
  all_pass = all_pass && determinism;

  return all_pass ? 0 : 1;
}
