// Copyright 2026 the subsheet authors
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

#include <cstdio>
#include <cstdlib>
#include <string>

#include <CLI11.hpp>

#include "subsheet/cli.hpp"

namespace {

void print_report(const subsheet::CheckReport& report) {
  double worst_z = 0.0;
  double min_p = 1.0;
  bool has_ks = false;
  for (const subsheet::CheckItem& item : report.items) {
    if (item.kind == "ks") {
      has_ks = true;
      min_p = std::min(min_p, item.estimate.mean);
    } else {
      worst_z = std::max(worst_z, std::abs(item.z));
    }
  }
  std::printf("[%s] %-42s items=%zu max|z|=%.2f%s (%.2fs)\n",
              report.pass ? "PASS" : "FAIL", report.name.c_str(),
              report.items.size(), worst_z,
              has_ks ? (" min_p=" + std::to_string(min_p)).c_str() : "",
              report.runtime_seconds);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"subordination sheet simulation and verification tool"};
  app.name("subsheet");

  std::string command;
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  unsigned parallel = 0;

  app.add_option("command", command, "one of: simulate-sheet, eval-exponent, "
                                     "verify-laplace, verify-eq3, "
                                     "verify-martingale, verify-rayknight, "
                                     "verify-all")
      ->required();
  app.add_option("--config", config_path, "JSON experiment configuration");
  app.add_option("--seed", seed, "override the master seed");
  app.add_option("--parallel", parallel, "override the worker count");
  app.add_option("--out", out_dir, "override the output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : subsheet::kExitInvalidConfig;
  }

  subsheet::ExperimentConfig config;
  try {
    if (!config_path.empty()) config = subsheet::load_config(config_path);
  } catch (const subsheet::ConfigError& e) {
    std::fprintf(stderr, "{\"error\":{\"code\":2,\"message\":\"%s\"}}\n",
                 e.what());
    return subsheet::kExitInvalidConfig;
  }

  config.command = command;
  if (app.count("--seed") > 0) config.seed = seed;
  if (app.count("--parallel") > 0) config.parallelism = parallel;
  config.out_dir = subsheet::resolve_out_dir(out_dir, config.out_dir);

  const subsheet::ExperimentResult result = subsheet::run_experiment(config);
  for (const subsheet::CheckReport& report : result.reports) {
    print_report(report);
  }
  if (result.exit_code == subsheet::kExitPass ||
      result.exit_code == subsheet::kExitGateFailure) {
    std::printf("%s: %s -> %s\n", result.pass ? "PASS" : "FAIL",
                config.command.c_str(), result.result_path.string().c_str());
  }
  return result.exit_code;
}
