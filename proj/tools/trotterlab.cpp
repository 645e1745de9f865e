// Copyright 2026 The trotterlab Authors
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

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "trotterlab/errors.hpp"
#include "trotterlab/harness.hpp"
#include "trotterlab/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitValidation = 2;
constexpr int kExitPartial = 3;

int run(const std::string& experiment, const std::string& config_path, const std::optional<std::string>& out,
        const std::optional<std::uint64_t>& seed, const std::optional<int>& workers) {
  using namespace trotterlab;
  ExperimentConfig cfg = load_config(config_path);
  if (to_string(cfg.experiment) != experiment) {
    throw ValidationError("config describes '" + to_string(cfg.experiment) + "', not '" + experiment + "'");
  }
  if (out) cfg.output = *out;
  if (seed) cfg.seed = *seed;
  if (workers) cfg.workers = *workers;
  cfg.validate();
  const ResultBundle bundle = run_experiment(cfg);
  const int failed = bundle.failed_jobs();
  std::cout << bundle.jobs.size() - static_cast<std::size_t>(failed) << "/" << bundle.jobs.size()
            << " jobs ok, results in " << bundle.directory.string() << "\n";
  for (const JobRecord& job : bundle.jobs) {
    if (job.status != JobStatus::kOk) std::cerr << "job " << job.index << " failed: " << job.error << "\n";
  }
  return failed == 0 ? kExitOk : kExitPartial;
}

int threshold(const std::string& dir, int n_sites) {
  using namespace trotterlab;
  const ThresholdEstimate est = locate_threshold(load_bundle(dir), n_sites);
  std::cout << "tau* = " << est.tau_star << " +- " << est.uncertainty << " (plateaus " << est.low_plateau << ", "
            << est.high_plateau << ")\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trotter error experiments for the quantum Ising chain"};
  app.set_version_flag("--version", std::string(trotterlab::kCodeVersion));
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  for (const char* name :
       {"dynamics", "collapse", "ipr-sweep", "otoc-sweep", "qe-sweep", "coeffs", "noise", "lloyd-bound"}) {
    CLI::App* sub = app.add_subcommand(name, std::string("run the ") + name + " experiment");
    sub->add_option("--config", config_path, "experiment config (JSON)")->required();
    sub->add_option("--out", out, "output directory (overrides config)");
    sub->add_option("--seed", seed, "RNG seed (overrides config)");
    sub->add_option("--workers", workers, "concurrent jobs (overrides config)")->check(CLI::PositiveNumber);
  }
  std::string run_dir;
  int n_sites = 0;
  CLI::App* thr = app.add_subcommand("threshold", "locate tau* in a finished qe-sweep or ipr-sweep");
  thr->add_option("--run", run_dir, "run directory containing manifest.json")->required();
  thr->add_option("--sites", n_sites, "system size to use (default: config N)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    CLI::App* chosen = app.get_subcommands().front();
    if (chosen == thr) return threshold(run_dir, n_sites);
    return run(chosen->get_name(), config_path, out, seed, workers);
  } catch (const trotterlab::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const trotterlab::NotFoundError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}
