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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "trotterlab/evolvers.hpp"
#include "trotterlab/noise.hpp"
#include "trotterlab/spin_core.hpp"

namespace trotterlab {

inline constexpr int kConfigSchemaVersion = 1;
inline constexpr int kManifestSchemaVersion = 1;

enum class ExperimentKind {
  kDynamics,
  kCollapse,
  kIprSweep,
  kOtocSweep,
  kQeSweep,
  kCoeffs,
  kNoise,
  kLloydBound,
};

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_from_string(const std::string& name);

// n log-spaced points from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, int points);
std::vector<double> default_tau_grid();

struct NoiseSettings {
  NoiseKind kind = NoiseKind::kTiming;
  std::vector<double> etas{0.02, 0.04};
  int realizations = 100;
  // Adds the master-equation oracle per eta when N <= 6.
  bool lindblad = false;

  bool operator==(const NoiseSettings&) const = default;
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::kDynamics;
  IsingModel model{12, 1.0, 2.0, 2.0};
  // Extra system sizes; the job grid runs over {model.n_sites} when empty.
  std::vector<int> sizes;
  std::vector<double> tau_grid = default_tau_grid();
  int n_steps = 20000;
  long window = 10000;
  int otoc_steps = 1000;
  long otoc_window = 300;
  double degeneracy_tol = 1e-8;
  int krylov_max_dim = 40;
  double krylov_tol = 1e-10;
  // Total time for lloyd-bound jobs; n = round(t / tau).
  double lloyd_time = 1.0;
  bool floquet_oracle = false;
  NoiseSettings noise;
  std::uint64_t seed = 0;
  int workers = 1;
  std::string output = "run";

  // Throws ValidationError naming the first offending field.
  void validate() const;
  std::vector<int> system_sizes() const;

  bool operator==(const ExperimentConfig&) const = default;
};

nlohmann::json to_json(const ExperimentConfig& cfg);
// Accepts "tau_grid" either as a list or as {"log": {"min", "max", "points"}}.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

enum class JobStatus { kPending, kOk, kFailed };
std::string to_string(JobStatus status);

struct JobRecord {
  int index = 0;
  int n_sites = 0;
  std::optional<double> tau;
  std::optional<double> eta;
  JobStatus status = JobStatus::kPending;
  std::string error;
  double wall_seconds = 0.0;
  nlohmann::json summary = nlohmann::json::object();
  nlohmann::json trajectories = nlohmann::json::array();  // {label, file, metadata}
};

struct ResultBundle {
  ExperimentConfig config;
  std::string code_version;
  std::filesystem::path directory;
  std::vector<JobRecord> jobs;
  double wall_seconds = 0.0;

  int failed_jobs() const;
};

// Runs every job of the config with a bounded worker pool, writing
// traj_<label>_<idx>.csv files and manifest.json (rewritten atomically after
// every job) into cfg.output. Per-job exceptions mark the job failed.
ResultBundle run_experiment(const ExperimentConfig& cfg);

nlohmann::json to_json(const ResultBundle& bundle);
ResultBundle bundle_from_json(const nlohmann::json& j);
ResultBundle load_bundle(const std::filesystem::path& directory);

struct ThresholdEstimate {
  double tau_star = 0.0;
  double uncertainty = 0.0;  // spacing of the bracketing grid points
  double low_plateau = 0.0;
  double high_plateau = 0.0;
  double midpoint = 0.0;
};

// First upward crossing of the midpoint between the mean of the three
// smallest-tau values and the mean of the three largest, interpolated
// linearly in log(tau). Needs >= 8 points; throws NotFoundError when the
// plateau contrast is below min_contrast or no crossing exists.
ThresholdEstimate locate_threshold(const std::vector<double>& taus, const std::vector<double>& values,
                                   double min_contrast = 0.2);

// Uses the bundle's long-time Q_E (qe-sweep) or IPR ratio (ipr-sweep) for
// the given system size (the config's N when zero).
ThresholdEstimate locate_threshold(const ResultBundle& bundle, int n_sites = 0, double min_contrast = 0.2);

}  // namespace trotterlab
