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
#include <random>
#include <string>
#include <vector>

#include "trotterlab/observables.hpp"

namespace trotterlab {

enum class NoiseKind { kTiming, kEnsemble };

std::string to_string(NoiseKind kind);
NoiseKind noise_kind_from_string(const std::string& s);

// Gate-strength fluctuations tau (1 + xi) H_l with xi uniform on
// [-eta/2, eta/2] (variance eta^2/12).
struct NoiseConfig {
  NoiseKind kind = NoiseKind::kTiming;
  double eta = 0.0;
  int realizations = 1;
  std::uint64_t seed = 0;
  // Threads used for realizations; results do not depend on it.
  int workers = 1;

  void validate() const;
  double variance() const { return eta * eta / 12.0; }
};

// Random stream for realization r. Depends only on (seed, kind, r), so adding
// realizations extends the ensemble without reshuffling existing members.
std::mt19937_64 realization_stream(const NoiseConfig& cfg, std::uint64_t r);

struct EnsembleTrajectory {
  TrajectoryRecord mean;
  TrajectoryRecord std_error;  // standard error of the mean, sqrt(s^2 / R)
  int realizations = 0;
  double eta = 0.0;
  std::vector<double> rescaled_times;  // t * eta^2
};

// Per period p the gates are exp(-i tau (1+xi_Z^p) H_Z) exp(-i tau (1+xi_X^p) H_X),
// with xi_Z^p then xi_X^p drawn fresh from the realization stream.
EnsembleTrajectory timing_noise_run(const IsingModel& model, double tau, int n_steps,
                                    const NoiseConfig& cfg,
                                    Observable observable = Observable::kAccuracy);

// Delta_Z then Delta_X drawn once per realization and kept for all periods.
EnsembleTrajectory ensemble_noise_run(const IsingModel& model, double tau, int n_steps,
                                      const NoiseConfig& cfg,
                                      Observable observable = Observable::kMagnetization);

// Dispatches on cfg.kind.
EnsembleTrajectory noise_run(const IsingModel& model, double tau, int n_steps,
                             const NoiseConfig& cfg, Observable observable);

// Single noisy trajectory for realization r (the building block of the runs
// above, exposed for reproducibility checks).
TrajectoryRecord noisy_trajectory(const IsingModel& model, double tau, int n_steps,
                                  const NoiseConfig& cfg, std::uint64_t r, Observable observable);

struct LindbladConfig {
  int magnus_order = 2;        // coherent part H + tau C1 (+ tau^2 C2)
  int steps_per_period = 20;   // RK4 steps per tau
};

inline constexpr int kMaxLindbladSites = 6;

// Q_E(n tau) for n tau <= t_max from
//   d rho/dt = -i[H_eff, rho] + gamma sum_{l in Z,X} (2 H_l rho H_l - H_l^2 rho - rho H_l^2),
// gamma = tau * (eta^2/12) / 2, integrated with fixed-step RK4.
TrajectoryRecord lindblad_oracle(const IsingModel& model, double tau, double eta, double t_max,
                                 const LindbladConfig& cfg = {});

nlohmann::json to_json(const NoiseConfig& cfg);

}  // namespace trotterlab
