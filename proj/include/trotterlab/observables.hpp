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

#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "trotterlab/evolvers.hpp"
#include "trotterlab/spin_core.hpp"

namespace trotterlab {

enum class Observable {
  kMagnetization,  // M = N^-1 sum_l <S^z_l>
  kEnergy,         // <H>
  kAccuracy,       // Q_E = (E - E_0) / (E_inf - E_0)
  kLoschmidt,      // |<psi_0|psi>|^2
};

std::string to_string(Observable obs);

// Observable values at stroboscopic times. Real observables carry a zero
// imaginary part; the OTO correlator is genuinely complex.
struct TrajectoryRecord {
  std::string label;
  IsingModel model;
  double tau = 0.0;
  std::vector<long> steps;
  std::vector<double> times;
  std::vector<Complex> values;
  nlohmann::json metadata = nlohmann::json::object();

  std::size_t size() const { return values.size(); }
  std::vector<double> real_values() const;
  void push(long step, double time, Complex value);
  // times strictly increasing and evenly spaced by tau; equal lengths.
  void validate() const;
};

struct LongTimeAverage {
  double mean = 0.0;
  long window_start_period = 0;
  long window_len = 0;
  double fluctuation = 0.0;  // population standard deviation over the window
};

// Trailing-window mean and standard deviation of the real parts.
LongTimeAverage stroboscopic_average(const TrajectoryRecord& traj, long window);
LongTimeAverage stroboscopic_average(std::span<const double> values, long window);

using TrajectorySet = std::map<Observable, TrajectoryRecord>;

// Infinite-temperature energy Tr(H)/D; zero for this model.
double infinite_temperature_energy(const IsingModel& model);

// Trotterized dynamics from the all-up state, recording every period
// n = 0..n_steps.
TrajectorySet run_dynamics(const IsingModel& model, double tau, int n_steps,
                           const std::set<Observable>& observables);

// Same observables under exp(-iHt) (Krylov) on an evenly spaced grid of
// times starting at 0. The grid spacing is stored as the record's tau.
TrajectorySet exact_reference(const IsingModel& model, const std::vector<double>& times,
                              const std::set<Observable>& observables,
                              const KrylovConfig& cfg = {});

struct TrotterErrorResult {
  TrajectoryRecord trotter;     // M_tau(n tau)
  TrajectoryRecord exact;       // M_{tau=0}(n tau)
  TrajectoryRecord delta;       // |M_{tau=0} - M_tau|
  TrajectoryRecord normalized;  // delta / (h tau)^2
  TrajectoryRecord shift;       // M_{tau=0} - M_tau, signed
};

TrotterErrorResult trotter_error_trajectory(const IsingModel& model, double tau, int n_steps,
                                            const KrylovConfig& cfg = {});

struct IprResult {
  double ipr = 0.0;
  double lambda_ipr = 0.0;
  double lambda_d = 0.0;
  // log(IPR) / -(log D - log 2); 1 for uniform delocalization.
  double ratio = 0.0;
  double fluctuation = 0.0;
  double dimension = 0.0;
  // Same ratio with D replaced by the size of the reflection-even sector,
  // which is the space the all-up state actually explores.
  double ratio_even_sector = 0.0;
  double even_sector_dimension = 0.0;
  TrajectoryRecord loschmidt;
};

// IPR as the trailing-window mean of the Loschmidt echo. Requires
// n_steps >= 2 * window.
IprResult ipr_dynamical(const IsingModel& model, double tau, int n_steps, long window);

// Static IPR from the Floquet eigenbasis. Overlaps within quasi-energy blocks
// closer than degeneracy_tol are summed before squaring, which makes the value
// independent of the basis chosen inside a degenerate block.
struct FloquetIpr {
  double ipr = 0.0;
  double ipr_per_vector = 0.0;  // sum of p_nu^2 over individual vectors
  int degenerate_blocks = 0;
  double min_gap = 0.0;
};

FloquetIpr floquet_ipr(const IsingModel& model, double tau, double degeneracy_tol = 1e-10);

// Dimension of the reflection-even sector of the open chain.
double reflection_even_dimension(int n_sites);

inline constexpr double kOtocMaximum = 1.0 / 8.0;

struct OtocResult {
  TrajectoryRecord correlator;  // complex F(n tau), n = 0..n_steps
  LongTimeAverage real_part;
  LongTimeAverage magnitude;
  double normalized = 0.0;            // real_part.mean / F_0
  double normalized_magnitude = 0.0;  // magnitude.mean / F_0
};

// F(n tau) = <psi_1|psi_2> with V = W = M,
//   psi_1 = W U^-n V U^n psi_0,  psi_2 = U^-n V U^n W psi_0,
// where U^n is n Trotter periods. The backward evolution is redone for every
// n, so the cost is quadratic in n_steps.
OtocResult otoc_run(const IsingModel& model, double tau, int n_steps, long window);

// CSV with columns step,time,value_re,value_im (17 significant digits).
void write_csv(const TrajectoryRecord& traj, std::ostream& os);
TrajectoryRecord read_csv(std::istream& is);

// JSON with a metadata header (model, tau, code version, caller metadata).
nlohmann::json to_json(const TrajectoryRecord& traj);
TrajectoryRecord trajectory_from_json(const nlohmann::json& j);

nlohmann::json to_json(const IsingModel& model);
IsingModel model_from_json(const nlohmann::json& j);

}  // namespace trotterlab
