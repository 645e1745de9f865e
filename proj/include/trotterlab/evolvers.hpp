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
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "trotterlab/spin_core.hpp"

namespace trotterlab {

// One Trotter period is U1(tau) U2(tau) with U1 = exp(-i tau H_Z) and
// U2 = exp(-i tau H_X); U2 acts on the state first.
struct TrotterConfig {
  double tau = 0.1;
  int n_steps = 1;

  void validate() const;
};

// prod_l exp(-i angle sigma^x_l); with angle = g t / 2 this is exp(-i t H_X).
// Pairs differing in bit l map as (a, b) -> (a c - i b s, -i a s + b c).
void apply_x_rotation(std::span<Complex> amplitudes, int n_sites, double angle);

// Distinct values of a diagonal operator with a per-index level map, so that
// exp(-i t D) for many different t costs one exp per level.
class DiagonalLevels {
 public:
  explicit DiagonalLevels(const DiagonalObservable& diag);

  std::size_t level_count() const { return levels_.size(); }
  void apply_phase(std::span<Complex> amplitudes, double t) const;

 private:
  std::vector<double> levels_;
  std::vector<std::uint32_t> index_;
  mutable std::vector<Complex> phase_scratch_;
};

class TrotterPropagator {
 public:
  TrotterPropagator(const IsingModel& model, double tau);

  // psi <- U1 U2 psi
  void step(SpinState& state) const;
  // psi <- (U1 U2)^dagger psi = U2(-tau) U1(-tau) psi
  void step_inverse(SpinState& state) const;

  double tau() const { return tau_; }
  const IsingModel& model() const { return model_; }

 private:
  IsingModel model_;
  double tau_;
  std::vector<Complex> phases_;
  double x_angle_;
};

SpinState trotter_period(const SpinState& state, const IsingModel& model, double tau);
SpinState trotter_evolve(const SpinState& state, const IsingModel& model, const TrotterConfig& cfg);

// Renormalizes every kCheckEvery periods when the norm drifted by more than
// kTolerance, and remembers what it did.
class NormGuard {
 public:
  static constexpr long kCheckEvery = 1000;
  static constexpr double kTolerance = 1e-10;

  void after_period(SpinState& state, long period);

  int corrections() const { return corrections_; }
  double max_drift() const { return max_drift_; }

 private:
  int corrections_ = 0;
  double max_drift_ = 0.0;
};

struct KrylovConfig {
  int max_dim = 40;
  double tol = 1e-10;
  int max_substeps = 1 << 16;

  void validate() const;
};

// exp(-i H t) by Lanczos with full reorthogonalization. The Krylov dimension
// grows until the a-posteriori error estimate beta_m |e_m^T exp(-i T_m dt) e_1|
// meets the per-substep share of cfg.tol; if max_dim is reached first the
// substep is halved. The Krylov basis is held in memory (max_dim vectors).
class KrylovPropagator {
 public:
  explicit KrylovPropagator(const IsingModel& model, KrylovConfig cfg = {});

  void evolve(SpinState& state, double t);

  int last_substeps() const { return last_substeps_; }
  int last_max_dim() const { return last_max_dim_; }

 private:
  IsingModel model_;
  KrylovConfig cfg_;
  std::vector<double> hz_;
  Eigen::MatrixXcd basis_;
  Eigen::VectorXcd work_;
  int last_substeps_ = 0;
  int last_max_dim_ = 0;
};

SpinState krylov_evolve(const SpinState& state, const IsingModel& model, double t,
                        const KrylovConfig& cfg = {});

struct EigenDecomposition {
  Eigen::VectorXd energies;  // ascending
  Eigen::MatrixXcd vectors;  // columns |lambda>
  std::string operator_label;
  double min_gap = 0.0;
  bool near_degenerate = false;  // min_gap < 1e-10
};

// Full spectrum of a Hermitian operator. Throws ContractViolation when the
// matrix is not Hermitian to 1e-10.
EigenDecomposition dense_eigh(const DenseOperator& op);

// The one-period unitary U1 U2 as a dense matrix, built column by column with
// TrotterPropagator. N <= 12.
Eigen::MatrixXcd trotter_unitary_dense(const IsingModel& model, double tau);

// Eigenpairs of U1 U2. Quasi-energies E = -arg(eigenvalue)/tau folded into
// (-pi/tau, pi/tau], sorted ascending; vectors are orthonormal Schur vectors.
// min_gap is measured around the Floquet circle.
EigenDecomposition floquet_eigensystem(const IsingModel& model, double tau);

}  // namespace trotterlab
