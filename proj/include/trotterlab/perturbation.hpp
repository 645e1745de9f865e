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

#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "trotterlab/spin_core.hpp"

namespace trotterlab {

// Second-order Magnus expansion of the one-period generator,
//   H_F = H + tau C1 + tau^2 C2 + O(tau^3),
//   C1 = (i/2)[H_X, H_Z],  C2 = -(1/12)[H_X - H_Z, [H_X, H_Z]].
struct MagnusOperators {
  DenseOperator c1;
  DenseOperator c2;
  IsingModel model;
};

inline constexpr int kMaxMagnusSites = 12;
inline constexpr int kMaxLloydSites = 10;

MagnusOperators build_magnus(const IsingModel& model);

// H + tau C1 (order 1) or H + tau C1 + tau^2 C2 (order 2).
DenseOperator magnus_hf(const IsingModel& model, double tau, int order);
DenseOperator magnus_hf(const MagnusOperators& ops, double tau, int order);

// Spectral norm of exp(-i tau H_F) - U1(tau) U2(tau) for the truncated H_F.
double magnus_period_defect(const IsingModel& model, double tau, int order);

// (t^2 / 2n) ||[H_Z, H_X]||_2, the leading global error scale of n periods.
double lloyd_commutator_bound(const IsingModel& model, double t, int n);
// ||exp(-iHt) - (U1 U2)^n||_2 with tau = t/n.
double measured_global_defect(const IsingModel& model, double t, int n);

// Eigenbasis of H with near-degenerate levels grouped into blocks. All
// diagonal-ensemble sums below work with block-projected vectors so that the
// results do not depend on the basis chosen inside a degenerate block.
struct HamiltonianSpectrum {
  IsingModel model;
  Eigen::VectorXd energies;
  Eigen::MatrixXd vectors;                // real orthonormal columns
  Eigen::VectorXd overlaps;               // c_lambda = <lambda|psi_0>
  std::vector<int> block_of;              // block index per eigenvector
  std::vector<int> block_start;           // first eigenvector of each block (+ end)
  Eigen::VectorXd block_energy;           // mean energy per block
  double degeneracy_tol = 1e-8;
  double min_gap = 0.0;                   // smallest gap between adjacent blocks
  double orthonormality_error = 0.0;      // max |V^T V - 1|
  int degenerate_blocks = 0;

  int block_count() const { return static_cast<int>(block_energy.size()); }
};

HamiltonianSpectrum diagonalize_hamiltonian(const IsingModel& model, double degeneracy_tol = 1e-8);

struct QeCoefficient {
  // Coefficient of (h tau)^2 in the long-time Q_E.
  double value = 0.0;
  // bracket = <C2> - sum_B <phi_B|C2|phi_B> - (1/4) sum_B <phi_B|[H_Z,[H_Z,H_X]]|phi_B>
  double bracket = 0.0;
  double e0 = 0.0;
  // bracket / (J^2 E_0): the same bracket with a J^2 E_0 prefactor.
  double value_j2_prefactor = 0.0;
  // value / value_j2_prefactor = -J^2/h^2.
  double normalization_factor = 0.0;
};

QeCoefficient compute_qE(const HamiltonianSpectrum& spec);
QeCoefficient compute_qE(const IsingModel& model);

struct MCoefficient {
  // m = (M_0 - M_tau) / (h tau)^2 for the long-time magnetization.
  double value = 0.0;
  // Signed long-time shift M_tau - M_0 per tau^2.
  double shift_per_tau2 = 0.0;
  // The four contributions to shift_per_tau2: each of the two parts of the
  // symmetric-splitting correction, (1/24)[Z,[Z,X]] and -(1/12)[X,[X,Z]],
  // paired with the two first-order pieces of the diagonal ensemble (the
  // weight change and the eigenvector change of M).
  double zzx_weight = 0.0;
  double zzx_vector = 0.0;
  double xxz_weight = 0.0;
  double xxz_vector = 0.0;
  // Four-term anticommutator/Lehmann expression in the non-symmetric frame,
  // kept as a diagnostic: t1/12 - t2/6 + t3/6 + t4/6, per J^2.
  double alternative_terms[4] = {0.0, 0.0, 0.0, 0.0};
  double alternative_value = 0.0;
  double degeneracy_tol = 0.0;
};

MCoefficient compute_m(const HamiltonianSpectrum& spec);
MCoefficient compute_m(const IsingModel& model, double degeneracy_tol = 1e-8);

nlohmann::json to_json(const HamiltonianSpectrum& spec);
nlohmann::json to_json(const QeCoefficient& qe);
nlohmann::json to_json(const MCoefficient& m);

}  // namespace trotterlab
