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

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace trotterlab {

using Complex = std::complex<double>;

inline constexpr int kMaxFastSites = 24;
inline constexpr int kMaxDenseSites = 14;

// Open quantum Ising chain
//   H = H_Z + H_X,
//   H_Z = J sum_{l<N} S^z_l S^z_{l+1} + h sum_l S^z_l,
//   H_X = g sum_l S^x_l,
// with spin-1/2 operators S = sigma/2. J sets the energy unit.
struct IsingModel {
  int n_sites = 1;
  double J = 1.0;
  double h = 2.0;
  double g = 2.0;

  std::size_t dimension() const { return std::size_t{1} << n_sites; }

  // Throws CapacityError for N outside [1, kMaxFastSites] and
  // ValidationError for J == 0 or non-finite parameters.
  void validate() const;

  bool operator==(const IsingModel&) const = default;
};

// Basis convention used everywhere in the project: site l (0-based) is bit l
// of the basis index; a clear bit is spin up (+1/2), a set bit spin down.
constexpr double spin_z(std::size_t index, int site) {
  return ((index >> site) & 1U) ? -0.5 : 0.5;
}

class SpinState {
 public:
  explicit SpinState(int n_sites);
  SpinState(int n_sites, std::vector<Complex> amplitudes);

  int n_sites() const { return n_sites_; }
  std::size_t dimension() const { return amplitudes_.size(); }

  std::span<Complex> amplitudes() { return amplitudes_; }
  std::span<const Complex> amplitudes() const { return amplitudes_; }

  Complex& operator[](std::size_t i) { return amplitudes_[i]; }
  const Complex& operator[](std::size_t i) const { return amplitudes_[i]; }

  double norm() const;
  void normalize();
  void set_zero();

 private:
  int n_sites_;
  std::vector<Complex> amplitudes_;
};

// Operator diagonal in the z basis, stored as one real value per basis index.
struct DiagonalObservable {
  std::vector<double> values;
  std::string label;
};

SpinState make_all_up_state(int n_sites);

DiagonalObservable hz_diagonal(const IsingModel& model);
DiagonalObservable magnetization_diagonal(int n_sites);

// out = D * in (elementwise).
void apply_diagonal(const DiagonalObservable& diag, const SpinState& in, SpinState& out);

// out = H_X * in. Each output amplitude is g/2 times the sum over sites of
// the amplitude at the bit-flipped partner, accumulated in site order.
void apply_hx(const SpinState& in, const IsingModel& model, SpinState& out);

// out = (H_Z + H_X) * in with a precomputed H_Z diagonal.
void apply_hamiltonian(const SpinState& in, const IsingModel& model,
                       const DiagonalObservable& hz, SpinState& out);

Complex inner_product(const SpinState& bra, const SpinState& ket);

// <psi|D|psi> and <psi|H_X|psi>, evaluated as full complex sums. The
// imaginary part is checked against 1e-10 (relative) and a ContractViolation
// is raised if it exceeds it.
double expectation(const SpinState& state, const DiagonalObservable& diag);
double expectation_hx(const SpinState& state, const IsingModel& model);

// Returns Re(value) after checking that Im(value) is numerical noise.
double checked_real(Complex value, const std::string& label);

enum class OperatorKind { kH, kHZ, kHX, kM };

std::string to_string(OperatorKind kind);

struct DenseOperator {
  Eigen::MatrixXcd matrix;
  std::string label;
};

// Explicit 2^N x 2^N matrices for small-N oracles; N <= kMaxDenseSites.
DenseOperator build_dense(const IsingModel& model, OperatorKind kind);
// Real-valued variant (all four model operators are real symmetric).
Eigen::MatrixXd build_dense_real(const IsingModel& model, OperatorKind kind);

Eigen::VectorXcd to_eigen(const SpinState& state);
SpinState from_eigen(int n_sites, const Eigen::VectorXcd& v);

}  // namespace trotterlab
