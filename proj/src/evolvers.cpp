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

#include "trotterlab/evolvers.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "trotterlab/errors.hpp"
#include "trotterlab/linalg.hpp"

namespace trotterlab {

void TrotterConfig::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ValidationError("tau must be positive");
  if (n_steps < 1) throw ValidationError("n_steps must be >= 1");
}

void apply_x_rotation(std::span<Complex> amplitudes, int n_sites, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  const std::size_t dim = amplitudes.size();
  Complex* a = amplitudes.data();
  for (int l = 0; l < n_sites; ++l) {
    const std::size_t stride = std::size_t{1} << l;
    for (std::size_t block = 0; block < dim; block += 2 * stride) {
      for (std::size_t k = block; k < block + stride; ++k) {
        const Complex x = a[k];
        const Complex y = a[k + stride];
        // -i*s*y = (s*y.imag, -s*y.real)
        a[k] = Complex(c * x.real() + s * y.imag(), c * x.imag() - s * y.real());
        a[k + stride] = Complex(c * y.real() + s * x.imag(), c * y.imag() - s * x.real());
      }
    }
  }
}

DiagonalLevels::DiagonalLevels(const DiagonalObservable& diag) {
  std::vector<double> sorted = diag.values;
  std::sort(sorted.begin(), sorted.end());
  // Values are sums of exact multiples of the couplings; merge only values
  // equal to rounding.
  for (double v : sorted) {
    if (levels_.empty() || std::abs(v - levels_.back()) > 1e-12 * std::max(1.0, std::abs(v))) {
      levels_.push_back(v);
    }
  }
  index_.resize(diag.values.size());
  for (std::size_t b = 0; b < diag.values.size(); ++b) {
    const double v = diag.values[b];
    auto it = std::lower_bound(levels_.begin(), levels_.end(),
                               v - 1e-12 * std::max(1.0, std::abs(v)));
    index_[b] = static_cast<std::uint32_t>(it - levels_.begin());
  }
  phase_scratch_.resize(levels_.size());
}

void DiagonalLevels::apply_phase(std::span<Complex> amplitudes, double t) const {
  if (amplitudes.size() != index_.size()) throw DimensionError("DiagonalLevels: dimension mismatch");
  for (std::size_t k = 0; k < levels_.size(); ++k) {
    phase_scratch_[k] = std::polar(1.0, -t * levels_[k]);
  }
  for (std::size_t b = 0; b < amplitudes.size(); ++b) amplitudes[b] *= phase_scratch_[index_[b]];
}

TrotterPropagator::TrotterPropagator(const IsingModel& model, double tau)
    : model_(model), tau_(tau), x_angle_(0.5 * model.g * tau) {
  model.validate();
  if (!std::isfinite(tau)) throw ValidationError("tau must be finite");
  const DiagonalObservable hz = hz_diagonal(model);
  phases_.resize(hz.values.size());
  for (std::size_t b = 0; b < hz.values.size(); ++b) phases_[b] = std::polar(1.0, -tau * hz.values[b]);
}

void TrotterPropagator::step(SpinState& state) const {
  if (state.dimension() != phases_.size()) throw DimensionError("trotter step: dimension mismatch");
  auto amps = state.amplitudes();
  apply_x_rotation(amps, model_.n_sites, x_angle_);
  for (std::size_t b = 0; b < amps.size(); ++b) amps[b] *= phases_[b];
}

void TrotterPropagator::step_inverse(SpinState& state) const {
  if (state.dimension() != phases_.size()) throw DimensionError("trotter step: dimension mismatch");
  auto amps = state.amplitudes();
  for (std::size_t b = 0; b < amps.size(); ++b) amps[b] *= std::conj(phases_[b]);
  apply_x_rotation(amps, model_.n_sites, -x_angle_);
}

SpinState trotter_period(const SpinState& state, const IsingModel& model, double tau) {
  if (state.dimension() != model.dimension()) throw DimensionError("trotter_period: dimension mismatch");
  SpinState out = state;
  TrotterPropagator(model, tau).step(out);
  return out;
}

SpinState trotter_evolve(const SpinState& state, const IsingModel& model, const TrotterConfig& cfg) {
  cfg.validate();
  if (state.dimension() != model.dimension()) throw DimensionError("trotter_evolve: dimension mismatch");
  const TrotterPropagator prop(model, cfg.tau);
  SpinState out = state;
  NormGuard guard;
  for (long n = 1; n <= cfg.n_steps; ++n) {
    prop.step(out);
    guard.after_period(out, n);
  }
  return out;
}

void NormGuard::after_period(SpinState& state, long period) {
  if (period % kCheckEvery != 0) return;
  const double drift = std::abs(state.norm() - 1.0);
  max_drift_ = std::max(max_drift_, drift);
  if (drift > kTolerance) {
    state.normalize();
    ++corrections_;
  }
}

EigenDecomposition dense_eigh(const DenseOperator& op) {
  const Eigen::MatrixXcd& a = op.matrix;
  if (a.rows() != a.cols()) throw DimensionError("dense_eigh: matrix not square");
  if (a.rows() > (Eigen::Index{1} << kMaxDenseSites)) throw CapacityError("dense_eigh: matrix too large");
  const double asym = (a - a.adjoint()).cwiseAbs().maxCoeff();
  if (asym > 1e-10) {
    throw ContractViolation("dense_eigh: operator " + op.label + " is not Hermitian (asymmetry " +
                            std::to_string(asym) + ")");
  }
  linalg::HermitianEigen eig = linalg::hermitian_eigh(a);
  EigenDecomposition out;
  out.energies = std::move(eig.values);
  out.vectors = std::move(eig.vectors);
  out.operator_label = op.label;
  double gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 1; k < out.energies.size(); ++k) {
    gap = std::min(gap, out.energies(k) - out.energies(k - 1));
  }
  out.min_gap = gap;
  out.near_degenerate = gap < 1e-10;
  return out;
}

Eigen::MatrixXcd trotter_unitary_dense(const IsingModel& model, double tau) {
  model.validate();
  if (model.n_sites > 12) throw CapacityError("trotter_unitary_dense: N > 12");
  const TrotterPropagator prop(model, tau);
  const auto dim = static_cast<Eigen::Index>(model.dimension());
  Eigen::MatrixXcd u(dim, dim);
  SpinState column(model.n_sites);
  for (Eigen::Index j = 0; j < dim; ++j) {
    column.set_zero();
    column[static_cast<std::size_t>(j)] = 1.0;
    prop.step(column);
    for (Eigen::Index i = 0; i < dim; ++i) u(i, j) = column[static_cast<std::size_t>(i)];
  }
  return u;
}

EigenDecomposition floquet_eigensystem(const IsingModel& model, double tau) {
  if (!(tau > 0.0)) throw ValidationError("floquet_eigensystem: tau must be positive");
  linalg::SchurForm schur = linalg::complex_schur(trotter_unitary_dense(model, tau));
  const Eigen::Index dim = schur.eigenvalues.size();
  const double zone = std::numbers::pi / tau;

  std::vector<double> quasi(static_cast<std::size_t>(dim));
  for (Eigen::Index k = 0; k < dim; ++k) {
    double e = -std::arg(schur.eigenvalues(k)) / tau;
    if (e <= -zone) e += 2.0 * zone;
    quasi[static_cast<std::size_t>(k)] = e;
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(dim));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return quasi[static_cast<std::size_t>(a)] < quasi[static_cast<std::size_t>(b)];
  });

  EigenDecomposition out;
  out.energies.resize(dim);
  out.vectors.resize(dim, dim);
  for (Eigen::Index k = 0; k < dim; ++k) {
    out.energies(k) = quasi[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])];
    out.vectors.col(k) = schur.vectors.col(order[static_cast<std::size_t>(k)]);
  }
  out.operator_label = "H_F";
  double gap = dim > 1 ? out.energies(0) + 2.0 * zone - out.energies(dim - 1)
                       : std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 1; k < dim; ++k) gap = std::min(gap, out.energies(k) - out.energies(k - 1));
  out.min_gap = gap;
  out.near_degenerate = gap < 1e-10;
  return out;
}

}  // namespace trotterlab
