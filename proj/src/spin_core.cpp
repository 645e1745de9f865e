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

#include "trotterlab/spin_core.hpp"

#include <cmath>
#include <sstream>

#include "trotterlab/errors.hpp"

namespace trotterlab {

void IsingModel::validate() const {
  if (n_sites < 1 || n_sites > kMaxFastSites) {
    std::ostringstream os;
    os << "N=" << n_sites << " outside supported range [1, " << kMaxFastSites << "]";
    throw CapacityError(os.str());
  }
  if (!std::isfinite(J) || !std::isfinite(h) || !std::isfinite(g)) {
    throw ValidationError("model parameters must be finite");
  }
  if (J == 0.0) {
    throw ValidationError("J sets the unit of energy and must be nonzero");
  }
}

SpinState::SpinState(int n_sites) : n_sites_(n_sites) {
  if (n_sites < 1 || n_sites > kMaxFastSites) {
    throw CapacityError("SpinState: N=" + std::to_string(n_sites) + " unsupported");
  }
  amplitudes_.assign(std::size_t{1} << n_sites, Complex{0.0, 0.0});
}

SpinState::SpinState(int n_sites, std::vector<Complex> amplitudes)
    : n_sites_(n_sites), amplitudes_(std::move(amplitudes)) {
  if (n_sites < 1 || n_sites > kMaxFastSites) {
    throw CapacityError("SpinState: N=" + std::to_string(n_sites) + " unsupported");
  }
  if (amplitudes_.size() != (std::size_t{1} << n_sites)) {
    throw DimensionError("SpinState: amplitude count does not match 2^N");
  }
}

double SpinState::norm() const {
  double acc = 0.0;
  for (const Complex& a : amplitudes_) acc += std::norm(a);
  return std::sqrt(acc);
}

void SpinState::normalize() {
  const double n = norm();
  if (n == 0.0) throw ContractViolation("cannot normalize the zero vector");
  const double inv = 1.0 / n;
  for (Complex& a : amplitudes_) a *= inv;
}

void SpinState::set_zero() {
  for (Complex& a : amplitudes_) a = Complex{0.0, 0.0};
}

SpinState make_all_up_state(int n_sites) {
  SpinState psi(n_sites);
  psi[0] = Complex{1.0, 0.0};
  return psi;
}

DiagonalObservable hz_diagonal(const IsingModel& model) {
  model.validate();
  const std::size_t dim = model.dimension();
  DiagonalObservable out{std::vector<double>(dim), "H_Z"};
  for (std::size_t b = 0; b < dim; ++b) {
    double zz = 0.0;
    double z = 0.0;
    for (int l = 0; l < model.n_sites; ++l) {
      const double s = spin_z(b, l);
      z += s;
      if (l + 1 < model.n_sites) zz += s * spin_z(b, l + 1);
    }
    out.values[b] = model.J * zz + model.h * z;
  }
  return out;
}

DiagonalObservable magnetization_diagonal(int n_sites) {
  if (n_sites < 1 || n_sites > kMaxFastSites) {
    throw CapacityError("magnetization_diagonal: N=" + std::to_string(n_sites) + " unsupported");
  }
  const std::size_t dim = std::size_t{1} << n_sites;
  DiagonalObservable out{std::vector<double>(dim), "M"};
  for (std::size_t b = 0; b < dim; ++b) {
    double z = 0.0;
    for (int l = 0; l < n_sites; ++l) z += spin_z(b, l);
    out.values[b] = z / n_sites;
  }
  return out;
}

namespace {

void require_same_shape(std::size_t a, std::size_t b, const char* where) {
  if (a != b) throw DimensionError(std::string(where) + ": dimension mismatch");
}

}  // namespace

void apply_diagonal(const DiagonalObservable& diag, const SpinState& in, SpinState& out) {
  require_same_shape(diag.values.size(), in.dimension(), "apply_diagonal");
  require_same_shape(in.dimension(), out.dimension(), "apply_diagonal");
  for (std::size_t b = 0; b < in.dimension(); ++b) out[b] = diag.values[b] * in[b];
}

void apply_hx(const SpinState& in, const IsingModel& model, SpinState& out) {
  require_same_shape(in.dimension(), model.dimension(), "apply_hx");
  require_same_shape(in.dimension(), out.dimension(), "apply_hx");
  const std::size_t dim = in.dimension();
  const double half_g = 0.5 * model.g;
  out.set_zero();
  for (int l = 0; l < model.n_sites; ++l) {
    const std::size_t mask = std::size_t{1} << l;
    for (std::size_t b = 0; b < dim; ++b) out[b] += in[b ^ mask];
  }
  for (std::size_t b = 0; b < dim; ++b) out[b] *= half_g;
}

void apply_hamiltonian(const SpinState& in, const IsingModel& model,
                       const DiagonalObservable& hz, SpinState& out) {
  apply_hx(in, model, out);
  require_same_shape(hz.values.size(), in.dimension(), "apply_hamiltonian");
  for (std::size_t b = 0; b < in.dimension(); ++b) out[b] += hz.values[b] * in[b];
}

Complex inner_product(const SpinState& bra, const SpinState& ket) {
  require_same_shape(bra.dimension(), ket.dimension(), "inner_product");
  Complex acc{0.0, 0.0};
  for (std::size_t b = 0; b < bra.dimension(); ++b) acc += std::conj(bra[b]) * ket[b];
  return acc;
}

double checked_real(Complex value, const std::string& label) {
  const double scale = std::max(1.0, std::abs(value.real()));
  if (std::abs(value.imag()) > 1e-10 * scale) {
    std::ostringstream os;
    os << "expectation of " << label << " has imaginary part " << value.imag();
    throw ContractViolation(os.str());
  }
  return value.real();
}

double expectation(const SpinState& state, const DiagonalObservable& diag) {
  require_same_shape(diag.values.size(), state.dimension(), "expectation");
  Complex acc{0.0, 0.0};
  for (std::size_t b = 0; b < state.dimension(); ++b) {
    acc += std::conj(state[b]) * (diag.values[b] * state[b]);
  }
  return checked_real(acc, diag.label);
}

double expectation_hx(const SpinState& state, const IsingModel& model) {
  require_same_shape(state.dimension(), model.dimension(), "expectation_hx");
  const std::size_t dim = state.dimension();
  Complex acc{0.0, 0.0};
  for (int l = 0; l < model.n_sites; ++l) {
    const std::size_t mask = std::size_t{1} << l;
    for (std::size_t b = 0; b < dim; ++b) acc += std::conj(state[b]) * state[b ^ mask];
  }
  return checked_real(0.5 * model.g * acc, "H_X");
}

std::string to_string(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::kH: return "H";
    case OperatorKind::kHZ: return "H_Z";
    case OperatorKind::kHX: return "H_X";
    case OperatorKind::kM: return "M";
  }
  return "?";
}

Eigen::MatrixXd build_dense_real(const IsingModel& model, OperatorKind kind) {
  model.validate();
  if (model.n_sites > kMaxDenseSites) {
    throw CapacityError("build_dense: N=" + std::to_string(model.n_sites) +
                        " exceeds dense limit " + std::to_string(kMaxDenseSites));
  }
  const auto dim = static_cast<Eigen::Index>(model.dimension());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
  if (kind == OperatorKind::kH || kind == OperatorKind::kHZ) {
    const DiagonalObservable hz = hz_diagonal(model);
    for (Eigen::Index b = 0; b < dim; ++b) a(b, b) += hz.values[b];
  }
  if (kind == OperatorKind::kH || kind == OperatorKind::kHX) {
    for (int l = 0; l < model.n_sites; ++l) {
      const Eigen::Index mask = Eigen::Index{1} << l;
      for (Eigen::Index b = 0; b < dim; ++b) a(b ^ mask, b) += 0.5 * model.g;
    }
  }
  if (kind == OperatorKind::kM) {
    const DiagonalObservable m = magnetization_diagonal(model.n_sites);
    for (Eigen::Index b = 0; b < dim; ++b) a(b, b) = m.values[b];
  }
  return a;
}

DenseOperator build_dense(const IsingModel& model, OperatorKind kind) {
  return DenseOperator{build_dense_real(model, kind).cast<Complex>(), to_string(kind)};
}

Eigen::VectorXcd to_eigen(const SpinState& state) {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(state.dimension()));
  for (std::size_t b = 0; b < state.dimension(); ++b) v(static_cast<Eigen::Index>(b)) = state[b];
  return v;
}

SpinState from_eigen(int n_sites, const Eigen::VectorXcd& v) {
  return SpinState(n_sites, std::vector<Complex>(v.data(), v.data() + v.size()));
}

}  // namespace trotterlab
