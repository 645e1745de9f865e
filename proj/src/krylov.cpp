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

#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

#include "trotterlab/errors.hpp"
#include "trotterlab/evolvers.hpp"

namespace trotterlab {

namespace {

void apply_h(const Complex* in, Complex* out, const IsingModel& model, const std::vector<double>& hz) {
  const std::size_t dim = hz.size();
  for (std::size_t b = 0; b < dim; ++b) out[b] = hz[b] * in[b];
  const double half_g = 0.5 * model.g;
  for (int l = 0; l < model.n_sites; ++l) {
    const std::size_t mask = std::size_t{1} << l;
    for (std::size_t b = 0; b < dim; ++b) out[b] += half_g * in[b ^ mask];
  }
}

// exp(-i T dt) e_1 for the symmetric tridiagonal T given by its eigensystem.
Eigen::VectorXcd small_propagator(const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>& es, double dt) {
  const Eigen::MatrixXd& q = es.eigenvectors();
  const Eigen::VectorXd& lam = es.eigenvalues();
  const Eigen::Index m = lam.size();
  Eigen::VectorXcd coeff(m);
  for (Eigen::Index n = 0; n < m; ++n) coeff(n) = std::polar(q(0, n), -lam(n) * dt);
  return q.cast<Complex>() * coeff;
}

}  // namespace

void KrylovConfig::validate() const {
  if (max_dim < 2) throw ValidationError("KrylovConfig: max_dim must be >= 2");
  if (!(tol > 0.0)) throw ValidationError("KrylovConfig: tol must be positive");
  if (max_substeps < 1) throw ValidationError("KrylovConfig: max_substeps must be >= 1");
}

KrylovPropagator::KrylovPropagator(const IsingModel& model, KrylovConfig cfg)
    : model_(model), cfg_(cfg), hz_(hz_diagonal(model).values) {
  cfg_.validate();
  const auto dim = static_cast<Eigen::Index>(model.dimension());
  // A Krylov space never exceeds the Hilbert space dimension.
  const Eigen::Index cols = std::min<Eigen::Index>(cfg_.max_dim + 1, dim + 1);
  basis_.resize(dim, cols);
  work_.resize(dim);
}

void KrylovPropagator::evolve(SpinState& state, double t) {
  if (state.dimension() != hz_.size()) throw DimensionError("krylov_evolve: dimension mismatch");
  last_substeps_ = 0;
  last_max_dim_ = 0;
  if (t == 0.0) return;

  const auto dim = static_cast<Eigen::Index>(hz_.size());
  const Eigen::Index max_m = basis_.cols() - 1;
  Eigen::Map<Eigen::VectorXcd> psi(state.amplitudes().data(), dim);
  const double total = std::abs(t);
  double remaining = t;

  std::vector<double> alpha;
  std::vector<double> beta;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;

  while (remaining != 0.0) {
    if (last_substeps_ >= cfg_.max_substeps) {
      throw ConvergenceError("krylov_evolve: substep limit reached", std::abs(remaining));
    }
    const double beta0 = psi.norm();
    if (beta0 == 0.0) return;
    basis_.col(0) = psi / beta0;
    alpha.clear();
    beta.clear();

    double dt = remaining;
    Eigen::VectorXcd y;
    Eigen::Index m = 0;
    bool accepted = false;
    double last_estimate = 0.0;

    for (Eigen::Index j = 0; j < max_m && !accepted; ++j) {
      apply_h(basis_.col(j).data(), work_.data(), model_, hz_);
      // Full reorthogonalization against every previous vector, applied twice.
      for (int pass = 0; pass < 2; ++pass) {
        const Eigen::VectorXcd c = basis_.leftCols(j + 1).adjoint() * work_;
        work_.noalias() -= basis_.leftCols(j + 1) * c;
        if (pass == 0) alpha.push_back(c(j).real());
      }
      const double b = work_.norm();
      beta.push_back(b);
      m = j + 1;

      Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), m);
      Eigen::VectorXd sub = Eigen::Map<Eigen::VectorXd>(beta.data(), m - 1);
      es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);

      const double scale = std::max(1.0, diag.cwiseAbs().maxCoeff());
      const bool breakdown = b < 1e-13 * scale || m == dim;
      auto estimate = [&](double step) {
        if (breakdown) return 0.0;
        return b * std::abs(small_propagator(es, step)(m - 1));
      };
      auto budget = [&](double step) { return cfg_.tol * std::abs(step) / total; };

      last_estimate = estimate(dt);
      if (last_estimate <= budget(dt)) {
        accepted = true;
      } else if (m == max_m) {
        for (int halvings = 0; halvings < 64 && !accepted; ++halvings) {
          dt *= 0.5;
          last_estimate = estimate(dt);
          accepted = last_estimate <= budget(dt);
        }
        if (!accepted) {
          throw ConvergenceError("krylov_evolve: no convergence within max_dim and substeps",
                                 last_estimate);
        }
      }
      if (accepted) {
        y = small_propagator(es, dt);
      } else {
        basis_.col(j + 1) = work_ / b;
      }
    }
    if (!accepted) throw ConvergenceError("krylov_evolve: Krylov space exhausted", last_estimate);

    psi.noalias() = beta0 * (basis_.leftCols(m) * y);
    remaining -= dt;
    if (std::abs(remaining) < 1e-15 * total) remaining = 0.0;
    ++last_substeps_;
    last_max_dim_ = std::max<int>(last_max_dim_, static_cast<int>(m));
  }
}

SpinState krylov_evolve(const SpinState& state, const IsingModel& model, double t, const KrylovConfig& cfg) {
  SpinState out = state;
  KrylovPropagator(model, cfg).evolve(out, t);
  return out;
}

}  // namespace trotterlab
