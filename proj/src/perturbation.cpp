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

#include "trotterlab/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "trotterlab/errors.hpp"
#include "trotterlab/evolvers.hpp"
#include "trotterlab/linalg.hpp"

namespace trotterlab {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

void require_sites(const IsingModel& model, int max_sites, const char* what) {
  model.validate();
  if (model.n_sites > max_sites) {
    throw CapacityError(std::string(what) + ": N=" + std::to_string(model.n_sites) + " exceeds " +
                        std::to_string(max_sites));
  }
}

// Matrix-free real operators acting on every column of a D x k block.
class ColumnOps {
 public:
  explicit ColumnOps(const IsingModel& model)
      : n_(model.n_sites), half_g_(0.5 * model.g) {
    const DiagonalObservable hz = hz_diagonal(model);
    const DiagonalObservable m = magnetization_diagonal(model.n_sites);
    z_ = Eigen::Map<const VectorXd>(hz.values.data(), static_cast<Index>(hz.values.size()));
    m_ = Eigen::Map<const VectorXd>(m.values.data(), static_cast<Index>(m.values.size()));
  }

  const VectorXd& z() const { return z_; }
  const VectorXd& m() const { return m_; }

  MatrixXd x(const MatrixXd& in) const {
    MatrixXd out = MatrixXd::Zero(in.rows(), in.cols());
    const std::size_t dim = static_cast<std::size_t>(in.rows());
    for (Index c = 0; c < in.cols(); ++c) {
      const double* src = in.col(c).data();
      double* dst = out.col(c).data();
      for (int l = 0; l < n_; ++l) {
        const std::size_t bit = std::size_t{1} << l;
        for (std::size_t b = 0; b < dim; ++b) dst[b] += src[b ^ bit];
      }
    }
    out *= half_g_;
    return out;
  }

  MatrixXd diag(const VectorXd& d, const MatrixXd& in) const { return d.asDiagonal() * in; }

  // [Z,[Z,X]] Y = Z^2 X Y - 2 Z X Z Y + X Z^2 Y
  MatrixXd zzx(const MatrixXd& y) const {
    const VectorXd z2 = z_.cwiseProduct(z_);
    return diag(z2, x(y)) - 2.0 * diag(z_, x(diag(z_, y))) + x(diag(z2, y));
  }

  // [X,[X,Z]] Y = X X Z Y - 2 X Z X Y + Z X X Y
  MatrixXd xxz(const MatrixXd& y) const {
    const MatrixXd xy = x(y);
    return x(x(diag(z_, y))) - 2.0 * x(diag(z_, xy)) + diag(z_, x(xy));
  }

  // C2 = -(1/12)[X - Z, [X, Z]] = -(1/12)([X,[X,Z]] + [Z,[Z,X]])
  MatrixXd c2(const MatrixXd& y) const { return -(xxz(y) + zzx(y)) / 12.0; }

  // [X, M] Z Y
  MatrixXd xm_z(const MatrixXd& y) const {
    const MatrixXd zy = diag(z_, y);
    return x(diag(m_, zy)) - diag(m_, x(zy));
  }

  // [Z, X] Z Y
  MatrixXd zx_z(const MatrixXd& y) const {
    const MatrixXd zy = diag(z_, y);
    return diag(z_, x(zy)) - x(diag(z_, zy));
  }

 private:
  int n_;
  double half_g_;
  VectorXd z_;
  VectorXd m_;
};

// Columns phi_B = sum_{lambda in B} c_lambda |lambda>.
MatrixXd block_projected_states(const HamiltonianSpectrum& spec) {
  const int nb = spec.block_count();
  MatrixXd phi = MatrixXd::Zero(spec.vectors.rows(), nb);
  for (int b = 0; b < nb; ++b) {
    for (int k = spec.block_start[b]; k < spec.block_start[b + 1]; ++k) {
      phi.col(b) += spec.overlaps(k) * spec.vectors.col(k);
    }
  }
  return phi;
}

// sum_B <phi_B|O|phi_B> given O phi.
double diagonal_ensemble(const MatrixXd& phi, const MatrixXd& o_phi) {
  return phi.cwiseProduct(o_phi).sum();
}

MatrixXd gram_real(const MatrixXd& a) { return a.transpose() * a; }

}  // namespace

MagnusOperators build_magnus(const IsingModel& model) {
  require_sites(model, kMaxMagnusSites, "build_magnus");
  const MatrixXd x = build_dense_real(model, OperatorKind::kHX);
  const MatrixXd z = build_dense_real(model, OperatorKind::kHZ);
  const MatrixXd k = x * z - z * x;  // [H_X, H_Z], real antisymmetric
  const MatrixXd d = x - z;
  MagnusOperators ops;
  ops.model = model;
  ops.c1.matrix = Complex(0.0, 0.5) * k.cast<Complex>();
  ops.c1.label = "C1";
  ops.c2.matrix = (-(d * k - k * d) / 12.0).cast<Complex>();
  ops.c2.label = "C2";
  for (const DenseOperator* op : {&ops.c1, &ops.c2}) {
    const double scale = std::max(1.0, linalg::max_abs(op->matrix));
    if (linalg::max_abs(op->matrix - op->matrix.adjoint()) > 1e-12 * scale) {
      throw ContractViolation("build_magnus: " + op->label + " is not Hermitian");
    }
  }
  return ops;
}

DenseOperator magnus_hf(const MagnusOperators& ops, double tau, int order) {
  if (order != 1 && order != 2) throw ValidationError("magnus_hf: order must be 1 or 2");
  DenseOperator out = build_dense(ops.model, OperatorKind::kH);
  if (tau != 0.0) {
    out.matrix += tau * ops.c1.matrix;
    if (order == 2) out.matrix += (tau * tau) * ops.c2.matrix;
  }
  out.label = "H_F^(" + std::to_string(order) + ")";
  return out;
}

DenseOperator magnus_hf(const IsingModel& model, double tau, int order) {
  return magnus_hf(build_magnus(model), tau, order);
}

double magnus_period_defect(const IsingModel& model, double tau, int order) {
  const DenseOperator hf = magnus_hf(model, tau, order);
  const Eigen::MatrixXcd diff = linalg::expm_hermitian(hf.matrix, tau) - trotter_unitary_dense(model, tau);
  return linalg::spectral_norm(diff);
}

double lloyd_commutator_bound(const IsingModel& model, double t, int n) {
  require_sites(model, kMaxLloydSites, "lloyd_commutator_bound");
  if (n < 1) throw ValidationError("lloyd_commutator_bound: n must be >= 1");
  const MatrixXd x = build_dense_real(model, OperatorKind::kHX);
  const MatrixXd z = build_dense_real(model, OperatorKind::kHZ);
  const MatrixXd k = z * x - x * z;
  // Spectral norm of a real matrix through its Gram matrix.
  const linalg::SymmetricEigen eig = linalg::symmetric_eigh(gram_real(k));
  const double norm = std::sqrt(std::max(0.0, eig.values(eig.values.size() - 1)));
  return t * t / (2.0 * n) * norm;
}

double measured_global_defect(const IsingModel& model, double t, int n) {
  require_sites(model, kMaxLloydSites, "measured_global_defect");
  if (n < 1) throw ValidationError("measured_global_defect: n must be >= 1");
  const double tau = t / n;
  Eigen::MatrixXcd base = trotter_unitary_dense(model, tau);
  Eigen::MatrixXcd power = Eigen::MatrixXcd::Identity(base.rows(), base.cols());
  for (int e = n; e > 0; e >>= 1) {
    if (e & 1) power = power * base;
    if (e > 1) base = base * base;
  }
  const Eigen::MatrixXcd exact = linalg::expm_hermitian(build_dense(model, OperatorKind::kH).matrix, t);
  return linalg::spectral_norm(exact - power);
}

HamiltonianSpectrum diagonalize_hamiltonian(const IsingModel& model, double degeneracy_tol) {
  require_sites(model, kMaxMagnusSites, "diagonalize_hamiltonian");
  if (!(degeneracy_tol >= 0.0)) throw ValidationError("degeneracy_tol must be non-negative");
  linalg::SymmetricEigen eig = linalg::symmetric_eigh(build_dense_real(model, OperatorKind::kH));
  HamiltonianSpectrum spec;
  spec.model = model;
  spec.degeneracy_tol = degeneracy_tol;
  spec.energies = std::move(eig.values);
  spec.vectors = std::move(eig.vectors);
  spec.overlaps = spec.vectors.row(0).transpose();
  const Index dim = spec.energies.size();
  spec.block_of.assign(static_cast<std::size_t>(dim), 0);
  std::vector<double> block_energy;
  double sum = 0.0;
  int count = 0;
  spec.min_gap = std::numeric_limits<double>::infinity();
  for (Index k = 0; k < dim; ++k) {
    if (k == 0 || spec.energies(k) - spec.energies(k - 1) >= degeneracy_tol) {
      if (k > 0) {
        block_energy.push_back(sum / count);
        if (count > 1) ++spec.degenerate_blocks;
        spec.min_gap = std::min(spec.min_gap, spec.energies(k) - spec.energies(k - 1));
      }
      spec.block_start.push_back(static_cast<int>(k));
      sum = 0.0;
      count = 0;
    }
    sum += spec.energies(k);
    ++count;
    spec.block_of[static_cast<std::size_t>(k)] = static_cast<int>(spec.block_start.size()) - 1;
  }
  block_energy.push_back(sum / count);
  if (count > 1) ++spec.degenerate_blocks;
  spec.block_start.push_back(static_cast<int>(dim));
  spec.block_energy = Eigen::Map<const VectorXd>(block_energy.data(), static_cast<Index>(block_energy.size()));
  spec.orthonormality_error =
      (gram_real(spec.vectors) - MatrixXd::Identity(dim, dim)).cwiseAbs().maxCoeff();
  return spec;
}

QeCoefficient compute_qE(const HamiltonianSpectrum& spec) {
  const IsingModel& model = spec.model;
  QeCoefficient out;
  out.e0 = hz_diagonal(model).values[0];
  if (out.e0 == 0.0 || model.h == 0.0) {
    throw IllConditionedError("compute_qE: normalization needs E_0 != 0 and h != 0");
  }
  const ColumnOps ops(model);
  const MatrixXd phi = block_projected_states(spec);
  MatrixXd psi0 = MatrixXd::Zero(spec.vectors.rows(), 1);
  psi0(0, 0) = 1.0;
  const double c2_initial = ops.c2(psi0)(0, 0);
  const double c2_ensemble = diagonal_ensemble(phi, ops.c2(phi));
  const double zzx_ensemble = diagonal_ensemble(phi, ops.zzx(phi));
  out.bracket = c2_initial - c2_ensemble - 0.25 * zzx_ensemble;
  out.value = -out.bracket / (model.h * model.h * out.e0);
  out.value_j2_prefactor = out.bracket / (model.J * model.J * out.e0);
  out.normalization_factor = out.value_j2_prefactor != 0.0 ? out.value / out.value_j2_prefactor : 0.0;
  return out;
}

QeCoefficient compute_qE(const IsingModel& model) { return compute_qE(diagonalize_hamiltonian(model)); }

namespace {

// First-order change of the diagonal-ensemble magnetization under a
// perturbation with eigenbasis matrix ce, split into the weight and the
// eigenvector contributions. Pairs inside one block are skipped.
struct LehmannPair {
  double weight = 0.0;
  double vector = 0.0;
};

LehmannPair lehmann_sums(const HamiltonianSpectrum& spec, const MatrixXd& ce, const MatrixXd& me,
                         const VectorXd& w) {
  const Index dim = spec.energies.size();
  const VectorXd& c = spec.overlaps;
  LehmannPair out;
  VectorXd u(dim);
  VectorXd big_w(dim);
  for (int b = 0; b < spec.block_count(); ++b) {
    const int lo = spec.block_start[b];
    const int hi = spec.block_start[b + 1];
    u.setZero();
    big_w.setZero();
    VectorXd cw = VectorXd::Zero(dim);  // sum_{lambda in B} ce(k, lambda) w_lambda
    for (int l = lo; l < hi; ++l) {
      u += c(l) * ce.col(l);
      big_w += c(l) * me.col(l);
      cw += w(l) * ce.col(l);
    }
    for (Index k = 0; k < dim; ++k) {
      const int bk = spec.block_of[static_cast<std::size_t>(k)];
      if (bk == b) continue;
      const double inv = 1.0 / (spec.block_energy(b) - spec.block_energy(bk));
      out.weight += inv * c(k) * cw(k);
      out.vector += inv * u(k) * big_w(k);
    }
  }
  out.weight *= 2.0;
  out.vector *= 2.0;
  return out;
}

}  // namespace

MCoefficient compute_m(const HamiltonianSpectrum& spec) {
  const IsingModel& model = spec.model;
  if (model.h == 0.0) throw IllConditionedError("compute_m: (h tau)^2 normalization needs h != 0");
  MCoefficient out;
  out.degeneracy_tol = spec.degeneracy_tol;
  const ColumnOps ops(model);
  const MatrixXd& v = spec.vectors;
  const VectorXd& c = spec.overlaps;
  const Index dim = v.rows();

  const MatrixXd me = v.transpose() * ops.diag(ops.m(), v);
  VectorXd w = VectorXd::Zero(dim);  // w_lambda = sum_{mu in block(lambda)} M_{lambda mu} c_mu
  for (int b = 0; b < spec.block_count(); ++b) {
    for (int l = spec.block_start[b]; l < spec.block_start[b + 1]; ++l) {
      for (int mu = spec.block_start[b]; mu < spec.block_start[b + 1]; ++mu) w(l) += me(l, mu) * c(mu);
    }
  }

  // Symmetric-splitting frame: U1 U2 = e^{-i tau Z/2} S e^{i tau Z/2} with
  // S = exp(-i tau (H + tau^2 C_S + ...)) and
  // C_S = (1/24)[Z,[Z,X]] - (1/12)[X,[X,Z]]. M commutes with Z and psi_0 is a
  // Z eigenstate, so the stroboscopic M is that of S alone.
  MatrixXd ce = v.transpose() * ops.zzx(v);
  const LehmannPair zzx = lehmann_sums(spec, ce, me, w);
  ce = v.transpose() * ops.xxz(v);
  const LehmannPair xxz = lehmann_sums(spec, ce, me, w);
  out.zzx_weight = zzx.weight / 24.0;
  out.zzx_vector = zzx.vector / 24.0;
  out.xxz_weight = -xxz.weight / 12.0;
  out.xxz_vector = -xxz.vector / 12.0;
  out.shift_per_tau2 = out.zzx_weight + out.zzx_vector + out.xxz_weight + out.xxz_vector;
  out.value = -out.shift_per_tau2 / (model.h * model.h);

  // Diagnostic: anticommutator + Lehmann expression written in the
  // non-symmetric frame, with E_Z the H_Z eigenvalue of psi_0.
  const MatrixXd phi = block_projected_states(spec);
  const VectorXd& z = ops.z();
  const double ez = z(0);
  const VectorXd t1_diag = (2.0 * z.cwiseProduct(z) - VectorXd::Constant(dim, ez * ez)).cwiseProduct(ops.m());
  const double t1 = diagonal_ensemble(phi, ops.diag(t1_diag, phi));
  const double t2 = diagonal_ensemble(phi, ops.xm_z(phi));
  ce = v.transpose() * ops.zx_z(v);
  double t3 = 0.0;
  double t4 = 0.0;
  for (Index lp = 0; lp < dim; ++lp) {
    for (Index l = 0; l < dim; ++l) {
      const int bl = spec.block_of[static_cast<std::size_t>(l)];
      const int blp = spec.block_of[static_cast<std::size_t>(lp)];
      if (bl == blp) continue;
      const double inv = 1.0 / (spec.block_energy(bl) - spec.block_energy(blp));
      t3 += c(l) * c(l) * inv * ce(l, lp) * me(lp, l);
      t4 += me(l, l) * inv * c(l) * c(lp) * ce(l, lp);
    }
  }
  out.alternative_terms[0] = t1;
  out.alternative_terms[1] = t2;
  out.alternative_terms[2] = t3;
  out.alternative_terms[3] = t4;
  out.alternative_value = (t1 / 12.0 - t2 / 6.0 + t3 / 6.0 + t4 / 6.0) / (model.J * model.J);
  return out;
}

MCoefficient compute_m(const IsingModel& model, double degeneracy_tol) {
  return compute_m(diagonalize_hamiltonian(model, degeneracy_tol));
}

nlohmann::json to_json(const HamiltonianSpectrum& spec) {
  return {{"N", spec.model.n_sites},
          {"dimension", spec.energies.size()},
          {"degeneracy_tol", spec.degeneracy_tol},
          {"degenerate_blocks", spec.degenerate_blocks},
          {"block_count", spec.block_count()},
          {"min_block_gap", spec.min_gap},
          {"orthonormality_error", spec.orthonormality_error}};
}

nlohmann::json to_json(const QeCoefficient& qe) {
  return {{"q_E", qe.value},
          {"normalization", "(h tau)^2"},
          {"bracket", qe.bracket},
          {"E0", qe.e0},
          {"q_E_j2_prefactor", qe.value_j2_prefactor},
          {"normalization_factor", qe.normalization_factor}};
}

nlohmann::json to_json(const MCoefficient& m) {
  return {{"m", m.value},
          {"normalization", "(h tau)^2"},
          {"shift_per_tau2", m.shift_per_tau2},
          {"terms",
           {{"zzx_weight", m.zzx_weight},
            {"zzx_vector", m.zzx_vector},
            {"xxz_weight", m.xxz_weight},
            {"xxz_vector", m.xxz_vector}}},
          {"alternative_terms",
           {m.alternative_terms[0], m.alternative_terms[1], m.alternative_terms[2], m.alternative_terms[3]}},
          {"alternative_value_per_j2", m.alternative_value},
          {"degeneracy_tol", m.degeneracy_tol}};
}

}  // namespace trotterlab
