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

#include <complex>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "trotterlab/errors.hpp"
#include "trotterlab/linalg.hpp"

namespace trotterlab::linalg {

SymmetricEigen symmetric_eigh(Eigen::MatrixXd a) {
  const auto n = static_cast<lapack_int>(a.rows());
  if (a.rows() != a.cols()) throw DimensionError("symmetric_eigh: matrix not square");
  Eigen::VectorXd w(n);
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', n, a.data(), n, w.data());
  if (info != 0) throw ConvergenceError("dsyevd failed, info=" + std::to_string(info), info);
  return SymmetricEigen{std::move(w), std::move(a)};
}

HermitianEigen hermitian_eigh(Eigen::MatrixXcd a) {
  const auto n = static_cast<lapack_int>(a.rows());
  if (a.rows() != a.cols()) throw DimensionError("hermitian_eigh: matrix not square");
  Eigen::VectorXd w(n);
  const lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'U', n, a.data(), n, w.data());
  if (info != 0) throw ConvergenceError("zheevd failed, info=" + std::to_string(info), info);
  return HermitianEigen{std::move(w), std::move(a)};
}

SchurForm complex_schur(Eigen::MatrixXcd a) {
  const auto n = static_cast<lapack_int>(a.rows());
  if (a.rows() != a.cols()) throw DimensionError("complex_schur: matrix not square");
  Eigen::VectorXcd w(n);
  Eigen::MatrixXcd vs(n, n);
  lapack_int sdim = 0;
  const lapack_int info = LAPACKE_zgees(LAPACK_COL_MAJOR, 'V', 'N', nullptr, n, a.data(), n,
                                        &sdim, w.data(), vs.data(), n);
  if (info != 0) throw ConvergenceError("zgees failed, info=" + std::to_string(info), info);
  double off = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < j; ++i) off = std::max(off, std::abs(a(i, j)));
  }
  return SchurForm{std::move(w), std::move(vs), off};
}

Eigen::MatrixXcd expm_hermitian(const Eigen::MatrixXcd& a, double t) {
  const HermitianEigen eig = hermitian_eigh(a);
  Eigen::VectorXcd phases(eig.values.size());
  for (Eigen::Index k = 0; k < phases.size(); ++k) {
    phases(k) = std::exp(std::complex<double>(0.0, -t * eig.values(k)));
  }
  return eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
}

double spectral_norm(const Eigen::MatrixXcd& a) {
  const Eigen::MatrixXcd gram = a.adjoint() * a;
  const HermitianEigen eig = hermitian_eigh(gram);
  return std::sqrt(std::max(0.0, eig.values(eig.values.size() - 1)));
}

double max_abs(const Eigen::MatrixXcd& a) { return a.cwiseAbs().maxCoeff(); }

}  // namespace trotterlab::linalg
