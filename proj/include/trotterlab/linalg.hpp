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

#include <Eigen/Dense>

// Thin wrappers over LAPACK drivers for the dense small-N paths.
namespace trotterlab::linalg {

struct SymmetricEigen {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // columns
};

struct HermitianEigen {
  Eigen::VectorXd values;    // ascending
  Eigen::MatrixXcd vectors;  // columns
};

struct SchurForm {
  Eigen::VectorXcd eigenvalues;  // diagonal of the triangular factor
  Eigen::MatrixXcd vectors;      // unitary Schur vectors
  double max_off_diagonal = 0.0; // size of the strictly upper part
};

SymmetricEigen symmetric_eigh(Eigen::MatrixXd a);
HermitianEigen hermitian_eigh(Eigen::MatrixXcd a);
SchurForm complex_schur(Eigen::MatrixXcd a);

// exp(-i t A) for Hermitian A through its eigendecomposition.
Eigen::MatrixXcd expm_hermitian(const Eigen::MatrixXcd& a, double t);

// Largest singular value.
double spectral_norm(const Eigen::MatrixXcd& a);

double max_abs(const Eigen::MatrixXcd& a);

}  // namespace trotterlab::linalg
