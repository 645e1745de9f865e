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

#include <gtest/gtest.h>

#include <array>
#include <numbers>

#include "oracles.hpp"
#include "trotterlab/errors.hpp"
#include "trotterlab/evolvers.hpp"

namespace trotterlab {
namespace {

TEST(TrotterPeriod, SingleSiteMatchesTwoByTwoProduct) {
  const IsingModel m{1, 1.0, 2.0, 2.0};
  const double tau = 0.1;
  const SpinState out = trotter_period(make_all_up_state(1), m, tau);
  const Eigen::VectorXcd expected = oracle::trotter_period(m, tau) * oracle::all_up(1);
  EXPECT_LT(oracle::max_abs_diff(out, expected), 1e-14);
}

TEST(TrotterPeriod, TinyStepIsIdentity) {
  const IsingModel m{6, 1.0, 2.0, 2.0};
  const SpinState psi = oracle::random_state(6, 7);
  EXPECT_LT(oracle::max_abs_diff(trotter_period(psi, m, 1e-8), to_eigen(psi)), 1e-7);
}

TEST(TrotterPeriod, TenPeriodsAtSixSites) {
  const IsingModel m{6, 1.0, 2.0, 2.0};
  const double tau = 0.3;
  const SpinState out = trotter_evolve(make_all_up_state(6), m, TrotterConfig{tau, 10});
  const Eigen::MatrixXcd u = oracle::trotter_period(m, tau);
  Eigen::VectorXcd v = oracle::all_up(6);
  for (int n = 0; n < 10; ++n) v = u * v;
  EXPECT_LT(oracle::max_abs_diff(out, v), 1e-10);
}

// Oracle equivalence over N <= 8 and tau in {0.01, 0.1, 0.5, 1.0}, 100 periods,
// random initial states and a few coupling choices.
class TrotterOracle : public ::testing::TestWithParam<std::tuple<int, double>> {};

TEST_P(TrotterOracle, HundredPeriods) {
  const auto [n, tau] = GetParam();
  for (const IsingModel m : {IsingModel{n, 1.0, 2.0, 2.0}, IsingModel{n, -0.6, 0.3, 1.7}}) {
    const SpinState psi0 = oracle::random_state(n, 31 * n + static_cast<int>(100 * tau));
    const Eigen::MatrixXcd u = oracle::trotter_period(m, tau);
    Eigen::VectorXcd v = to_eigen(psi0);
    SpinState psi = psi0;
    const TrotterPropagator prop(m, tau);
    for (int k = 0; k < 100; ++k) {
      prop.step(psi);
      v = u * v;
    }
    EXPECT_LT(oracle::max_abs_diff(psi, v), 1e-9) << "N=" << n << " tau=" << tau;
  }
}

INSTANTIATE_TEST_SUITE_P(Grid, TrotterOracle,
                         ::testing::Combine(::testing::Values(1, 2, 3, 5, 8),
                                            ::testing::Values(0.01, 0.1, 0.5, 1.0)));

TEST(TrotterPeriod, InverseUndoesStep) {
  const IsingModel m{7, 1.0, 2.0, 2.0};
  const TrotterPropagator prop(m, 0.37);
  const SpinState psi0 = oracle::random_state(7, 3);
  SpinState psi = psi0;
  for (int k = 0; k < 50; ++k) prop.step(psi);
  for (int k = 0; k < 50; ++k) prop.step_inverse(psi);
  EXPECT_LT(oracle::max_abs_diff(psi, to_eigen(psi0)), 1e-12);
}

TEST(TrotterPeriod, LeadingDefectIsQuadratic) {
  const IsingModel m{5, 1.0, 2.0, 2.0};
  const Eigen::MatrixXcd h = oracle::hz(m) + oracle::hx(m);
  std::vector<double> taus;
  std::vector<double> defects;
  for (double tau = 0.04; tau > 0.004; tau /= 2) {
    taus.push_back(tau);
    defects.push_back((oracle::expm(h, tau) - trotter_unitary_dense(m, tau)).cwiseAbs().maxCoeff());
  }
  EXPECT_NEAR(oracle::loglog_slope(taus, defects), 2.0, 0.1);
}

TEST(TrotterPeriod, NormDriftOverLongRun) {
  const IsingModel m{8, 1.0, 2.0, 2.0};
  const TrotterPropagator prop(m, 0.5);
  SpinState psi = make_all_up_state(8);
  NormGuard guard;
  for (long n = 1; n <= 20000; ++n) {
    prop.step(psi);
    guard.after_period(psi, n);
  }
  EXPECT_LT(std::abs(psi.norm() - 1.0), 1e-8);
  EXPECT_LT(guard.max_drift(), 1e-8);
}

TEST(TrotterConfig, Validation) {
  EXPECT_THROW((TrotterConfig{0.0, 1}.validate()), ValidationError);
  EXPECT_THROW((TrotterConfig{0.1, 0}.validate()), ValidationError);
}

TEST(Krylov, MatchesDenseExponential) {
  const IsingModel m{8, 1.0, 2.0, 2.0};
  const Eigen::MatrixXcd h = oracle::hz(m) + oracle::hx(m);
  const SpinState psi = oracle::random_state(8, 11);
  const SpinState out = krylov_evolve(psi, m, 1.0);
  EXPECT_LT((to_eigen(out) - oracle::expm(h, 1.0) * to_eigen(psi)).norm(), 1e-8);
}

TEST(Krylov, ZeroTimeIsIdentity) {
  const IsingModel m{6, 1.0, 2.0, 2.0};
  const SpinState psi = oracle::random_state(6, 5);
  EXPECT_EQ(to_eigen(krylov_evolve(psi, m, 0.0)), to_eigen(psi));
}

TEST(Krylov, ForwardThenBackward) {
  const IsingModel m{9, 1.0, 2.0, 2.0};
  const SpinState psi = oracle::random_state(9, 6);
  const SpinState back = krylov_evolve(krylov_evolve(psi, m, 3.0), m, -3.0);
  EXPECT_LT((to_eigen(back) - to_eigen(psi)).norm(), 1e-8);
  EXPECT_NEAR(back.norm(), 1.0, 1e-10);
}

TEST(Krylov, LongTimesAtTenSites) {
  const IsingModel m{10, 1.0, 2.0, 2.0};
  const Eigen::MatrixXcd h = oracle::hz(m) + oracle::hx(m);
  const SpinState psi = make_all_up_state(10);
  for (double t : {2.5, 10.0}) {
    const SpinState out = krylov_evolve(psi, m, t);
    EXPECT_LT((to_eigen(out) - oracle::expm(h, t) * to_eigen(psi)).norm(), 1e-8) << "t=" << t;
  }
}

TEST(Krylov, ReportsNonConvergence) {
  const IsingModel m{8, 1.0, 2.0, 2.0};
  KrylovConfig cfg;
  cfg.max_dim = 2;
  cfg.tol = 1e-12;
  cfg.max_substeps = 3;
  try {
    krylov_evolve(oracle::random_state(8, 1), m, 50.0, cfg);
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_GT(e.residual(), 0.0);
  }
}

TEST(DenseEigh, SingleSiteHx) {
  const IsingModel m{1, 1.0, 2.0, 2.0};
  const EigenDecomposition eig = dense_eigh(build_dense(m, OperatorKind::kHX));
  EXPECT_NEAR(eig.energies(0), -1.0, 1e-14);
  EXPECT_NEAR(eig.energies(1), 1.0, 1e-14);
}

TEST(DenseEigh, InvariantsAtEightSites) {
  const IsingModel m{8, 1.0, 2.0, 2.0};
  const DenseOperator h = build_dense(m, OperatorKind::kH);
  const EigenDecomposition eig = dense_eigh(h);
  const Eigen::MatrixXcd& v = eig.vectors;
  const double scale = h.matrix.cwiseAbs().maxCoeff();
  EXPECT_LE((h.matrix - v * eig.energies.cast<Complex>().asDiagonal() * v.adjoint()).cwiseAbs().maxCoeff(),
            1e-10 * scale);
  EXPECT_LE((v.adjoint() * v - Eigen::MatrixXcd::Identity(256, 256)).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_NEAR(eig.energies.sum(), 0.0, 1e-10);
  EXPECT_NEAR(v.row(0).squaredNorm(), 1.0, 1e-12);
  for (Eigen::Index k = 1; k < eig.energies.size(); ++k) EXPECT_LE(eig.energies(k - 1), eig.energies(k));
}

TEST(DenseEigh, RejectsNonHermitian) {
  DenseOperator op{Eigen::MatrixXcd::Zero(2, 2), "bad"};
  op.matrix(0, 1) = 1.0;
  EXPECT_THROW(dense_eigh(op), ContractViolation);
}

TEST(Floquet, UnitaryReconstructionAndCompleteness) {
  const IsingModel m{6, 1.0, 2.0, 2.0};
  const double tau = 0.4;
  const EigenDecomposition f = floquet_eigensystem(m, tau);
  Eigen::VectorXcd phases(f.energies.size());
  for (Eigen::Index k = 0; k < phases.size(); ++k) {
    phases(k) = std::polar(1.0, -f.energies(k) * tau);
    EXPECT_GT(f.energies(k), -std::numbers::pi / tau);
    EXPECT_LE(f.energies(k), std::numbers::pi / tau);
  }
  const Eigen::MatrixXcd rebuilt = f.vectors * phases.asDiagonal() * f.vectors.adjoint();
  EXPECT_LT((rebuilt - oracle::trotter_period(m, tau)).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_NEAR(f.vectors.row(0).squaredNorm(), 1.0, 1e-10);
}

TEST(Floquet, SmallStepApproachesHamiltonianSpectrum) {
  const IsingModel m{6, 1.0, 2.0, 2.0};
  const double tau = 1e-3;
  const EigenDecomposition f = floquet_eigensystem(m, tau);
  const EigenDecomposition h = dense_eigh(build_dense(m, OperatorKind::kH));
  // H_F = H + tau C1 + ..., and ||C1|| is a few units here.
  EXPECT_LT((f.energies - h.energies).cwiseAbs().maxCoeff(), 10.0 * tau);
}

}  // namespace
}  // namespace trotterlab
