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

#include <sstream>

#include "oracles.hpp"
#include "trotterlab/errors.hpp"
#include "trotterlab/observables.hpp"

namespace trotterlab {
namespace {

const std::set<Observable> kAll{Observable::kMagnetization, Observable::kEnergy, Observable::kAccuracy,
                                Observable::kLoschmidt};

TEST(RunDynamics, InitialValues) {
  const IsingModel m{6, 1.0, 2.0, 2.0};
  const TrajectorySet set = run_dynamics(m, 0.2, 10, kAll);
  EXPECT_DOUBLE_EQ(set.at(Observable::kMagnetization).values[0].real(), 0.5);
  EXPECT_DOUBLE_EQ(set.at(Observable::kAccuracy).values[0].real(), 0.0);
  EXPECT_DOUBLE_EQ(set.at(Observable::kLoschmidt).values[0].real(), 1.0);
  EXPECT_DOUBLE_EQ(set.at(Observable::kEnergy).values[0].real(), 0.25 * 5 + 2.0 * 3);
  for (const auto& [obs, rec] : set) {
    EXPECT_EQ(rec.size(), 11u);
    EXPECT_NO_THROW(rec.validate());
  }
}

TEST(RunDynamics, MatchesDenseObservables) {
  const IsingModel m{5, 1.0, 2.0, 2.0};
  const double tau = 0.35;
  const TrajectorySet set = run_dynamics(m, tau, 30, kAll);
  const Eigen::MatrixXcd u = oracle::trotter_period(m, tau);
  const Eigen::MatrixXcd h = oracle::hz(m) + oracle::hx(m);
  const Eigen::MatrixXcd mm = oracle::magnetization(5);
  const Eigen::VectorXcd psi0 = oracle::all_up(5);
  const double e0 = (psi0.adjoint() * h * psi0)(0).real();
  Eigen::VectorXcd v = psi0;
  for (int n = 0; n <= 30; ++n) {
    const double e = (v.adjoint() * h * v)(0).real();
    EXPECT_NEAR(set.at(Observable::kEnergy).values[n].real(), e, 1e-10);
    EXPECT_NEAR(set.at(Observable::kAccuracy).values[n].real(), (e - e0) / (0.0 - e0), 1e-10);
    EXPECT_NEAR(set.at(Observable::kMagnetization).values[n].real(), (v.adjoint() * mm * v)(0).real(), 1e-10);
    EXPECT_NEAR(set.at(Observable::kLoschmidt).values[n].real(), std::norm(v(0)), 1e-10);
    v = u * v;
  }
}

TEST(RunDynamics, SmallStepKeepsAccuracyNearZero) {
  const IsingModel m{8, 1.0, 2.0, 2.0};
  const TrajectorySet set = run_dynamics(m, 1e-3, 1000, {Observable::kAccuracy});
  for (const Complex& q : set.at(Observable::kAccuracy).values) EXPECT_LE(std::abs(q.real()), 1e-3);
}

TEST(RunDynamics, AccuracyNeedsNonzeroInitialEnergy) {
  const IsingModel m{3, 1.0, 0.0, 2.0};
  // E_0 = J (N-1)/4 != 0 here, so this works ...
  EXPECT_NO_THROW(run_dynamics(m, 0.1, 2, {Observable::kAccuracy}));
  // ... but a single site without field has E_0 = 0.
  EXPECT_THROW(run_dynamics(IsingModel{1, 1.0, 0.0, 2.0}, 0.1, 2, {Observable::kAccuracy}), IllConditionedError);
}

TEST(ExactReference, ConservesEnergy) {
  const IsingModel m{10, 1.0, 2.0, 2.0};
  std::vector<double> times;
  for (int k = 0; k <= 40; ++k) times.push_back(0.25 * k);
  const TrajectorySet set = exact_reference(m, times, {Observable::kEnergy, Observable::kMagnetization});
  const double e0 = set.at(Observable::kEnergy).values[0].real();
  for (const Complex& e : set.at(Observable::kEnergy).values) EXPECT_LE(std::abs(e.real() - e0), 1e-8 * 10);
  for (const Complex& v : set.at(Observable::kMagnetization).values) EXPECT_EQ(v.imag(), 0.0);
}

TEST(ExactReference, TwoSiteClosedForm) {
  const IsingModel m{2, 1.0, 2.0, 2.0};
  const Eigen::MatrixXcd h = oracle::hz(m) + oracle::hx(m);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  const double t = 1.7;
  Eigen::VectorXcd phase(4);
  for (int k = 0; k < 4; ++k) phase(k) = std::polar(1.0, -es.eigenvalues()(k) * t);
  const Eigen::VectorXcd psi = es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint() * oracle::all_up(2);
  const double mag = (psi.adjoint() * oracle::magnetization(2) * psi)(0).real();
  const TrajectorySet set = exact_reference(m, {0.0, t}, {Observable::kMagnetization});
  EXPECT_NEAR(set.at(Observable::kMagnetization).values[1].real(), mag, 1e-10);
}

TEST(ExactReference, RejectsUnevenGrid) {
  const IsingModel m{4, 1.0, 2.0, 2.0};
  EXPECT_THROW(exact_reference(m, {0.0, 0.1, 0.3}, {Observable::kMagnetization}), ValidationError);
  EXPECT_THROW(exact_reference(m, {}, {Observable::kMagnetization}), ValidationError);
}

TEST(TrotterError, StartsAtZeroAndMatchesSingleSiteProducts) {
  const IsingModel m{1, 1.0, 2.0, 2.0};
  const double tau = 0.2;
  const TrotterErrorResult r = trotter_error_trajectory(m, tau, 25);
  EXPECT_EQ(r.delta.values[0].real(), 0.0);
  const Eigen::MatrixXcd u = oracle::trotter_period(m, tau);
  const Eigen::MatrixXcd h = oracle::hz(m) + oracle::hx(m);
  const Eigen::MatrixXcd mm = oracle::magnetization(1);
  Eigen::VectorXcd v = oracle::all_up(1);
  for (int n = 0; n <= 25; ++n) {
    const Eigen::VectorXcd w = oracle::expm(h, n * tau) * oracle::all_up(1);
    const double d = std::abs((w.adjoint() * mm * w)(0).real() - (v.adjoint() * mm * v)(0).real());
    EXPECT_NEAR(r.delta.values[n].real(), d, 1e-9);
    EXPECT_NEAR(r.normalized.values[n].real(), d / std::pow(m.h * tau, 2), 1e-8);
    v = u * v;
  }
}

TEST(StroboscopicAverage, ConstantAndAlternating) {
  const std::vector<double> c(10, 3.5);
  const LongTimeAverage a = stroboscopic_average(c, 4);
  EXPECT_DOUBLE_EQ(a.mean, 3.5);
  EXPECT_DOUBLE_EQ(a.fluctuation, 0.0);
  EXPECT_EQ(a.window_start_period, 6);
  EXPECT_EQ(a.window_len, 4);
  std::vector<double> alt;
  for (int k = 0; k < 11; ++k) alt.push_back(k % 2 ? -1.0 : 1.0);
  const LongTimeAverage b = stroboscopic_average(alt, 8);
  EXPECT_DOUBLE_EQ(b.mean, 0.0);
  EXPECT_DOUBLE_EQ(b.fluctuation, 1.0);
}

TEST(StroboscopicAverage, WindowErrors) {
  const std::vector<double> c(5, 1.0);
  EXPECT_THROW(stroboscopic_average(c, 0), ContractViolation);
  EXPECT_THROW(stroboscopic_average(c, 6), ContractViolation);
}

TEST(Ipr, EigenstateGivesUnity) {
  const IsingModel m{6, 1.0, 2.0, 0.0};  // g = 0: psi_0 is a Floquet eigenstate
  const IprResult r = ipr_dynamical(m, 0.3, 40, 20);
  EXPECT_NEAR(r.ipr, 1.0, 1e-12);
  EXPECT_NEAR(r.lambda_ipr, 0.0, 1e-12);
  EXPECT_NEAR(r.ratio, 0.0, 1e-12);
}

TEST(Ipr, WindowContract) {
  const IsingModel m{4, 1.0, 2.0, 2.0};
  EXPECT_THROW(ipr_dynamical(m, 0.3, 30, 20), ContractViolation);
  EXPECT_THROW(ipr_dynamical(m, 0.3, 10, 20), ContractViolation);
}

TEST(Ipr, RateFunctions) {
  const IsingModel m{6, 1.0, 2.0, 2.0};
  const IprResult r = ipr_dynamical(m, 0.8, 400, 200);
  EXPECT_DOUBLE_EQ(r.dimension, 64.0);
  EXPECT_NEAR(r.lambda_d, (std::log(64.0) - std::log(2.0)) / 6.0, 1e-15);
  EXPECT_NEAR(r.ratio, -r.lambda_ipr / r.lambda_d, 1e-12);
  EXPECT_DOUBLE_EQ(r.even_sector_dimension, 36.0);
}

TEST(Ipr, EvenSectorDimension) {
  EXPECT_DOUBLE_EQ(reflection_even_dimension(1), 2.0);
  EXPECT_DOUBLE_EQ(reflection_even_dimension(2), 3.0);
  EXPECT_DOUBLE_EQ(reflection_even_dimension(3), 6.0);
  EXPECT_DOUBLE_EQ(reflection_even_dimension(12), 2080.0);
}

TEST(Ipr, DynamicalMatchesFloquetAtSmallSizes) {
  for (int n : {4, 6, 8}) {
    for (double tau : {0.3, 0.9}) {
      const IsingModel m{n, 1.0, 2.0, 2.0};
      const IprResult dyn = ipr_dynamical(m, tau, 20000, 10000);
      const FloquetIpr fl = floquet_ipr(m, tau);
      EXPECT_NEAR(dyn.ipr / fl.ipr, 1.0, 0.05) << "N=" << n << " tau=" << tau;
    }
  }
}

TEST(Ipr, FloquetBlockSumIsBasisIndependent) {
  // At g = 0 the Floquet operator is diagonal and hugely degenerate; the
  // block-summed IPR of the all-up state must still be 1.
  const IsingModel m{4, 1.0, 2.0, 0.0};
  const FloquetIpr fl = floquet_ipr(m, 0.3);
  EXPECT_NEAR(fl.ipr, 1.0, 1e-10);
  EXPECT_GT(fl.degenerate_blocks, 0);
}

Eigen::MatrixXcd dense_otoc_trace(const IsingModel& m, double tau, int n_max, std::vector<Complex>& out) {
  const Eigen::MatrixXcd u = oracle::trotter_period(m, tau);
  const Eigen::MatrixXcd w = oracle::magnetization(m.n_sites);
  const Eigen::VectorXcd psi0 = oracle::all_up(m.n_sites);
  Eigen::MatrixXcd un = Eigen::MatrixXcd::Identity(u.rows(), u.cols());
  for (int n = 0; n <= n_max; ++n) {
    const Eigen::MatrixXcd vt = un.adjoint() * w * un;
    out.push_back((psi0.adjoint() * vt * w * vt * w * psi0)(0));
    un = u * un;
  }
  return un;
}

TEST(Otoc, InitialValueIsOneSixteenth) {
  for (int n : {1, 4, 7}) {
    const OtocResult r = otoc_run(IsingModel{n, 1.0, 2.0, 2.0}, 0.4, 3, 2);
    EXPECT_NEAR(r.correlator.values[0].real(), 1.0 / 16.0, 1e-15);
    EXPECT_NEAR(r.correlator.values[0].imag(), 0.0, 1e-15);
  }
}

TEST(Otoc, TwoStateSchemeMatchesDenseDefinition) {
  for (double tau : {0.1, 0.7, 1.3}) {
    const IsingModel m{6, 1.0, 2.0, 2.0};
    std::vector<Complex> dense;
    dense_otoc_trace(m, tau, 40, dense);
    const OtocResult r = otoc_run(m, tau, 40, 10);
    for (int n = 0; n <= 40; ++n) EXPECT_LT(std::abs(r.correlator.values[n] - dense[n]), 1e-10) << n;
    EXPECT_NEAR(r.normalized, r.real_part.mean * 8.0, 1e-15);
  }
}

TEST(TrajectoryIo, CsvRoundTripIsExact) {
  TrajectorySet set = run_dynamics(IsingModel{5, 1.0, 2.0, 2.0}, 0.3, 20, {Observable::kMagnetization});
  TrajectoryRecord rec = set.at(Observable::kMagnetization);
  rec.values[3] = Complex(rec.values[3].real(), -1.0 / 3.0);
  std::stringstream ss;
  write_csv(rec, ss);
  EXPECT_EQ(ss.str().substr(0, 29), "step,time,value_re,value_im\n0");
  const TrajectoryRecord back = read_csv(ss);
  EXPECT_EQ(back.steps, rec.steps);
  EXPECT_EQ(back.times, rec.times);
  EXPECT_EQ(back.values, rec.values);
}

TEST(TrajectoryIo, CsvRejectsGarbage) {
  std::stringstream bad_header("a,b,c,d\n");
  EXPECT_THROW(read_csv(bad_header), ValidationError);
  std::stringstream bad_row("step,time,value_re,value_im\n0,0.0,x,0\n");
  EXPECT_THROW(read_csv(bad_row), ValidationError);
}

TEST(TrajectoryIo, JsonRoundTripKeepsMetadata) {
  TrajectorySet set = run_dynamics(IsingModel{4, 1.0, 2.0, 2.0}, 0.25, 8, {Observable::kAccuracy});
  TrajectoryRecord rec = set.at(Observable::kAccuracy);
  rec.metadata["window"] = 4;
  rec.metadata["seed"] = 99;
  const nlohmann::json j = to_json(rec);
  EXPECT_EQ(j.at("schema_version"), 1);
  EXPECT_TRUE(j.contains("code_version"));
  EXPECT_EQ(j.at("model").at("N"), 4);
  const TrajectoryRecord back = trajectory_from_json(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(back.values, rec.values);
  EXPECT_EQ(back.model, rec.model);
  EXPECT_EQ(back.metadata, rec.metadata);
  EXPECT_DOUBLE_EQ(back.tau, 0.25);
}

TEST(TrajectoryRecord, ValidateCatchesBadGrids) {
  TrajectoryRecord r;
  r.tau = 0.1;
  r.push(0, 0.0, 1.0);
  r.push(1, 0.1, 1.0);
  EXPECT_NO_THROW(r.validate());
  r.push(2, 0.25, 1.0);
  EXPECT_THROW(r.validate(), ContractViolation);
}

}  // namespace
}  // namespace trotterlab
