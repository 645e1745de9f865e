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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "trotterlab/errors.hpp"
#include "trotterlab/harness.hpp"
#include "trotterlab/observables.hpp"

namespace trotterlab {
namespace {

namespace fs = std::filesystem;

class HarnessTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    root_ = fs::temp_directory_path() / (std::string("trotterlab_") + info->name() + "_" + std::to_string(::getpid()));
    fs::remove_all(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  std::string out(const std::string& name) const { return (root_ / name).string(); }

  fs::path root_;
};

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

ExperimentConfig small_qe_sweep(const std::string& output) {
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::kQeSweep;
  cfg.model = IsingModel{4, 1.0, 2.0, 2.0};
  cfg.tau_grid = {0.05, 0.4, 1.2};
  cfg.n_steps = 200;
  cfg.window = 100;
  cfg.output = output;
  return cfg;
}

TEST(Config, DefaultsAndGrid) {
  const ExperimentConfig cfg;
  EXPECT_EQ(cfg.model.n_sites, 12);
  ASSERT_EQ(cfg.tau_grid.size(), 16u);
  EXPECT_DOUBLE_EQ(cfg.tau_grid.front(), 0.02);
  EXPECT_NEAR(cfg.tau_grid.back(), 2.0, 1e-14);
  for (std::size_t k = 2; k < cfg.tau_grid.size(); ++k) {
    EXPECT_NEAR(cfg.tau_grid[k] / cfg.tau_grid[k - 1], cfg.tau_grid[1] / cfg.tau_grid[0], 1e-12);
  }
  EXPECT_EQ(cfg.n_steps, 20000);
  EXPECT_EQ(cfg.window, 10000);
  EXPECT_NO_THROW(cfg.validate());
}

TEST(Config, JsonRoundTrip) {
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::kNoise;
  cfg.model = IsingModel{6, 1.0, 1.5, 0.5};
  cfg.sizes = {4, 6};
  cfg.tau_grid = {0.1, 0.3};
  cfg.noise.kind = NoiseKind::kEnsemble;
  cfg.noise.etas = {0.1};
  cfg.noise.realizations = 7;
  cfg.noise.lindblad = true;
  cfg.seed = 123456789012345ULL;
  cfg.workers = 3;
  cfg.output = "elsewhere";
  const ExperimentConfig back = config_from_json(nlohmann::json::parse(to_json(cfg).dump()));
  EXPECT_EQ(back, cfg);
}

TEST(Config, ParsingRules) {
  const auto parse = [](const std::string& s) { return config_from_json(nlohmann::json::parse(s)); };
  EXPECT_THROW(parse(R"({"experiment": "qe-sweep"})"), ValidationError);
  EXPECT_THROW(parse(R"({"schema_version": 2, "experiment": "qe-sweep"})"), ValidationError);
  EXPECT_THROW(parse(R"({"schema_version": 1, "experiment": "qe-sweep", "windw": 3})"), ValidationError);
  EXPECT_THROW(parse(R"({"schema_version": 1, "experiment": "warp"})"), ValidationError);
  EXPECT_THROW(parse(R"({"schema_version": 1, "experiment": "dynamics", "model": {"boundary": "periodic"}})"),
               ValidationError);
  const ExperimentConfig c =
      parse(R"({"schema_version": 1, "experiment": "qe-sweep", "tau_grid": {"log": {"min": 0.1, "max": 1.0, "points": 3}}})");
  ASSERT_EQ(c.tau_grid.size(), 3u);
  EXPECT_NEAR(c.tau_grid[1], std::sqrt(0.1), 1e-14);
}

TEST_F(HarnessTest, LoadConfigAcceptsComments) {
  fs::create_directories(root_);
  std::ofstream(root_ / "c.json") << "// sweep\n{\"schema_version\": 1, /* kind */ \"experiment\": \"coeffs\"}\n";
  EXPECT_EQ(load_config(root_ / "c.json").experiment, ExperimentKind::kCoeffs);
  EXPECT_THROW(load_config(root_ / "missing.json"), ValidationError);
}

TEST_F(HarnessTest, InvalidConfigWritesNothing) {
  ExperimentConfig cfg = small_qe_sweep(out("bad"));
  cfg.tau_grid.clear();
  EXPECT_THROW(run_experiment(cfg), ValidationError);
  EXPECT_FALSE(fs::exists(cfg.output));
  cfg = small_qe_sweep(out("bad"));
  cfg.window = cfg.n_steps + 2;
  EXPECT_THROW(run_experiment(cfg), ValidationError);
  EXPECT_FALSE(fs::exists(cfg.output));
}

TEST_F(HarnessTest, QeSweepWritesManifestAndTrajectories) {
  const ExperimentConfig cfg = small_qe_sweep(out("run"));
  const ResultBundle bundle = run_experiment(cfg);
  ASSERT_EQ(bundle.jobs.size(), 3u);
  EXPECT_EQ(bundle.failed_jobs(), 0);
  const nlohmann::json manifest = nlohmann::json::parse(slurp(fs::path(cfg.output) / "manifest.json"));
  EXPECT_EQ(manifest.at("status"), "ok");
  EXPECT_EQ(manifest.at("schema_version"), 1);
  for (const JobRecord& job : bundle.jobs) {
    EXPECT_EQ(job.status, JobStatus::kOk);
    ASSERT_EQ(job.trajectories.size(), 1u);
    std::ifstream is(fs::path(cfg.output) / job.trajectories[0].at("file").get<std::string>());
    const TrajectoryRecord rec = read_csv(is);
    EXPECT_EQ(rec.size(), 201u);
    EXPECT_NEAR(rec.tau, *job.tau, 1e-15);
    EXPECT_DOUBLE_EQ(job.summary.at("Q_E_mean").get<double>(), stroboscopic_average(rec, cfg.window).mean);
  }
  const ResultBundle loaded = load_bundle(cfg.output);
  EXPECT_EQ(loaded.config, cfg);
  ASSERT_EQ(loaded.jobs.size(), bundle.jobs.size());
  for (std::size_t k = 0; k < loaded.jobs.size(); ++k) {
    EXPECT_EQ(loaded.jobs[k].summary, bundle.jobs[k].summary);
    EXPECT_EQ(loaded.jobs[k].tau, bundle.jobs[k].tau);
  }
}

TEST_F(HarnessTest, OutputIsByteIdenticalAcrossWorkerCounts) {
  ExperimentConfig a = small_qe_sweep(out("a"));
  a.experiment = ExperimentKind::kNoise;
  a.noise.realizations = 5;
  a.n_steps = 40;
  a.window = 20;
  a.seed = 42;
  ExperimentConfig b = a;
  b.output = out("b");
  b.workers = 3;
  run_experiment(a);
  run_experiment(b);
  int files = 0;
  for (const auto& entry : fs::directory_iterator(a.output)) {
    if (entry.path().extension() != ".csv") continue;
    ++files;
    EXPECT_EQ(slurp(entry.path()), slurp(fs::path(b.output) / entry.path().filename())) << entry.path();
  }
  EXPECT_EQ(files, 12);  // 3 tau x 2 eta x (mean, stderr)
}

TEST_F(HarnessTest, FailedJobsAreRecordedAndOthersComplete) {
  ExperimentConfig cfg = small_qe_sweep(out("partial"));
  // E_0 = J (N-1)/4 + h N/2 vanishes at N = 4 for h = -3/8, so Q_E is undefined there.
  cfg.model.h = -0.375;
  cfg.sizes = {3, 4};
  const ResultBundle bundle = run_experiment(cfg);
  EXPECT_EQ(bundle.failed_jobs(), 3);
  for (const JobRecord& job : bundle.jobs) {
    if (job.n_sites == 4) {
      EXPECT_EQ(job.status, JobStatus::kFailed);
      EXPECT_NE(job.error.find("Q_E"), std::string::npos) << job.error;
    } else {
      EXPECT_EQ(job.status, JobStatus::kOk);
    }
  }
  const nlohmann::json manifest = nlohmann::json::parse(slurp(fs::path(cfg.output) / "manifest.json"));
  EXPECT_EQ(manifest.at("status"), "partial");
}

TEST_F(HarnessTest, CoeffsAndLloydJobs) {
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::kCoeffs;
  cfg.model = IsingModel{4, 1.0, 2.0, 2.0};
  cfg.output = out("coeffs");
  const ResultBundle c = run_experiment(cfg);
  ASSERT_EQ(c.jobs.size(), 1u);
  EXPECT_NEAR(c.jobs[0].summary.at("q_E").get<double>(), 0.149433, 5e-6);
  cfg.experiment = ExperimentKind::kLloydBound;
  cfg.tau_grid = {0.1, 0.25};
  cfg.output = out("lloyd");
  const ResultBundle l = run_experiment(cfg);
  for (const JobRecord& job : l.jobs) {
    EXPECT_GE(job.summary.at("bound").get<double>(), job.summary.at("measured").get<double>());
  }
  EXPECT_EQ(l.jobs[1].summary.at("n"), 4);
}

TEST(Threshold, LocatesSyntheticStep) {
  const std::vector<double> taus = default_tau_grid();
  std::vector<double> q;
  for (double t : taus) q.push_back(1.0 / (1.0 + std::pow(0.7 / t, 8.0)));
  const ThresholdEstimate e = locate_threshold(taus, q);
  EXPECT_NEAR(e.tau_star, 0.7, e.uncertainty);
  EXPECT_GT(e.uncertainty, 0.0);
  EXPECT_NEAR(e.midpoint, 0.5 * (e.low_plateau + e.high_plateau), 1e-15);
}

TEST(Threshold, PropertyStepPositionIsRecovered) {
  const std::vector<double> taus = default_tau_grid();
  for (double centre : {0.1, 0.3, 0.5, 0.9}) {
    for (double sharpness : {4.0, 12.0}) {
      std::vector<double> q;
      for (double t : taus) q.push_back(0.02 + 0.9 / (1.0 + std::pow(centre / t, sharpness)));
      const ThresholdEstimate e = locate_threshold(taus, q);
      EXPECT_NEAR(e.tau_star, centre, e.uncertainty) << centre << " " << sharpness;
    }
  }
}

TEST(Threshold, RejectsFlatOrShortData) {
  const std::vector<double> taus = default_tau_grid();
  const std::vector<double> flat(taus.size(), 0.3);
  EXPECT_THROW(locate_threshold(taus, flat), NotFoundError);
  std::vector<double> down;
  for (double t : taus) down.push_back(1.0 - t / 2.0);
  EXPECT_THROW(locate_threshold(taus, down), NotFoundError);
  EXPECT_THROW(locate_threshold({0.1, 0.2, 0.3}, {0.0, 0.5, 1.0}), ValidationError);
}

TEST(Threshold, BundleOverloadUsesRequestedSize) {
  ResultBundle b;
  b.config.experiment = ExperimentKind::kQeSweep;
  b.config.model.n_sites = 8;
  const std::vector<double> taus = default_tau_grid();
  for (std::size_t k = 0; k < taus.size(); ++k) {
    for (int n : {6, 8}) {
      JobRecord j;
      j.index = static_cast<int>(b.jobs.size());
      j.n_sites = n;
      j.tau = taus[k];
      j.status = JobStatus::kOk;
      const double centre = n == 8 ? 0.5 : 0.2;
      j.summary["Q_E_mean"] = 1.0 / (1.0 + std::pow(centre / taus[k], 8.0));
      b.jobs.push_back(j);
    }
  }
  EXPECT_NEAR(locate_threshold(b).tau_star, 0.5, 0.15);
  EXPECT_NEAR(locate_threshold(b, 6).tau_star, 0.2, 0.06);
  b.config.experiment = ExperimentKind::kCoeffs;
  EXPECT_THROW(locate_threshold(b), ValidationError);
}

}  // namespace
}  // namespace trotterlab
