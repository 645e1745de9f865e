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

#include "trotterlab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <mutex>
#include <thread>

#include "trotterlab/errors.hpp"
#include "trotterlab/observables.hpp"
#include "trotterlab/perturbation.hpp"
#include "trotterlab/version.hpp"

namespace trotterlab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::pair<ExperimentKind, const char*> kExperimentNames[] = {
    {ExperimentKind::kDynamics, "dynamics"},   {ExperimentKind::kCollapse, "collapse"},
    {ExperimentKind::kIprSweep, "ipr-sweep"},  {ExperimentKind::kOtocSweep, "otoc-sweep"},
    {ExperimentKind::kQeSweep, "qe-sweep"},    {ExperimentKind::kCoeffs, "coeffs"},
    {ExperimentKind::kNoise, "noise"},         {ExperimentKind::kLloydBound, "lloyd-bound"},
};

void require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError("config: " + message);
}

// splitmix64 finalizer; spreads the run seed over jobs.
std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

json average_json(const LongTimeAverage& avg) {
  return {{"mean", avg.mean},
          {"fluctuation", avg.fluctuation},
          {"window_start_period", avg.window_start_period},
          {"window_len", avg.window_len}};
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  for (const auto& [k, name] : kExperimentNames) {
    if (k == kind) return name;
  }
  return "?";
}

ExperimentKind experiment_from_string(const std::string& name) {
  for (const auto& [k, n] : kExperimentNames) {
    if (name == n) return k;
  }
  throw ValidationError("unknown experiment '" + name + "'");
}

std::vector<double> log_grid(double lo, double hi, int points) {
  if (!(lo > 0.0) || !(hi >= lo) || points < 1) throw ValidationError("log_grid: need 0 < lo <= hi and points >= 1");
  if (points == 1) return {lo};
  std::vector<double> out(static_cast<std::size_t>(points));
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int k = 0; k < points; ++k) out[static_cast<std::size_t>(k)] = std::exp(a + (b - a) * k / (points - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<double> default_tau_grid() { return log_grid(0.02, 2.0, 16); }

std::string to_string(JobStatus status) {
  switch (status) {
    case JobStatus::kPending: return "pending";
    case JobStatus::kOk: return "ok";
    case JobStatus::kFailed: return "failed";
  }
  return "?";
}

std::vector<int> ExperimentConfig::system_sizes() const {
  return sizes.empty() ? std::vector<int>{model.n_sites} : sizes;
}

void ExperimentConfig::validate() const {
  require(!tau_grid.empty(), "tau_grid must not be empty");
  for (double t : tau_grid) require(std::isfinite(t) && t > 0.0, "tau_grid entries must be positive");
  for (int n : system_sizes()) {
    IsingModel m = model;
    m.n_sites = n;
    try {
      m.validate();
    } catch (const std::exception& e) {
      throw ValidationError(std::string("config: model: ") + e.what());
    }
  }
  require(n_steps >= 1, "n_steps must be >= 1");
  require(window >= 1 && window <= static_cast<long>(n_steps) + 1, "window must lie inside 1..n_steps+1");
  require(workers >= 1, "workers must be >= 1");
  require(degeneracy_tol >= 0.0, "degeneracy_tol must be >= 0");
  require(krylov_max_dim >= 2 && krylov_tol > 0.0, "krylov settings invalid");
  require(!output.empty(), "output must be set");
  const std::vector<int> all_sizes = system_sizes();
  const int largest = *std::max_element(all_sizes.begin(), all_sizes.end());
  switch (experiment) {
    case ExperimentKind::kIprSweep:
      require(static_cast<long>(n_steps) >= 2 * window, "ipr-sweep needs n_steps >= 2 * window");
      if (floquet_oracle) require(largest <= 12, "floquet_oracle needs N <= 12");
      break;
    case ExperimentKind::kOtocSweep:
      require(otoc_steps >= 1, "otoc_steps must be >= 1");
      require(otoc_window >= 1 && otoc_window <= static_cast<long>(otoc_steps) + 1,
              "otoc_window must lie inside 1..otoc_steps+1");
      break;
    case ExperimentKind::kCoeffs:
      require(largest <= kMaxMagnusSites, "coeffs needs N <= 12");
      break;
    case ExperimentKind::kLloydBound:
      require(largest <= kMaxLloydSites, "lloyd-bound needs N <= 10");
      require(lloyd_time > 0.0, "lloyd_time must be positive");
      break;
    case ExperimentKind::kNoise:
      require(!noise.etas.empty(), "noise.etas must not be empty");
      for (double e : noise.etas) require(std::isfinite(e) && e >= 0.0, "noise.etas must be >= 0");
      require(noise.realizations >= 1, "noise.realizations must be >= 1");
      if (noise.lindblad) require(largest <= kMaxLindbladSites, "noise.lindblad needs N <= 6");
      break;
    default:
      break;
  }
}

json to_json(const ExperimentConfig& cfg) {
  return {{"schema_version", kConfigSchemaVersion},
          {"experiment", to_string(cfg.experiment)},
          {"model", to_json(cfg.model)},
          {"sizes", cfg.sizes},
          {"tau_grid", cfg.tau_grid},
          {"n_steps", cfg.n_steps},
          {"window", cfg.window},
          {"otoc_steps", cfg.otoc_steps},
          {"otoc_window", cfg.otoc_window},
          {"degeneracy_tol", cfg.degeneracy_tol},
          {"krylov", {{"max_dim", cfg.krylov_max_dim}, {"tol", cfg.krylov_tol}}},
          {"lloyd_time", cfg.lloyd_time},
          {"floquet_oracle", cfg.floquet_oracle},
          {"noise",
           {{"kind", to_string(cfg.noise.kind)},
            {"etas", cfg.noise.etas},
            {"realizations", cfg.noise.realizations},
            {"lindblad", cfg.noise.lindblad}}},
          {"seed", cfg.seed},
          {"workers", cfg.workers},
          {"output", cfg.output}};
}

namespace {

void reject_unknown(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
  for (const auto& [k, v] : j.items()) {
    if (std::find_if(keys.begin(), keys.end(), [&](const char* s) { return k == s; }) == keys.end()) {
      throw ValidationError("config: unknown key '" + where + k + "'");
    }
  }
}

template <typename T>
void read(const json& j, const char* key, T& dst) {
  if (j.contains(key)) dst = j.at(key).get<T>();
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("config: top level must be an object");
  reject_unknown(j,
                 {"schema_version", "experiment", "model", "sizes", "tau_grid", "n_steps", "window",
                  "otoc_steps", "otoc_window", "degeneracy_tol", "krylov", "lloyd_time", "floquet_oracle",
                  "noise", "seed", "workers", "output"},
                 "");
  if (!j.contains("schema_version") || j.at("schema_version") != kConfigSchemaVersion) {
    throw ValidationError("config: schema_version must be " + std::to_string(kConfigSchemaVersion));
  }
  ExperimentConfig cfg;
  try {
    if (!j.contains("experiment")) throw ValidationError("config: experiment is required");
    cfg.experiment = experiment_from_string(j.at("experiment").get<std::string>());
    if (j.contains("model")) {
      const json& m = j.at("model");
      reject_unknown(m, {"N", "J", "h", "g", "boundary"}, "model.");
      read(m, "N", cfg.model.n_sites);
      read(m, "J", cfg.model.J);
      read(m, "h", cfg.model.h);
      read(m, "g", cfg.model.g);
      if (m.contains("boundary") && m.at("boundary") != "open") {
        throw ValidationError("config: model.boundary must be \"open\"");
      }
    }
    read(j, "sizes", cfg.sizes);
    if (j.contains("tau_grid")) {
      const json& g = j.at("tau_grid");
      if (g.is_array()) {
        cfg.tau_grid = g.get<std::vector<double>>();
      } else if (g.is_object() && g.contains("log")) {
        const json& l = g.at("log");
        cfg.tau_grid = l.at("points").get<int>() >= 1
                           ? log_grid(l.at("min").get<double>(), l.at("max").get<double>(), l.at("points").get<int>())
                           : std::vector<double>{};
      } else {
        throw ValidationError("config: tau_grid must be a list or {\"log\": {...}}");
      }
    }
    read(j, "n_steps", cfg.n_steps);
    read(j, "window", cfg.window);
    read(j, "otoc_steps", cfg.otoc_steps);
    read(j, "otoc_window", cfg.otoc_window);
    read(j, "degeneracy_tol", cfg.degeneracy_tol);
    if (j.contains("krylov")) {
      reject_unknown(j.at("krylov"), {"max_dim", "tol"}, "krylov.");
      read(j.at("krylov"), "max_dim", cfg.krylov_max_dim);
      read(j.at("krylov"), "tol", cfg.krylov_tol);
    }
    read(j, "lloyd_time", cfg.lloyd_time);
    read(j, "floquet_oracle", cfg.floquet_oracle);
    if (j.contains("noise")) {
      const json& n = j.at("noise");
      reject_unknown(n, {"kind", "etas", "realizations", "lindblad"}, "noise.");
      if (n.contains("kind")) cfg.noise.kind = noise_kind_from_string(n.at("kind").get<std::string>());
      read(n, "etas", cfg.noise.etas);
      read(n, "realizations", cfg.noise.realizations);
      read(n, "lindblad", cfg.noise.lindblad);
    }
    read(j, "seed", cfg.seed);
    read(j, "workers", cfg.workers);
    read(j, "output", cfg.output);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError("config: cannot open " + path.string());
  json j;
  try {
    j = json::parse(is, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: parse error: ") + e.what());
  }
  return config_from_json(j);
}

int ResultBundle::failed_jobs() const {
  return static_cast<int>(std::count_if(jobs.begin(), jobs.end(),
                                        [](const JobRecord& r) { return r.status != JobStatus::kOk; }));
}

namespace {

json job_to_json(const JobRecord& job) {
  json j = {{"index", job.index},
            {"N", job.n_sites},
            {"tau", job.tau ? json(*job.tau) : json(nullptr)},
            {"eta", job.eta ? json(*job.eta) : json(nullptr)},
            {"status", to_string(job.status)},
            {"wall_seconds", job.wall_seconds},
            {"summary", job.summary},
            {"trajectories", job.trajectories}};
  if (!job.error.empty()) j["error"] = job.error;
  return j;
}

JobRecord job_from_json(const json& j) {
  JobRecord job;
  job.index = j.at("index").get<int>();
  job.n_sites = j.at("N").get<int>();
  if (!j.at("tau").is_null()) job.tau = j.at("tau").get<double>();
  if (!j.at("eta").is_null()) job.eta = j.at("eta").get<double>();
  const std::string s = j.at("status").get<std::string>();
  job.status = s == "ok" ? JobStatus::kOk : s == "failed" ? JobStatus::kFailed : JobStatus::kPending;
  job.error = j.value("error", "");
  job.wall_seconds = j.value("wall_seconds", 0.0);
  job.summary = j.value("summary", json::object());
  job.trajectories = j.value("trajectories", json::array());
  return job;
}

struct JobSpec {
  int index;
  int n_sites;
  std::optional<double> tau;
  std::optional<double> eta;
};

std::vector<JobSpec> plan_jobs(const ExperimentConfig& cfg) {
  std::vector<JobSpec> jobs;
  int index = 0;
  for (int n : cfg.system_sizes()) {
    if (cfg.experiment == ExperimentKind::kCoeffs) {
      jobs.push_back({index++, n, std::nullopt, std::nullopt});
    } else if (cfg.experiment == ExperimentKind::kNoise) {
      for (double tau : cfg.tau_grid) {
        for (double eta : cfg.noise.etas) jobs.push_back({index++, n, tau, eta});
      }
    } else {
      for (double tau : cfg.tau_grid) jobs.push_back({index++, n, tau, std::nullopt});
    }
  }
  return jobs;
}

struct JobOutput {
  json summary = json::object();
  std::vector<TrajectoryRecord> trajectories;
};

JobOutput execute(const ExperimentConfig& cfg, const JobSpec& spec) {
  IsingModel model = cfg.model;
  model.n_sites = spec.n_sites;
  const KrylovConfig krylov{cfg.krylov_max_dim, cfg.krylov_tol};
  JobOutput out;
  const double tau = spec.tau.value_or(0.0);
  switch (cfg.experiment) {
    case ExperimentKind::kDynamics: {
      TrajectorySet set = run_dynamics(model, tau, cfg.n_steps,
                                       {Observable::kMagnetization, Observable::kEnergy,
                                        Observable::kAccuracy, Observable::kLoschmidt});
      for (auto& [obs, rec] : set) {
        out.summary[to_string(obs)] = average_json(stroboscopic_average(rec, cfg.window));
        out.trajectories.push_back(std::move(rec));
      }
      break;
    }
    case ExperimentKind::kQeSweep: {
      TrajectorySet set = run_dynamics(model, tau, cfg.n_steps, {Observable::kAccuracy});
      TrajectoryRecord& rec = set.at(Observable::kAccuracy);
      const LongTimeAverage avg = stroboscopic_average(rec, cfg.window);
      out.summary["Q_E_mean"] = avg.mean;
      out.summary["Q_E_fluctuation"] = avg.fluctuation;
      out.summary["Q_E_over_htau2"] = avg.mean / ((model.h * tau) * (model.h * tau));
      out.summary["window"] = average_json(avg);
      out.trajectories.push_back(std::move(rec));
      break;
    }
    case ExperimentKind::kCollapse: {
      TrotterErrorResult r = trotter_error_trajectory(model, tau, cfg.n_steps, krylov);
      const LongTimeAverage norm = stroboscopic_average(r.normalized, cfg.window);
      const LongTimeAverage shift = stroboscopic_average(r.shift, cfg.window);
      out.summary["dM_over_htau2_mean"] = norm.mean;
      out.summary["shift_over_htau2_mean"] = shift.mean / ((model.h * tau) * (model.h * tau));
      out.summary["window"] = average_json(norm);
      out.trajectories.push_back(std::move(r.trotter));
      out.trajectories.push_back(std::move(r.exact));
      out.trajectories.push_back(std::move(r.normalized));
      out.trajectories.push_back(std::move(r.shift));
      break;
    }
    case ExperimentKind::kIprSweep: {
      IprResult r = ipr_dynamical(model, tau, cfg.n_steps, cfg.window);
      out.summary = {{"ipr", r.ipr},
                     {"ratio", r.ratio},
                     {"lambda_ipr", r.lambda_ipr},
                     {"lambda_d", r.lambda_d},
                     {"fluctuation", r.fluctuation},
                     {"dimension", r.dimension},
                     {"ratio_even_sector", r.ratio_even_sector},
                     {"even_sector_dimension", r.even_sector_dimension}};
      if (cfg.floquet_oracle) {
        const FloquetIpr f = floquet_ipr(model, tau);
        out.summary["floquet"] = {{"ipr", f.ipr},
                                  {"ipr_per_vector", f.ipr_per_vector},
                                  {"degenerate_blocks", f.degenerate_blocks},
                                  {"min_gap", f.min_gap}};
      }
      out.trajectories.push_back(std::move(r.loschmidt));
      break;
    }
    case ExperimentKind::kOtocSweep: {
      OtocResult r = otoc_run(model, tau, cfg.otoc_steps, cfg.otoc_window);
      out.summary = {{"F0", r.correlator.values.front().real()},
                     {"F_real", average_json(r.real_part)},
                     {"F_abs", average_json(r.magnitude)},
                     {"normalized", r.normalized},
                     {"normalized_magnitude", r.normalized_magnitude}};
      out.trajectories.push_back(std::move(r.correlator));
      break;
    }
    case ExperimentKind::kCoeffs: {
      const HamiltonianSpectrum spectrum = diagonalize_hamiltonian(model, cfg.degeneracy_tol);
      const QeCoefficient qe = compute_qE(spectrum);
      const MCoefficient m = compute_m(spectrum);
      out.summary = {{"q_E", qe.value},
                     {"m", m.value},
                     {"q_E_detail", to_json(qe)},
                     {"m_detail", to_json(m)},
                     {"model", to_json(model)},
                     {"eigenbasis", to_json(spectrum)}};
      break;
    }
    case ExperimentKind::kNoise: {
      NoiseConfig ncfg;
      ncfg.kind = cfg.noise.kind;
      ncfg.eta = *spec.eta;
      ncfg.realizations = cfg.noise.realizations;
      ncfg.seed = mix_seed(cfg.seed ^ mix_seed(static_cast<std::uint64_t>(spec.index)));
      const Observable obs = ncfg.kind == NoiseKind::kTiming ? Observable::kAccuracy : Observable::kMagnetization;
      EnsembleTrajectory r = noise_run(model, tau, cfg.n_steps, ncfg, obs);
      out.summary = {{"noise", to_json(ncfg)},
                     {"observable", to_string(obs)},
                     {"final_mean", r.mean.values.back().real()},
                     {"final_stderr", r.std_error.values.back().real()}};
      out.trajectories.push_back(std::move(r.mean));
      out.trajectories.push_back(std::move(r.std_error));
      if (cfg.noise.lindblad) {
        out.trajectories.push_back(lindblad_oracle(model, tau, ncfg.eta, cfg.n_steps * tau));
      }
      break;
    }
    case ExperimentKind::kLloydBound: {
      const int n = std::max(1, static_cast<int>(std::lround(cfg.lloyd_time / tau)));
      out.summary = {{"t", cfg.lloyd_time},
                     {"n", n},
                     {"bound", lloyd_commutator_bound(model, cfg.lloyd_time, n)},
                     {"measured", measured_global_defect(model, cfg.lloyd_time, n)}};
      break;
    }
  }
  return out;
}

std::string sanitize(const std::string& label) {
  std::string s = label;
  for (char& c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
  }
  return s;
}

void write_atomically(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + tmp.string());
    os << text;
    os.flush();
    if (!os) throw std::runtime_error("short write on " + tmp.string());
  }
  fs::rename(tmp, path);
}

}  // namespace

json to_json(const ResultBundle& bundle) {
  json jobs = json::array();
  for (const JobRecord& job : bundle.jobs) jobs.push_back(job_to_json(job));
  const int failed = bundle.failed_jobs();
  const bool pending = std::any_of(bundle.jobs.begin(), bundle.jobs.end(),
                                   [](const JobRecord& r) { return r.status == JobStatus::kPending; });
  return {{"schema_version", kManifestSchemaVersion},
          {"code_version", bundle.code_version},
          {"experiment", to_string(bundle.config.experiment)},
          {"config", to_json(bundle.config)},
          {"status", pending ? "running" : failed == 0 ? "ok" : "partial"},
          {"wall_seconds", bundle.wall_seconds},
          {"jobs", jobs}};
}

ResultBundle bundle_from_json(const json& j) {
  if (j.value("schema_version", 0) != kManifestSchemaVersion) {
    throw ValidationError("manifest: unsupported schema_version");
  }
  ResultBundle bundle;
  bundle.config = config_from_json(j.at("config"));
  bundle.code_version = j.value("code_version", "");
  bundle.wall_seconds = j.value("wall_seconds", 0.0);
  for (const json& job : j.at("jobs")) bundle.jobs.push_back(job_from_json(job));
  return bundle;
}

ResultBundle load_bundle(const fs::path& directory) {
  std::ifstream is(directory / "manifest.json");
  if (!is) throw NotFoundError("no manifest.json in " + directory.string());
  ResultBundle bundle = bundle_from_json(json::parse(is));
  bundle.directory = directory;
  return bundle;
}

ResultBundle run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const fs::path dir(cfg.output);
  fs::create_directories(dir);

  ResultBundle bundle;
  bundle.config = cfg;
  bundle.code_version = kCodeVersion;
  bundle.directory = dir;
  const std::vector<JobSpec> specs = plan_jobs(cfg);
  for (const JobSpec& s : specs) {
    JobRecord r;
    r.index = s.index;
    r.n_sites = s.n_sites;
    r.tau = s.tau;
    r.eta = s.eta;
    bundle.jobs.push_back(std::move(r));
  }

  std::mutex manifest_mutex;
  auto publish = [&] {
    bundle.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_atomically(dir / "manifest.json", to_json(bundle).dump(2) + "\n");
  };
  publish();

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < specs.size(); k = next++) {
      const auto t0 = std::chrono::steady_clock::now();
      JobRecord record = bundle.jobs[k];  // copy; published under the lock
      try {
        JobOutput out = execute(cfg, specs[k]);
        for (const TrajectoryRecord& traj : out.trajectories) {
          const std::string file = "traj_" + sanitize(traj.label) + "_" + std::to_string(specs[k].index) + ".csv";
          std::ofstream os(dir / file, std::ios::binary | std::ios::trunc);
          write_csv(traj, os);
          if (!os) throw std::runtime_error("failed writing " + file);
          json meta = traj.metadata;
          meta["tau"] = traj.tau;
          meta["N"] = traj.model.n_sites;
          record.trajectories.push_back({{"label", traj.label}, {"file", file}, {"metadata", meta}});
        }
        record.summary = std::move(out.summary);
        record.status = JobStatus::kOk;
      } catch (const std::exception& e) {
        record.status = JobStatus::kFailed;
        record.error = e.what();
      }
      record.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      std::lock_guard lock(manifest_mutex);
      bundle.jobs[k] = std::move(record);
      publish();
    }
  };
  const int workers = std::max(1, std::min<int>(cfg.workers, static_cast<int>(specs.size())));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  return bundle;
}

}  // namespace trotterlab
