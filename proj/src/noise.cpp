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

#include "trotterlab/noise.hpp"

#include <cmath>
#include <thread>

#include "trotterlab/errors.hpp"
#include "trotterlab/evolvers.hpp"
#include "trotterlab/linalg.hpp"
#include "trotterlab/perturbation.hpp"

namespace trotterlab {

std::string to_string(NoiseKind kind) { return kind == NoiseKind::kTiming ? "timing" : "ensemble"; }

NoiseKind noise_kind_from_string(const std::string& s) {
  if (s == "timing") return NoiseKind::kTiming;
  if (s == "ensemble") return NoiseKind::kEnsemble;
  throw ValidationError("unknown noise kind '" + s + "'");
}

void NoiseConfig::validate() const {
  if (!(eta >= 0.0) || !std::isfinite(eta)) throw ValidationError("noise: eta must be finite and >= 0");
  if (realizations < 1) throw ValidationError("noise: realizations must be >= 1");
  if (workers < 1) throw ValidationError("noise: workers must be >= 1");
}

std::mt19937_64 realization_stream(const NoiseConfig& cfg, std::uint64_t r) {
  const std::uint32_t kind_tag = cfg.kind == NoiseKind::kTiming ? 0x74696d65U : 0x656e7362U;
  std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                    kind_tag, static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(r >> 32)};
  return std::mt19937_64(seq);
}

namespace {

class NoisyProbe {
 public:
  NoisyProbe(const IsingModel& model, Observable obs)
      : model_(model), obs_(obs), hz_(hz_diagonal(model)), m_(magnetization_diagonal(model.n_sites)),
        initial_(make_all_up_state(model.n_sites)) {
    e0_ = hz_.values[0];
    e_inf_ = infinite_temperature_energy(model);
    if (obs == Observable::kAccuracy && e0_ == e_inf_) {
      throw IllConditionedError("Q_E undefined: E_0 equals the infinite-temperature energy");
    }
  }

  double operator()(const SpinState& psi) const {
    switch (obs_) {
      case Observable::kMagnetization: return expectation(psi, m_);
      case Observable::kLoschmidt: return std::norm(inner_product(initial_, psi));
      case Observable::kEnergy: return energy(psi);
      case Observable::kAccuracy: return (energy(psi) - e0_) / (e_inf_ - e0_);
    }
    return 0.0;
  }

  const DiagonalObservable& hz() const { return hz_; }

 private:
  double energy(const SpinState& psi) const { return expectation(psi, hz_) + expectation_hx(psi, model_); }

  IsingModel model_;
  Observable obs_;
  DiagonalObservable hz_;
  DiagonalObservable m_;
  SpinState initial_;
  double e0_ = 0.0;
  double e_inf_ = 0.0;
};

std::vector<double> simulate(const IsingModel& model, double tau, int n_steps, const NoiseConfig& cfg,
                             std::uint64_t r, const NoisyProbe& probe, const DiagonalLevels& levels) {
  std::mt19937_64 rng = realization_stream(cfg, r);
  std::uniform_real_distribution<double> xi(-0.5 * cfg.eta, 0.5 * cfg.eta);
  double delta_z = 0.0;
  double delta_x = 0.0;
  if (cfg.kind == NoiseKind::kEnsemble && cfg.eta > 0.0) {
    delta_z = xi(rng);
    delta_x = xi(rng);
  }
  SpinState psi = make_all_up_state(model.n_sites);
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(n_steps) + 1);
  values.push_back(probe(psi));
  NormGuard guard;
  for (long n = 1; n <= n_steps; ++n) {
    if (cfg.kind == NoiseKind::kTiming && cfg.eta > 0.0) {
      delta_z = xi(rng);
      delta_x = xi(rng);
    }
    apply_x_rotation(psi.amplitudes(), model.n_sites, 0.5 * model.g * tau * (1.0 + delta_x));
    levels.apply_phase(psi.amplitudes(), tau * (1.0 + delta_z));
    guard.after_period(psi, n);
    values.push_back(probe(psi));
  }
  return values;
}

// Pairwise summation over a strided column of the realization table.
double pairwise_sum(const std::vector<std::vector<double>>& rows, std::size_t col, std::size_t lo,
                    std::size_t hi, double shift) {
  if (hi - lo <= 8) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += rows[i][col] - shift;
    return s;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum(rows, col, lo, mid, shift) + pairwise_sum(rows, col, mid, hi, shift);
}

double pairwise_sq_sum(const std::vector<std::vector<double>>& rows, std::size_t col, std::size_t lo,
                       std::size_t hi, double mean) {
  if (hi - lo <= 8) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += (rows[i][col] - mean) * (rows[i][col] - mean);
    return s;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_sq_sum(rows, col, lo, mid, mean) + pairwise_sq_sum(rows, col, mid, hi, mean);
}

TrajectoryRecord blank(const IsingModel& model, double tau, const std::string& label) {
  TrajectoryRecord rec;
  rec.label = label;
  rec.model = model;
  rec.tau = tau;
  return rec;
}

}  // namespace

TrajectoryRecord noisy_trajectory(const IsingModel& model, double tau, int n_steps,
                                  const NoiseConfig& cfg, std::uint64_t r, Observable observable) {
  TrotterConfig{tau, n_steps}.validate();
  cfg.validate();
  const NoisyProbe probe(model, observable);
  const DiagonalLevels levels(probe.hz());
  const std::vector<double> values = simulate(model, tau, n_steps, cfg, r, probe, levels);
  TrajectoryRecord rec = blank(model, tau, to_string(observable));
  for (std::size_t n = 0; n < values.size(); ++n) {
    rec.push(static_cast<long>(n), static_cast<double>(n) * tau, values[n]);
  }
  rec.metadata = to_json(cfg);
  rec.metadata["realization"] = r;
  return rec;
}

EnsembleTrajectory noise_run(const IsingModel& model, double tau, int n_steps, const NoiseConfig& cfg,
                             Observable observable) {
  TrotterConfig{tau, n_steps}.validate();
  cfg.validate();
  const NoisyProbe probe(model, observable);
  const std::size_t r_count = static_cast<std::size_t>(cfg.realizations);
  std::vector<std::vector<double>> table(r_count);

  // Each realization owns its row and its RNG stream; the split across
  // threads has no influence on the numbers.
  const int workers = std::min<int>(cfg.workers, cfg.realizations);
  auto work = [&](int w) {
    const DiagonalLevels levels(probe.hz());
    for (std::size_t r = static_cast<std::size_t>(w); r < r_count; r += static_cast<std::size_t>(workers)) {
      table[r] = simulate(model, tau, n_steps, cfg, r, probe, levels);
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }

  EnsembleTrajectory out;
  out.realizations = cfg.realizations;
  out.eta = cfg.eta;
  const std::string name = to_string(observable);
  out.mean = blank(model, tau, name + "_mean");
  out.std_error = blank(model, tau, name + "_stderr");
  const double r_real = static_cast<double>(r_count);
  for (std::size_t n = 0; n <= static_cast<std::size_t>(n_steps); ++n) {
    // Shifted by the first realization so identical rows give an exact mean.
    const double pivot = table[0][n];
    const double mean = pivot + pairwise_sum(table, n, 0, r_count, pivot) / r_real;
    double se = 0.0;
    if (r_count > 1) se = std::sqrt(pairwise_sq_sum(table, n, 0, r_count, mean) / (r_real - 1.0) / r_real);
    const double t = static_cast<double>(n) * tau;
    out.mean.push(static_cast<long>(n), t, mean);
    out.std_error.push(static_cast<long>(n), t, se);
    out.rescaled_times.push_back(t * cfg.eta * cfg.eta);
  }
  const nlohmann::json meta = to_json(cfg);
  out.mean.metadata = meta;
  out.std_error.metadata = meta;
  return out;
}

EnsembleTrajectory timing_noise_run(const IsingModel& model, double tau, int n_steps,
                                    const NoiseConfig& cfg, Observable observable) {
  if (cfg.kind != NoiseKind::kTiming) throw ValidationError("timing_noise_run: config kind is not timing");
  return noise_run(model, tau, n_steps, cfg, observable);
}

EnsembleTrajectory ensemble_noise_run(const IsingModel& model, double tau, int n_steps,
                                      const NoiseConfig& cfg, Observable observable) {
  if (cfg.kind != NoiseKind::kEnsemble) throw ValidationError("ensemble_noise_run: config kind is not ensemble");
  return noise_run(model, tau, n_steps, cfg, observable);
}

TrajectoryRecord lindblad_oracle(const IsingModel& model, double tau, double eta, double t_max,
                                 const LindbladConfig& cfg) {
  model.validate();
  if (model.n_sites > kMaxLindbladSites) throw CapacityError("lindblad_oracle: N > 6");
  if (!(tau > 0.0) || !(eta >= 0.0) || !(t_max >= 0.0)) throw ValidationError("lindblad_oracle: bad tau, eta or t_max");
  if (cfg.steps_per_period < 1) throw ValidationError("lindblad_oracle: steps_per_period must be >= 1");

  using Eigen::MatrixXcd;
  const MatrixXcd h = build_dense(model, OperatorKind::kH).matrix;
  const MatrixXcd hz = build_dense(model, OperatorKind::kHZ).matrix;
  const MatrixXcd hx = build_dense(model, OperatorKind::kHX).matrix;
  const MatrixXcd h_eff = magnus_hf(model, tau, cfg.magnus_order).matrix;
  const MatrixXcd hz2 = hz * hz;
  const MatrixXcd hx2 = hx * hx;
  const double gamma = 0.5 * tau * eta * eta / 12.0;
  const Complex minus_i(0.0, -1.0);

  auto rhs = [&](const MatrixXcd& rho) {
    MatrixXcd d = minus_i * (h_eff * rho - rho * h_eff);
    if (gamma > 0.0) {
      d += gamma * (2.0 * hz * rho * hz - hz2 * rho - rho * hz2);
      d += gamma * (2.0 * hx * rho * hx - hx2 * rho - rho * hx2);
    }
    return d;
  };

  const Eigen::Index dim = h.rows();
  MatrixXcd rho = MatrixXcd::Zero(dim, dim);
  rho(0, 0) = 1.0;
  const double e0 = h(0, 0).real();
  const double e_inf = infinite_temperature_energy(model);
  if (e0 == e_inf) throw IllConditionedError("Q_E undefined: E_0 equals the infinite-temperature energy");

  TrajectoryRecord rec = blank(model, tau, "Q_E_lindblad");
  const double dt = tau / cfg.steps_per_period;
  const long periods = static_cast<long>(std::floor(t_max / tau + 1e-9));
  double max_trace_drift = 0.0;
  double max_asymmetry = 0.0;
  for (long n = 0; n <= periods; ++n) {
    if (n > 0) {
      for (int s = 0; s < cfg.steps_per_period; ++s) {
        const MatrixXcd k1 = rhs(rho);
        const MatrixXcd k2 = rhs(rho + (0.5 * dt) * k1);
        const MatrixXcd k3 = rhs(rho + (0.5 * dt) * k2);
        const MatrixXcd k4 = rhs(rho + dt * k3);
        rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      }
    }
    const double drift = std::abs(rho.trace() - Complex(1.0, 0.0));
    max_trace_drift = std::max(max_trace_drift, drift);
    max_asymmetry = std::max(max_asymmetry, (rho - rho.adjoint()).cwiseAbs().maxCoeff());
    if (drift > 1e-6) {
      throw ConvergenceError("lindblad_oracle: trace drift exceeds 1e-6; reduce the step", drift);
    }
    const double energy = checked_real((rho * h).trace(), "Tr(rho H)");
    rec.push(n, static_cast<double>(n) * tau, (energy - e0) / (e_inf - e0));
  }
  rec.metadata = {{"eta", eta},
                  {"gamma", gamma},
                  {"magnus_order", cfg.magnus_order},
                  {"steps_per_period", cfg.steps_per_period},
                  {"max_trace_drift", max_trace_drift},
                  {"max_hermiticity_error", max_asymmetry}};
  return rec;
}

nlohmann::json to_json(const NoiseConfig& cfg) {
  return {{"kind", to_string(cfg.kind)},
          {"eta", cfg.eta},
          {"realizations", cfg.realizations},
          {"seed", cfg.seed},
          {"distribution", "uniform"}};
}

}  // namespace trotterlab
