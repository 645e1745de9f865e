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

#include "trotterlab/observables.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "trotterlab/errors.hpp"

namespace trotterlab {

std::string to_string(Observable obs) {
  switch (obs) {
    case Observable::kMagnetization: return "M";
    case Observable::kEnergy: return "E";
    case Observable::kAccuracy: return "Q_E";
    case Observable::kLoschmidt: return "P";
  }
  return "?";
}

std::vector<double> TrajectoryRecord::real_values() const {
  std::vector<double> out(values.size());
  std::transform(values.begin(), values.end(), out.begin(), [](Complex v) { return v.real(); });
  return out;
}

void TrajectoryRecord::push(long step, double time, Complex value) {
  steps.push_back(step);
  times.push_back(time);
  values.push_back(value);
}

void TrajectoryRecord::validate() const {
  if (times.size() != values.size() || steps.size() != values.size()) {
    throw ContractViolation("trajectory " + label + ": column lengths differ");
  }
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (!(times[k] > times[k - 1])) {
      throw ContractViolation("trajectory " + label + ": times not strictly increasing");
    }
    const double spacing = times[k] - times[k - 1];
    if (std::abs(spacing - tau) > 1e-9 * std::max(1.0, tau)) {
      throw ContractViolation("trajectory " + label + ": times not spaced by tau");
    }
  }
}

LongTimeAverage stroboscopic_average(std::span<const double> values, long window) {
  if (window <= 0) throw ContractViolation("stroboscopic_average: empty window");
  if (static_cast<std::size_t>(window) > values.size()) {
    throw ContractViolation("stroboscopic_average: window exceeds trajectory length");
  }
  const std::size_t start = values.size() - static_cast<std::size_t>(window);
  double sum = 0.0;
  for (std::size_t k = start; k < values.size(); ++k) sum += values[k];
  const double mean = sum / static_cast<double>(window);
  double var = 0.0;
  for (std::size_t k = start; k < values.size(); ++k) var += (values[k] - mean) * (values[k] - mean);
  return LongTimeAverage{mean, static_cast<long>(start), window,
                         std::sqrt(var / static_cast<double>(window))};
}

LongTimeAverage stroboscopic_average(const TrajectoryRecord& traj, long window) {
  const std::vector<double> re = traj.real_values();
  LongTimeAverage avg = stroboscopic_average(re, window);
  if (!traj.steps.empty()) avg.window_start_period = traj.steps[static_cast<std::size_t>(avg.window_start_period)];
  return avg;
}

double infinite_temperature_energy(const IsingModel& model) {
  // Tr H_X = 0; Tr H_Z is the sum of the diagonal.
  const DiagonalObservable hz = hz_diagonal(model);
  double sum = 0.0;
  for (double v : hz.values) sum += v;
  return sum / static_cast<double>(hz.values.size());
}

namespace {

// Measures the requested observables on one state.
class ObservableProbe {
 public:
  ObservableProbe(const IsingModel& model, const std::set<Observable>& which)
      : model_(model),
        which_(which),
        hz_(hz_diagonal(model)),
        magnetization_(magnetization_diagonal(model.n_sites)),
        initial_(make_all_up_state(model.n_sites)) {
    e0_ = hz_.values[0];
    e_inf_ = infinite_temperature_energy(model);
    if (which_.count(Observable::kAccuracy) && e_inf_ == e0_) {
      throw IllConditionedError("Q_E undefined: E_0 equals the infinite-temperature energy");
    }
  }

  void record(TrajectorySet& out, long step, double time, const SpinState& psi) const {
    double energy = 0.0;
    if (which_.count(Observable::kEnergy) || which_.count(Observable::kAccuracy)) {
      energy = expectation(psi, hz_) + expectation_hx(psi, model_);
    }
    for (Observable obs : which_) {
      double value = 0.0;
      switch (obs) {
        case Observable::kMagnetization: value = expectation(psi, magnetization_); break;
        case Observable::kEnergy: value = energy; break;
        case Observable::kAccuracy: value = (energy - e0_) / (e_inf_ - e0_); break;
        case Observable::kLoschmidt: value = std::norm(inner_product(initial_, psi)); break;
      }
      out[obs].push(step, time, Complex(value, 0.0));
    }
  }

  TrajectorySet empty_set(double tau, const std::string& prefix) const {
    TrajectorySet set;
    for (Observable obs : which_) {
      TrajectoryRecord rec;
      rec.label = prefix + to_string(obs);
      rec.model = model_;
      rec.tau = tau;
      rec.metadata["E0"] = e0_;
      rec.metadata["E_inf"] = e_inf_;
      set.emplace(obs, std::move(rec));
    }
    return set;
  }

 private:
  IsingModel model_;
  std::set<Observable> which_;
  DiagonalObservable hz_;
  DiagonalObservable magnetization_;
  SpinState initial_;
  double e0_ = 0.0;
  double e_inf_ = 0.0;
};

}  // namespace

TrajectorySet run_dynamics(const IsingModel& model, double tau, int n_steps,
                           const std::set<Observable>& observables) {
  TrotterConfig{tau, n_steps}.validate();
  const ObservableProbe probe(model, observables);
  const TrotterPropagator prop(model, tau);
  TrajectorySet out = probe.empty_set(tau, "");
  SpinState psi = make_all_up_state(model.n_sites);
  NormGuard guard;
  probe.record(out, 0, 0.0, psi);
  for (long n = 1; n <= n_steps; ++n) {
    prop.step(psi);
    guard.after_period(psi, n);
    probe.record(out, n, static_cast<double>(n) * tau, psi);
  }
  for (auto& [obs, rec] : out) {
    rec.metadata["evolution"] = "trotter";
    rec.metadata["renormalizations"] = guard.corrections();
    rec.metadata["max_norm_drift"] = guard.max_drift();
  }
  return out;
}

TrajectorySet exact_reference(const IsingModel& model, const std::vector<double>& times,
                              const std::set<Observable>& observables, const KrylovConfig& cfg) {
  if (times.empty()) throw ValidationError("exact_reference: empty time grid");
  const double spacing = times.size() > 1 ? times[1] - times[0] : 0.0;
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (std::abs((times[k] - times[k - 1]) - spacing) > 1e-9 * std::max(1.0, std::abs(spacing)) ||
        !(spacing > 0.0)) {
      throw ValidationError("exact_reference: times must be an evenly spaced increasing grid");
    }
  }
  const ObservableProbe probe(model, observables);
  KrylovPropagator prop(model, cfg);
  TrajectorySet out = probe.empty_set(spacing, "exact_");
  SpinState psi = make_all_up_state(model.n_sites);
  double now = 0.0;
  int max_dim = 0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (times[k] != now) prop.evolve(psi, times[k] - now);
    max_dim = std::max(max_dim, prop.last_max_dim());
    now = times[k];
    const long step = spacing > 0.0 ? std::lround(times[k] / spacing) : 0;
    probe.record(out, step, times[k], psi);
  }
  for (auto& [obs, rec] : out) {
    rec.metadata["evolution"] = "krylov";
    rec.metadata["krylov_tol"] = cfg.tol;
    rec.metadata["krylov_max_dim_used"] = max_dim;
  }
  return out;
}

TrotterErrorResult trotter_error_trajectory(const IsingModel& model, double tau, int n_steps,
                                            const KrylovConfig& cfg) {
  if (model.h == 0.0) throw IllConditionedError("trotter_error_trajectory: (h tau)^2 normalization needs h != 0");
  TrajectorySet trotter = run_dynamics(model, tau, n_steps, {Observable::kMagnetization});
  std::vector<double> times(static_cast<std::size_t>(n_steps) + 1);
  for (std::size_t k = 0; k < times.size(); ++k) times[k] = static_cast<double>(k) * tau;
  TrajectorySet exact = exact_reference(model, times, {Observable::kMagnetization}, cfg);

  TrotterErrorResult out;
  out.trotter = std::move(trotter.at(Observable::kMagnetization));
  out.exact = std::move(exact.at(Observable::kMagnetization));
  const double scale = (model.h * tau) * (model.h * tau);
  auto make = [&](const std::string& label) {
    TrajectoryRecord r;
    r.label = label;
    r.model = model;
    r.tau = tau;
    return r;
  };
  out.delta = make("dM");
  out.normalized = make("dM_over_htau2");
  out.shift = make("M_exact_minus_M_trotter");
  for (std::size_t k = 0; k < out.trotter.size(); ++k) {
    const double d = out.exact.values[k].real() - out.trotter.values[k].real();
    out.shift.push(out.trotter.steps[k], out.trotter.times[k], d);
    out.delta.push(out.trotter.steps[k], out.trotter.times[k], std::abs(d));
    out.normalized.push(out.trotter.steps[k], out.trotter.times[k], std::abs(d) / scale);
  }
  return out;
}

double reflection_even_dimension(int n_sites) {
  const double full = std::ldexp(1.0, n_sites);
  const double palindromes = std::ldexp(1.0, (n_sites + 1) / 2);
  return 0.5 * (full + palindromes);
}

IprResult ipr_dynamical(const IsingModel& model, double tau, int n_steps, long window) {
  if (window <= 0) throw ContractViolation("ipr_dynamical: empty window");
  if (window > n_steps) throw ContractViolation("ipr_dynamical: window exceeds simulated span");
  if (static_cast<long>(n_steps) < 2 * window) {
    throw ContractViolation("ipr_dynamical: n_steps must be at least twice the window");
  }
  TrajectorySet traj = run_dynamics(model, tau, n_steps, {Observable::kLoschmidt});
  IprResult out;
  out.loschmidt = std::move(traj.at(Observable::kLoschmidt));
  const LongTimeAverage avg = stroboscopic_average(out.loschmidt, window);
  out.ipr = avg.mean;
  out.fluctuation = avg.fluctuation;
  const double n = model.n_sites;
  out.dimension = std::ldexp(1.0, model.n_sites);
  out.lambda_ipr = std::log(out.ipr) / n;
  out.lambda_d = (std::log(out.dimension) - std::numbers::ln2) / n;
  out.ratio = std::log(out.ipr) / -(std::log(out.dimension) - std::numbers::ln2);
  out.even_sector_dimension = reflection_even_dimension(model.n_sites);
  out.ratio_even_sector = std::log(out.ipr) / -(std::log(out.even_sector_dimension) - std::numbers::ln2);
  return out;
}

FloquetIpr floquet_ipr(const IsingModel& model, double tau, double degeneracy_tol) {
  const EigenDecomposition eig = floquet_eigensystem(model, tau);
  const Eigen::Index dim = eig.energies.size();
  FloquetIpr out;
  out.min_gap = eig.min_gap;
  // Overlap with the all-up state is the first row of the eigenvector matrix.
  std::vector<double> p(static_cast<std::size_t>(dim));
  for (Eigen::Index k = 0; k < dim; ++k) p[static_cast<std::size_t>(k)] = std::norm(eig.vectors(0, k));
  for (double pk : p) out.ipr_per_vector += pk * pk;

  // Quasi-energies are sorted; blocks are chains of gaps below tol, with the
  // last block allowed to wrap around the zone boundary.
  const double zone = 2.0 * std::numbers::pi / tau;
  std::vector<double> block_weights;
  double current = p[0];
  int current_size = 1;
  for (Eigen::Index k = 1; k < dim; ++k) {
    if (eig.energies(k) - eig.energies(k - 1) < degeneracy_tol) {
      current += p[static_cast<std::size_t>(k)];
      ++current_size;
    } else {
      block_weights.push_back(current);
      if (current_size > 1) ++out.degenerate_blocks;
      current = p[static_cast<std::size_t>(k)];
      current_size = 1;
    }
  }
  if (dim > 1 && !block_weights.empty() &&
      eig.energies(0) + zone - eig.energies(dim - 1) < degeneracy_tol) {
    block_weights.front() += current;
    ++out.degenerate_blocks;
  } else {
    block_weights.push_back(current);
    if (current_size > 1) ++out.degenerate_blocks;
  }
  for (double w : block_weights) out.ipr += w * w;
  return out;
}

OtocResult otoc_run(const IsingModel& model, double tau, int n_steps, long window) {
  TrotterConfig{tau, n_steps}.validate();
  if (window <= 0 || window > n_steps + 1) throw ContractViolation("otoc_run: bad averaging window");
  const TrotterPropagator prop(model, tau);
  const DiagonalObservable v = magnetization_diagonal(model.n_sites);
  const DiagonalObservable& w = v;

  SpinState forward = make_all_up_state(model.n_sites);  // U^n psi_0
  SpinState forward_w(model.n_sites);                    // U^n W psi_0
  apply_diagonal(w, forward, forward_w);
  SpinState back_1(model.n_sites);
  SpinState back_2(model.n_sites);
  SpinState psi_1(model.n_sites);

  OtocResult out;
  out.correlator.label = "F";
  out.correlator.model = model;
  out.correlator.tau = tau;
  for (long n = 0; n <= n_steps; ++n) {
    if (n > 0) {
      prop.step(forward);
      prop.step(forward_w);
    }
    apply_diagonal(v, forward, back_1);
    apply_diagonal(v, forward_w, back_2);
    for (long k = 0; k < n; ++k) {
      prop.step_inverse(back_1);
      prop.step_inverse(back_2);
    }
    apply_diagonal(w, back_1, psi_1);
    out.correlator.push(n, static_cast<double>(n) * tau, inner_product(psi_1, back_2));
  }

  out.real_part = stroboscopic_average(out.correlator, window);
  std::vector<double> mags(out.correlator.size());
  std::transform(out.correlator.values.begin(), out.correlator.values.end(), mags.begin(),
                 [](Complex z) { return std::abs(z); });
  out.magnitude = stroboscopic_average(mags, window);
  out.magnitude.window_start_period = out.real_part.window_start_period;
  out.normalized = out.real_part.mean / kOtocMaximum;
  out.normalized_magnitude = out.magnitude.mean / kOtocMaximum;
  out.correlator.metadata["F0"] = kOtocMaximum;
  out.correlator.metadata["window"] = window;
  return out;
}

}  // namespace trotterlab
