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

#include <algorithm>
#include <cmath>
#include <sstream>

#include "trotterlab/errors.hpp"
#include "trotterlab/harness.hpp"

namespace trotterlab {

ThresholdEstimate locate_threshold(const std::vector<double>& taus, const std::vector<double>& values,
                                   double min_contrast) {
  if (taus.size() != values.size()) throw ValidationError("locate_threshold: tau and value counts differ");
  if (taus.size() < 8) throw ValidationError("locate_threshold: need at least 8 grid points");
  for (std::size_t k = 0; k < taus.size(); ++k) {
    if (!(taus[k] > 0.0) || (k > 0 && !(taus[k] > taus[k - 1]))) {
      throw ValidationError("locate_threshold: tau grid must be positive and increasing");
    }
    if (!std::isfinite(values[k])) throw ValidationError("locate_threshold: non-finite value");
  }
  const std::size_t n = values.size();
  ThresholdEstimate out;
  out.low_plateau = (values[0] + values[1] + values[2]) / 3.0;
  out.high_plateau = (values[n - 1] + values[n - 2] + values[n - 3]) / 3.0;
  out.midpoint = 0.5 * (out.low_plateau + out.high_plateau);
  const double contrast = out.high_plateau - out.low_plateau;
  if (!(contrast >= min_contrast)) {
    std::ostringstream os;
    os << "locate_threshold: no upward crossover (low plateau " << out.low_plateau << ", high plateau "
       << out.high_plateau << ", required contrast " << min_contrast << ")";
    throw NotFoundError(os.str());
  }
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (values[k] < out.midpoint && values[k + 1] >= out.midpoint) {
      const double frac = (out.midpoint - values[k]) / (values[k + 1] - values[k]);
      out.tau_star = std::exp(std::log(taus[k]) + frac * (std::log(taus[k + 1]) - std::log(taus[k])));
      out.uncertainty = taus[k + 1] - taus[k];
      return out;
    }
  }
  throw NotFoundError("locate_threshold: values never cross the midpoint");
}

ThresholdEstimate locate_threshold(const ResultBundle& bundle, int n_sites, double min_contrast) {
  const ExperimentKind kind = bundle.config.experiment;
  const char* key = nullptr;
  if (kind == ExperimentKind::kQeSweep) {
    key = "Q_E_mean";
  } else if (kind == ExperimentKind::kIprSweep) {
    key = "ratio";
  } else {
    throw ValidationError("locate_threshold: bundle is not a qe-sweep or ipr-sweep");
  }
  const int size = n_sites > 0 ? n_sites : bundle.config.model.n_sites;
  std::vector<std::pair<double, double>> points;
  for (const JobRecord& job : bundle.jobs) {
    if (job.n_sites != size || !job.tau) continue;
    if (job.status != JobStatus::kOk) {
      throw ValidationError("locate_threshold: job " + std::to_string(job.index) + " did not complete");
    }
    points.emplace_back(*job.tau, job.summary.at(key).get<double>());
  }
  std::sort(points.begin(), points.end());
  std::vector<double> taus;
  std::vector<double> values;
  for (const auto& [t, v] : points) {
    taus.push_back(t);
    values.push_back(v);
  }
  return locate_threshold(taus, values, min_contrast);
}

}  // namespace trotterlab
