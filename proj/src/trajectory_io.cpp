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

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "trotterlab/errors.hpp"
#include "trotterlab/observables.hpp"
#include "trotterlab/version.hpp"

namespace trotterlab {

namespace {

constexpr int kTrajectorySchema = 1;
constexpr const char* kCsvHeader = "step,time,value_re,value_im";

// %.17g round-trips every finite double and is locale independent for the
// "C" locale used by snprintf's default.
std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_csv(const TrajectoryRecord& traj, std::ostream& os) {
  traj.validate();
  os << kCsvHeader << '\n';
  for (std::size_t k = 0; k < traj.size(); ++k) {
    os << traj.steps[k] << ',' << format_double(traj.times[k]) << ','
       << format_double(traj.values[k].real()) << ',' << format_double(traj.values[k].imag())
       << '\n';
  }
}

TrajectoryRecord read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kCsvHeader) {
    throw ValidationError("trajectory csv: missing or unexpected header");
  }
  TrajectoryRecord out;
  long row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string cell[4];
    for (auto& c : cell) {
      if (!std::getline(ss, c, ',')) {
        throw ValidationError("trajectory csv: row " + std::to_string(row) + " has too few columns");
      }
    }
    try {
      out.push(std::stol(cell[0]), std::stod(cell[1]), Complex(std::stod(cell[2]), std::stod(cell[3])));
    } catch (const std::logic_error&) {
      throw ValidationError("trajectory csv: row " + std::to_string(row) + " is not numeric");
    }
  }
  if (out.size() > 1) out.tau = out.times[1] - out.times[0];
  return out;
}

nlohmann::json to_json(const IsingModel& model) {
  return {{"N", model.n_sites}, {"J", model.J}, {"h", model.h}, {"g", model.g}, {"boundary", "open"}};
}

IsingModel model_from_json(const nlohmann::json& j) {
  IsingModel m;
  m.n_sites = j.value("N", m.n_sites);
  m.J = j.value("J", m.J);
  m.h = j.value("h", m.h);
  m.g = j.value("g", m.g);
  if (j.contains("boundary") && j.at("boundary") != "open") {
    throw ValidationError("model: only the open boundary is supported");
  }
  m.validate();
  return m;
}

nlohmann::json to_json(const TrajectoryRecord& traj) {
  traj.validate();
  nlohmann::json re = nlohmann::json::array();
  nlohmann::json im = nlohmann::json::array();
  for (const Complex& v : traj.values) {
    re.push_back(v.real());
    im.push_back(v.imag());
  }
  return {
      {"schema_version", kTrajectorySchema},
      {"code_version", kCodeVersion},
      {"label", traj.label},
      {"model", to_json(traj.model)},
      {"tau", traj.tau},
      {"metadata", traj.metadata},
      {"step", traj.steps},
      {"time", traj.times},
      {"value_re", re},
      {"value_im", im},
  };
}

TrajectoryRecord trajectory_from_json(const nlohmann::json& j) {
  if (j.value("schema_version", 0) != kTrajectorySchema) {
    throw ValidationError("trajectory json: unsupported schema_version");
  }
  TrajectoryRecord out;
  try {
    out.label = j.at("label").get<std::string>();
    out.model = model_from_json(j.at("model"));
    out.tau = j.at("tau").get<double>();
    out.metadata = j.value("metadata", nlohmann::json::object());
    out.steps = j.at("step").get<std::vector<long>>();
    out.times = j.at("time").get<std::vector<double>>();
    const auto re = j.at("value_re").get<std::vector<double>>();
    const auto im = j.at("value_im").get<std::vector<double>>();
    if (re.size() != im.size()) throw ValidationError("trajectory json: value columns differ in length");
    out.values.resize(re.size());
    for (std::size_t k = 0; k < re.size(); ++k) out.values[k] = Complex(re[k], im[k]);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("trajectory json: ") + e.what());
  }
  out.validate();
  return out;
}

}  // namespace trotterlab
