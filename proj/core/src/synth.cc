// Copyright 2026 The pvroute Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pvroute/synth.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "pvroute/errors.h"

namespace pvroute {
namespace {

constexpr std::array<double, 3> kRegimeLevel = {1.0, 0.6, 0.25};
constexpr double kLevelPull = 0.6;  // fraction of the gap closed per slot
constexpr double kFluctuationDecay = 0.7;

struct SiteShape {
  double sunrise;
  double sunset;
  double exponent;
  double dip_center;  // negative when the site has no shading dip
  double capacity;
};

SiteShape MakeShape(const SyntheticConfig& config, int node) {
  const double i = static_cast<double>(node);
  SiteShape s;
  s.sunrise = 0.25 + 0.04 * std::sin(1.7 * i + 0.3);
  s.sunset = 0.77 + 0.04 * std::cos(1.3 * i + 0.1);
  s.exponent = 1.2 + 0.3 * std::sin(2.3 * i + 0.7);
  s.dip_center = node % 2 == 1 ? 0.36 + 0.05 * (node % 3) : -1.0;
  const double golden = std::fmod(0.61803398875 * (i + 1.0), 1.0);
  s.capacity =
      config.capacity_min + (config.capacity_max - config.capacity_min) * golden;
  return s;
}

double ClearSky(const SiteShape& shape, double day_fraction) {
  if (day_fraction <= shape.sunrise || day_fraction >= shape.sunset) return 0.0;
  const double phase =
      (day_fraction - shape.sunrise) / (shape.sunset - shape.sunrise);
  double value = std::pow(std::sin(std::numbers::pi * phase), shape.exponent);
  if (shape.dip_center > 0.0) {
    const double z = (day_fraction - shape.dip_center) / 0.02;
    value *= 1.0 - 0.5 * std::exp(-z * z);
  }
  return value;
}

int NextRegime(const std::array<double, 3>& row, double u) {
  double acc = 0.0;
  for (int k = 0; k < 3; ++k) {
    acc += row[k];
    if (u < acc) return k;
  }
  return 2;
}

}  // namespace

void SyntheticConfig::Validate() const {
  if (nodes < 1 || slots < 1 || slots_per_day < 2) {
    throw ConfigError("synthetic: nodes, slots and slots_per_day must be >= 1");
  }
  if (hazard < 0.0 || hazard > 1.0) {
    throw ConfigError("synthetic: hazard must lie in [0,1]");
  }
  for (const auto& row : transition) {
    double total = 0.0;
    for (double p : row) {
      if (p < 0.0) throw ConfigError("synthetic: negative transition prob");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) {
      throw ConfigError("synthetic: transition rows must sum to 1");
    }
  }
  if (initial_regime < 0 || initial_regime > 2) {
    throw ConfigError("synthetic: initial_regime must be 0, 1 or 2");
  }
  if (ramp_magnitude < 0.0 || noise < 0.0 || weather_lead < 0) {
    throw ConfigError("synthetic: ramp, noise and lead must be nonnegative");
  }
  if (!(capacity_min > 0.0) || capacity_max < capacity_min) {
    throw ConfigError("synthetic: invalid capacity range");
  }
}

std::vector<RawSeries> Synthesize(const SyntheticConfig& config,
                                  std::uint64_t seed) {
  config.Validate();
  const int T = config.slots;
  const int lead = config.weather_lead;
  const std::int64_t cadence = 86400 / config.slots_per_day;
  std::vector<RawSeries> out;
  out.reserve(config.nodes);

  for (int node = 0; node < config.nodes; ++node) {
    const SiteShape shape = MakeShape(config, node);
    std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL +
                        static_cast<std::uint64_t>(node) * 1000003ULL + 17ULL);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    // Attenuation is simulated `lead` slots past the end so the leading
    // cloud-cover covariate is defined on every row.
    const int span = T + lead;
    std::vector<int> regime(span);
    std::vector<double> attenuation(span);
    int r = config.initial_regime;
    double level = kRegimeLevel[r];
    double fluctuation = 0.0;
    for (int t = 0; t < span; ++t) {
      if (config.hazard > 0.0 && unit(rng) < config.hazard) {
        r = NextRegime(config.transition[r], unit(rng));
      }
      regime[t] = r;
      level += kLevelPull * (kRegimeLevel[r] - level);
      fluctuation *= kFluctuationDecay;
      if (r == static_cast<int>(Regime::kBroken)) {
        fluctuation += 0.35 * config.ramp_magnitude * gauss(rng);
      }
      attenuation[t] = std::clamp(level + fluctuation, 0.05, 1.05);
    }

    RawSeries s;
    s.node_id = "site" + std::to_string(node);
    s.capacity = shape.capacity;
    s.covariate_names = {"cloud_cover", "temperature"};
    s.covariates.assign(2, std::vector<double>(T));
    s.timestamps.resize(T);
    s.power.resize(T);
    s.regimes.assign(regime.begin(), regime.begin() + T);
    for (int t = 0; t < T; ++t) {
      s.timestamps[t] = config.start + static_cast<std::int64_t>(t) * cadence;
      const double day_fraction =
          static_cast<double>(t % config.slots_per_day) / config.slots_per_day;
      const double cs = ClearSky(shape, day_fraction);
      double y = 0.0;
      if (cs > 0.0) {
        const double eps = config.noise > 0.0 ? gauss(rng) : 0.0;
        y = std::clamp(cs * attenuation[t] + config.noise * eps, 0.0, 1.0);
      }
      s.power[t] = y * shape.capacity;
      const double cover_noise = config.noise > 0.0 ? gauss(rng) : 0.0;
      s.covariates[0][t] = std::clamp(
          1.0 - attenuation[t + lead] + 0.5 * config.noise * cover_noise, 0.0,
          1.0);
      const double temp_noise = config.noise > 0.0 ? gauss(rng) : 0.0;
      s.covariates[1][t] =
          12.0 + 14.0 * cs * attenuation[t] + 20.0 * config.noise * temp_noise;
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace pvroute
