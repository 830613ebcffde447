#include "cogradar/waveform.hpp"

#include <cmath>
#include <string>

#include "cogradar/errors.hpp"

namespace cogradar {
namespace {

constexpr const char* kModule = "waveform";

std::vector<double> uniform_grid(double lo, double hi, int count) {
  std::vector<double> grid(static_cast<std::size_t>(count));
  if (count == 1) {
    grid[0] = 0.5 * (lo + hi);
    return grid;
  }
  for (int k = 0; k < count; ++k) grid[k] = lo + (hi - lo) * k / (count - 1);
  return grid;
}

}  // namespace

bool is_valid(const Waveform& w) {
  return std::isfinite(w.duration) && std::isfinite(w.chirp_rate) && w.duration > 0.0 &&
         std::abs(w.chirp_rate) * w.duration * w.duration < 0.5;
}

Matrix2 noise_covariance(const Waveform& w, double snr, double carrier_freq) {
  if (!is_valid(w)) {
    throw InvalidWaveformError(kModule, "waveform violates duration > 0 and |b| * duration^2 < 1/2");
  }
  if (!(snr > 0.0) || !(carrier_freq > 0.0)) {
    throw InvalidWaveformError(kModule, "snr and carrier frequency must be positive");
  }
  const double c2 = kSpeedOfLight * kSpeedOfLight;
  const double lam2 = w.duration * w.duration;
  const double b = w.chirp_rate;
  Matrix2 r;
  r(0, 0) = c2 * lam2 / 2.0;
  r(0, 1) = -c2 * b * lam2 / carrier_freq;
  r(1, 0) = r(0, 1);
  r(1, 1) = c2 / (2.0 * carrier_freq * carrier_freq) * (1.0 / (2.0 * lam2) + 2.0 * b * b * lam2);
  return r / snr;
}

double effective_snr(const ScenarioConfig& cfg, double range) {
  if (!cfg.range_dependent_snr) return cfg.snr;
  const double ratio = cfg.reference_range / range;
  return cfg.snr * ratio * ratio * ratio * ratio;
}

WaveformLibrary::WaveformLibrary(std::vector<double> duration_grid, std::vector<double> chirp_grid,
                                 std::vector<Waveform> entries, GridIndex fixed_index, int clamped)
    : duration_grid_(std::move(duration_grid)),
      chirp_grid_(std::move(chirp_grid)),
      entries_(std::move(entries)),
      fixed_index_(fixed_index),
      clamped_(clamped) {
  if (duration_grid_.empty() || chirp_grid_.empty() || entries_.size() != duration_grid_.size() * chirp_grid_.size()) {
    throw ConfigError(kModule, "library grids must be non-empty and match the entry count");
  }
  for (const Waveform& w : entries_) {
    if (!is_valid(w)) throw ConfigError(kModule, "library entry violates the waveform bound");
  }
  if (!contains(fixed_index_)) throw ConfigError(kModule, "waveform.fixed_index lies outside the library");
}

bool WaveformLibrary::contains(GridIndex idx) const {
  return idx.i >= 0 && idx.j >= 0 && idx.i < duration_count() && idx.j < chirp_count();
}

const Waveform& WaveformLibrary::at(GridIndex idx) const {
  if (!contains(idx)) throw InputError(kModule, "library index out of range");
  return entries_[static_cast<std::size_t>(idx.i) * chirp_grid_.size() + static_cast<std::size_t>(idx.j)];
}

WaveformLibrary build_library(const LibrarySpec& spec) {
  if (spec.duration_count < 1 || spec.chirp_count < 1) {
    throw ConfigError(kModule, "waveform.duration_count and waveform.chirp_count must be >= 1");
  }
  if (!(spec.duration_min > 0.0) || !(spec.duration_max >= spec.duration_min) || !std::isfinite(spec.duration_max)) {
    throw ConfigError(kModule, "waveform duration range must satisfy 0 < duration_min <= duration_max (empty feasible set)");
  }
  if (!(spec.chirp_max >= spec.chirp_min) || !std::isfinite(spec.chirp_min) || !std::isfinite(spec.chirp_max)) {
    throw ConfigError(kModule, "waveform chirp range must satisfy chirp_min <= chirp_max");
  }

  std::vector<double> durations = uniform_grid(spec.duration_min, spec.duration_max, spec.duration_count);
  std::vector<double> chirps = uniform_grid(spec.chirp_min, spec.chirp_max, spec.chirp_count);

  std::vector<Waveform> entries;
  entries.reserve(durations.size() * chirps.size());
  int clamped = 0;
  for (double lam : durations) {
    const double bound = chirp_bound(lam);
    for (double b : chirps) {
      Waveform w{lam, b};
      if (std::abs(b) >= bound) {
        w.chirp_rate = std::copysign(bound * (1.0 - 1e-6), b);
        ++clamped;
      }
      entries.push_back(w);
    }
  }

  GridIndex fixed{(spec.duration_count - 1) / 2, (spec.chirp_count - 1) / 2};
  if (spec.has_fixed_index) fixed = spec.fixed_index;
  return WaveformLibrary(std::move(durations), std::move(chirps), std::move(entries), fixed, clamped);
}

}  // namespace cogradar
