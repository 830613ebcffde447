#pragma once

#include <compare>
#include <vector>

#include "cogradar/models.hpp"

namespace cogradar {

/// Speed of light [ft/s].
inline constexpr double kSpeedOfLight = 9.8357e8;

/// Gaussian-envelope linear-FM pulse.
struct Waveform {
  double duration = 0.0;    // envelope length lambda [s]
  double chirp_rate = 0.0;  // sweep rate b [Hz/s], signed
};

/// Largest admissible |chirp_rate| for a duration: |b| * lambda^2 < 1/2.
inline double chirp_bound(double duration) { return 0.5 / (duration * duration); }

bool is_valid(const Waveform& w);

/// Matched-filter range / range-rate error covariance for a waveform.
/// Throws InvalidWaveformError when the waveform violates its bound.
Matrix2 noise_covariance(const Waveform& w, double snr, double carrier_freq);

/// SNR seen at `range`: constant, or snr * (r0 / r)^4 when enabled.
double effective_snr(const ScenarioConfig& cfg, double range);

struct GridIndex {
  int i = 0;  // duration axis
  int j = 0;  // chirp axis
  auto operator<=>(const GridIndex&) const = default;
};

struct LibrarySpec {
  double duration_min = 10e-6;
  double duration_max = 300e-6;
  int duration_count = 30;
  double chirp_min = -5e6;
  double chirp_max = 5e6;
  int chirp_count = 21;
  bool has_fixed_index = false;  // default: center entry
  GridIndex fixed_index{};
};

class WaveformLibrary {
 public:
  WaveformLibrary(std::vector<double> duration_grid, std::vector<double> chirp_grid, std::vector<Waveform> entries,
                  GridIndex fixed_index, int clamped);

  int duration_count() const { return static_cast<int>(duration_grid_.size()); }
  int chirp_count() const { return static_cast<int>(chirp_grid_.size()); }
  std::size_t size() const { return entries_.size(); }

  const std::vector<double>& duration_grid() const { return duration_grid_; }
  const std::vector<double>& chirp_grid() const { return chirp_grid_; }
  const Waveform& at(GridIndex idx) const;
  bool contains(GridIndex idx) const;
  GridIndex fixed_index() const { return fixed_index_; }
  /// Number of grid entries whose chirp was clamped to the PD bound.
  int clamped() const { return clamped_; }

 private:
  std::vector<double> duration_grid_;
  std::vector<double> chirp_grid_;
  std::vector<Waveform> entries_;  // row-major over (duration, chirp)
  GridIndex fixed_index_;
  int clamped_;
};

/// Uniform grid over [min, max] per axis (midpoint when count == 1).
/// Chirps beyond the bound are clamped to bound * (1 - 1e-6).
WaveformLibrary build_library(const LibrarySpec& spec);

}  // namespace cogradar
