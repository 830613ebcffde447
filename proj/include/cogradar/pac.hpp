#pragma once

// Perception-action cycle: the filter perceives, the controller picks the next
// transmit waveform by one-step lookahead over a window of the library
// centred on the previous choice.

#include <optional>
#include <vector>

#include "cogradar/filters.hpp"
#include "cogradar/models.hpp"
#include "cogradar/waveform.hpp"

namespace cogradar {

using Belief = GaussianBelief<double>;

enum class RadarMode { CognitiveRadar, TraditionalActiveRadar };
enum class CostCriterion { WeightedTrace, Entropy };

const char* to_string(RadarMode mode);
const char* to_string(CostCriterion criterion);

struct SelectionPolicy {
  int window_radius = 2;
  StateVector cost_weights{1.0 / 1e6, 1.0 / 4e6, 1e4};
  CostCriterion criterion = CostCriterion::WeightedTrace;
};

void validate(const SelectionPolicy& policy);

/// Working memory carried between cycles.
struct PacState {
  Belief belief;
  GridIndex last_index;
  long cycle = 0;
  RadarMode mode = RadarMode::CognitiveRadar;
};

/// Scenario dynamics and observation wrapped for the filters.
struct TrackingModel {
  ScenarioConfig cfg;
  VectorFunction<double> dynamics;
  VectorFunction<double> observation;
  Eigen::MatrixXd process_noise;
};

TrackingModel make_tracking_model(const ScenarioConfig& cfg);

Belief initial_belief(const ScenarioConfig& cfg);

/// Scalar cost of a posterior covariance under the policy's criterion.
double covariance_cost(const Eigen::MatrixXd& posterior_cov, const SelectionPolicy& policy);

/// Cost of the posterior one cycle ahead if `w` were transmitted.
double expected_cost(const Belief& belief, const Waveform& w, const FilterKind& kind, const TrackingModel& model,
                     const SelectionPolicy& policy);

/// Library indices within `radius` of `center` per axis, clipped at edges,
/// in lexicographic order.
std::vector<GridIndex> search_window(GridIndex center, const WaveformLibrary& lib, int radius);

GridIndex select_waveform(const PacState& state, const WaveformLibrary& lib, const FilterKind& kind,
                          const TrackingModel& model, const SelectionPolicy& policy);

struct CycleResult {
  PacState state;
  Measurement measurement;
  Waveform waveform;
  GridIndex index;
  Belief predicted;
  Matrix2 noise_cov;
};

/// One perception-action loop. Consumes exactly two normals from `noise`.
CycleResult run_cycle(const PacState& state, const StateVector& truth, const WaveformLibrary& lib,
                      const FilterKind& kind, const TrackingModel& model, const SelectionPolicy& policy,
                      NoiseSource& noise);

struct EpisodeStep {
  double time = 0.0;
  StateVector truth;
  Measurement measurement;
  Belief predicted;
  Belief posterior;
  GridIndex index;
  Waveform waveform;
  Matrix2 noise_cov;
};

struct EpisodeRecord {
  RadarMode mode = RadarMode::CognitiveRadar;
  FilterKind kind;
  std::uint64_t seed = 0;
  std::vector<EpisodeStep> steps;
};

/// Separate streams for truth and measurement noise so that paired runs
/// sharing a seed share both the trajectory and the noise draws.
NoiseSource truth_stream(std::uint64_t seed);
NoiseSource measurement_stream(std::uint64_t seed);
NoiseSource initial_estimate_stream(std::uint64_t seed);

/// Initial belief for a run: cfg.x0_est_cov around x0_est_mean, with the mean
/// perturbed by a draw from that covariance when randomize_initial_estimate.
Belief initial_belief(const ScenarioConfig& cfg, NoiseSource& noise);

/// Full episode from cfg.seed (or `seed` when given).
EpisodeRecord run_episode(const ScenarioConfig& cfg, RadarMode mode, const FilterKind& kind,
                          const WaveformLibrary& lib, const SelectionPolicy& policy,
                          std::optional<std::uint64_t> seed = std::nullopt);

}  // namespace cogradar
