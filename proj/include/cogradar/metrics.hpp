#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cogradar/pac.hpp"

namespace cogradar {

struct RmseCurve {
  std::vector<double> times;
  std::vector<double> rmse_altitude;
  std::vector<double> rmse_velocity;
  int n_runs = 0;
  int divergences = 0;
  std::string label;
};

struct PcrlbCurve {
  std::vector<double> times;
  std::vector<double> bound_altitude;
  std::vector<double> bound_velocity;
  std::vector<double> bound_ballistic;
};

/// RMSE across runs at each step. `estimates[r][k]` pairs with `truths[r][k]`.
RmseCurve rmse_curve(const std::vector<std::vector<StateVector>>& estimates,
                     const std::vector<std::vector<StateVector>>& truths, const std::vector<double>& times,
                     std::string label);

RmseCurve rmse_from_episodes(const std::vector<EpisodeRecord>& episodes, std::string label);

struct MonteCarloResult {
  std::vector<EpisodeRecord> episodes;  // successful runs, ordered by seed
  std::vector<std::uint64_t> diverged_seeds;
  int n_runs = 0;
};

/// Runs seeds seed0 .. seed0 + n_runs - 1 on `workers` threads. Aggregation
/// follows run index, so the result does not depend on scheduling. More than
/// 10% diverged runs is a HarnessError.
MonteCarloResult run_monte_carlo(const ScenarioConfig& cfg, RadarMode mode, const FilterKind& kind,
                                 const WaveformLibrary& lib, const SelectionPolicy& policy, int n_runs,
                                 std::uint64_t seed0, int workers = 1);

std::string curve_label(RadarMode mode, const FilterKind& kind);

RmseCurve monte_carlo_rmse(const ScenarioConfig& cfg, RadarMode mode, const FilterKind& kind,
                           const WaveformLibrary& lib, const SelectionPolicy& policy, int n_runs,
                           std::uint64_t seed0, int workers = 1);

/// One run's inputs to the information recursion.
struct PcrlbRun {
  std::vector<Matrix2> noise_covs;  // R_1 .. R_K
  std::vector<StateVector> truth;   // x_1 .. x_K
};

/// Fisher-information recursion along a truth trajectory:
///   J_0 = P_0^-1,
///   J_{k+1} = (F_k J_k^-1 F_k^T + Q)^-1 + H_{k+1}^T R_{k+1}^-1 H_{k+1},
/// with Jacobians at the truth (x_0 = cfg.x0_true) and Q = cfg.process_noise.
/// Information matrices are averaged across runs before inversion.
PcrlbCurve pcrlb_recursion(const ScenarioConfig& cfg, const std::vector<PcrlbRun>& runs);
PcrlbCurve pcrlb_recursion(const ScenarioConfig& cfg, const PcrlbRun& run);

PcrlbRun pcrlb_inputs(const EpisodeRecord& episode);

enum class Ordering { Better, Worse, Tie };
const char* to_string(Ordering o);

struct CurveSummary {
  std::string label;
  double mean_altitude = 0.0;
  double mean_velocity = 0.0;
};

struct PairOrdering {
  std::size_t first = 0;
  std::size_t second = 0;
  Ordering altitude = Ordering::Tie;  // first relative to second; lower is better
  Ordering velocity = Ordering::Tie;
};

struct ComparisonTable {
  std::vector<CurveSummary> summaries;
  std::vector<PairOrdering> pairs;  // every (a, b) with a < b
};

ComparisonTable compare_curves(const std::vector<RmseCurve>& curves);

}  // namespace cogradar
