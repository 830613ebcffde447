#include "cogradar/pac.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "cogradar/errors.hpp"

namespace cogradar {
namespace {

constexpr const char* kModule = "pac";

Matrix2 candidate_noise(const Waveform& w, const TrackingModel& model, double range) {
  return noise_covariance(w, effective_snr(model.cfg, range), model.cfg.carrier_freq);
}

double posterior_cost(const Belief& predicted, const MeasurementPrediction<double>& pred, const Waveform& w,
                      const TrackingModel& model, const SelectionPolicy& policy) {
  const Eigen::MatrixXd r = candidate_noise(w, model, pred.mean(kRange));
  const Belief post = update<double>(predicted, pred, pred.mean, r);
  return covariance_cost(post.cov, policy);
}

struct Selection {
  GridIndex index;
  double cost;
};

Selection select_from_prediction(const Belief& predicted, const MeasurementPrediction<double>& pred,
                                 GridIndex center, const WaveformLibrary& lib, const TrackingModel& model,
                                 const SelectionPolicy& policy) {
  Selection best{center, std::numeric_limits<double>::infinity()};
  bool first = true;
  for (GridIndex idx : search_window(center, lib, policy.window_radius)) {
    const double cost = posterior_cost(predicted, pred, lib.at(idx), model, policy);
    // Window is enumerated lexicographically, so strict < keeps the smallest index on ties.
    if (first || cost < best.cost) {
      best = {idx, cost};
      first = false;
    }
  }
  return best;
}

}  // namespace

const char* to_string(RadarMode mode) {
  return mode == RadarMode::CognitiveRadar ? "cr" : "tar";
}

const char* to_string(CostCriterion criterion) {
  return criterion == CostCriterion::WeightedTrace ? "weighted_trace" : "entropy";
}

void validate(const SelectionPolicy& policy) {
  if (policy.window_radius < 0) throw ConfigError("config", "invalid policy.window_radius: must be >= 0");
  if (!policy.cost_weights.allFinite() || (policy.cost_weights.array() < 0.0).any() ||
      (policy.cost_weights.array() == 0.0).all()) {
    throw ConfigError("config", "invalid policy.cost_weights: must be nonnegative and not all zero");
  }
}

TrackingModel make_tracking_model(const ScenarioConfig& cfg) {
  TrackingModel model;
  model.cfg = cfg;
  model.dynamics.map = [cfg](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return transition(StateVector(x), cfg);
  };
  model.dynamics.jacobian = [cfg](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
    return transition_jacobian(StateVector(x), cfg);
  };
  model.observation.map = [cfg](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return measure(StateVector(x), cfg);
  };
  model.observation.jacobian = [cfg](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
    return measurement_jacobian(StateVector(x), cfg);
  };
  model.process_noise = cfg.filter_process_noise;
  return model;
}

Belief initial_belief(const ScenarioConfig& cfg) {
  return Belief{cfg.x0_est_mean, cfg.x0_est_cov};
}

Belief initial_belief(const ScenarioConfig& cfg, NoiseSource& noise) {
  Belief b = initial_belief(cfg);
  if (cfg.randomize_initial_estimate) {
    std::normal_distribution<double> normal(0.0, 1.0);
    StateVector e;
    for (Eigen::Index i = 0; i < 3; ++i) e(i) = normal(noise);
    b.mean += Matrix3(cfg.x0_est_cov.llt().matrixL()) * e;
  }
  return b;
}

double covariance_cost(const Eigen::MatrixXd& posterior_cov, const SelectionPolicy& policy) {
  if (policy.criterion == CostCriterion::WeightedTrace) {
    if (posterior_cov.rows() != policy.cost_weights.size()) {
      throw InputError(kModule, "cost weights do not match the state dimension");
    }
    return policy.cost_weights.dot(posterior_cov.diagonal());
  }
  Eigen::LLT<Eigen::MatrixXd> llt(posterior_cov);
  if (llt.info() != Eigen::Success) {
    throw NumericalDegeneracyError(kModule, "entropy of a non positive-definite covariance");
  }
  const double n = static_cast<double>(posterior_cov.rows());
  const double log_det = 2.0 * Eigen::MatrixXd(llt.matrixL()).diagonal().array().log().sum();
  return 0.5 * (n * std::log(2.0 * std::numbers::pi * std::numbers::e) + log_det);
}

double expected_cost(const Belief& belief, const Waveform& w, const FilterKind& kind, const TrackingModel& model,
                     const SelectionPolicy& policy) {
  const Belief predicted = predict(belief, kind, model.dynamics, model.process_noise);
  const auto pred = predict_measurement(predicted, kind, model.observation);
  return posterior_cost(predicted, pred, w, model, policy);
}

std::vector<GridIndex> search_window(GridIndex center, const WaveformLibrary& lib, int radius) {
  std::vector<GridIndex> out;
  const int i_lo = std::max(0, center.i - radius), i_hi = std::min(lib.duration_count() - 1, center.i + radius);
  const int j_lo = std::max(0, center.j - radius), j_hi = std::min(lib.chirp_count() - 1, center.j + radius);
  for (int i = i_lo; i <= i_hi; ++i) {
    for (int j = j_lo; j <= j_hi; ++j) out.push_back({i, j});
  }
  return out;
}

GridIndex select_waveform(const PacState& state, const WaveformLibrary& lib, const FilterKind& kind,
                          const TrackingModel& model, const SelectionPolicy& policy) {
  if (state.mode != RadarMode::CognitiveRadar) {
    throw InputError(kModule, "select_waveform requires CognitiveRadar mode");
  }
  if (!lib.contains(state.last_index)) throw InputError(kModule, "working-memory index outside the library");
  const Belief predicted = predict(state.belief, kind, model.dynamics, model.process_noise);
  const auto pred = predict_measurement(predicted, kind, model.observation);
  return select_from_prediction(predicted, pred, state.last_index, lib, model, policy).index;
}

CycleResult run_cycle(const PacState& state, const StateVector& truth, const WaveformLibrary& lib,
                      const FilterKind& kind, const TrackingModel& model, const SelectionPolicy& policy,
                      NoiseSource& noise) {
  if (!lib.contains(state.last_index)) throw InputError(kModule, "working-memory index outside the library");
  CycleResult out;
  out.predicted = predict(state.belief, kind, model.dynamics, model.process_noise);
  const auto pred = predict_measurement(out.predicted, kind, model.observation);

  out.index = state.mode == RadarMode::CognitiveRadar
                  ? select_from_prediction(out.predicted, pred, state.last_index, lib, model, policy).index
                  : lib.fixed_index();
  out.waveform = lib.at(out.index);

  const Measurement clean = measure(truth, model.cfg);
  out.noise_cov = candidate_noise(out.waveform, model, clean(kRange));
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::Vector2d e;
  e(0) = normal(noise);
  e(1) = normal(noise);
  const Matrix2 root = out.noise_cov.llt().matrixL();
  out.measurement = clean + root * e;

  // The filter models the noise it expects from the chosen waveform at the
  // predicted range.
  const Eigen::MatrixXd r_model = candidate_noise(out.waveform, model, pred.mean(kRange));
  out.state.belief = update<double>(out.predicted, pred, out.measurement, r_model);
  out.state.last_index = out.index;
  out.state.cycle = state.cycle + 1;
  out.state.mode = state.mode;
  return out;
}

NoiseSource truth_stream(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0x7472u};
  return NoiseSource(seq);
}

NoiseSource initial_estimate_stream(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0x696eu};
  return NoiseSource(seq);
}

NoiseSource measurement_stream(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0x6d73u};
  return NoiseSource(seq);
}

EpisodeRecord run_episode(const ScenarioConfig& cfg, RadarMode mode, const FilterKind& kind,
                          const WaveformLibrary& lib, const SelectionPolicy& policy,
                          std::optional<std::uint64_t> seed) {
  validate(cfg);
  validate(policy);
  EpisodeRecord record;
  record.mode = mode;
  record.kind = kind;
  record.seed = seed.value_or(cfg.seed);

  NoiseSource truth_noise = truth_stream(record.seed);
  const std::vector<TruthSample> truth = simulate_trajectory(cfg, truth_noise);
  const TrackingModel model = make_tracking_model(cfg);
  NoiseSource meas_noise = measurement_stream(record.seed);

  NoiseSource init_noise = initial_estimate_stream(record.seed);
  PacState state{initial_belief(cfg, init_noise), lib.fixed_index(), 0, mode};
  record.steps.reserve(truth.size());
  for (std::size_t k = 0; k < truth.size(); ++k) {
    const long step = static_cast<long>(k) + 1;
    CycleResult cycle;
    try {
      cycle = run_cycle(state, truth[k].state, lib, kind, model, policy, meas_noise);
    } catch (const Error& e) {
      throw SimulationDivergedError(kModule, std::string("episode failed: ") + e.what(), step);
    }
    if (!cycle.state.belief.mean.allFinite()) {
      throw SimulationDivergedError(kModule, "episode produced a non-finite estimate", step);
    }
    EpisodeStep rec;
    rec.time = static_cast<double>(step) * cfg.dt;
    rec.truth = truth[k].state;
    rec.measurement = cycle.measurement;
    rec.predicted = cycle.predicted;
    rec.posterior = cycle.state.belief;
    rec.index = cycle.index;
    rec.waveform = cycle.waveform;
    rec.noise_cov = cycle.noise_cov;
    record.steps.push_back(std::move(rec));
    state = std::move(cycle.state);
  }
  return record;
}

}  // namespace cogradar
