#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace cogradar {

/// Reentry target state: (altitude [ft], velocity [ft/s, positive down],
/// ballistic coefficient [1/ft]).
using StateVector = Eigen::Matrix<double, 3, 1>;
/// Radar observation: (range [ft], range rate [ft/s]).
using Measurement = Eigen::Matrix<double, 2, 1>;

using Matrix3 = Eigen::Matrix<double, 3, 3>;
using Matrix2 = Eigen::Matrix<double, 2, 2>;
using Matrix23 = Eigen::Matrix<double, 2, 3>;

enum StateIndex : Eigen::Index { kAltitude = 0, kVelocity = 1, kBallistic = 2 };
enum MeasurementIndex : Eigen::Index { kRange = 0, kRangeRate = 1 };

/// Seeded noise source. Every stochastic routine takes one explicitly.
using NoiseSource = std::mt19937_64;

enum class DynamicsKind { Reentry, Linear };

struct ScenarioConfig {
  DynamicsKind dynamics = DynamicsKind::Reentry;

  double gamma = 5e-5;             // air-density decay [1/ft]
  double radar_horizontal = 1e5;   // M [ft]
  double radar_altitude = 1e5;     // H [ft]
  double dt = 0.1;                 // [s]
  long steps = 300;
  int substeps = 1;                // RK4 steps per dt

  StateVector x0_true{3e5, 2e4, 1e-3};
  StateVector x0_est_mean{3e5, 2e4, 3e-5};
  Matrix3 x0_est_cov = StateVector(1e6, 4e6, 1e-4).asDiagonal();
  // Each run's initial estimate is drawn from N(x0_est_mean, x0_est_cov)
  // when set; otherwise every run starts at x0_est_mean.
  bool randomize_initial_estimate = true;
  Matrix3 process_noise = Matrix3::Zero();                                    // truth
  Matrix3 filter_process_noise = StateVector(1e-2, 1e-2, 1e-8).asDiagonal();  // filters

  double snr = 100.0;
  double carrier_freq = 1e10;  // [Hz]
  bool range_dependent_snr = false;
  double reference_range = 1e5;  // r0 for snr * (r0 / r)^4 [ft]

  // Used only when dynamics == Linear: x' = F x, z = H x.
  Matrix3 linear_transition = Matrix3::Identity();
  Matrix23 linear_observation = (Matrix23() << 1, 0, 0, 0, 1, 0).finished();

  std::uint64_t seed = 1;
};

/// Throws ConfigError naming the first offending field.
void validate(const ScenarioConfig& cfg);

/// Continuous-time falling-body vector field.
StateVector reentry_derivative(const StateVector& x, double gamma);

/// Advances the reentry state by dt with `substeps` RK4 steps.
StateVector propagate_state(const StateVector& x, double dt, double gamma, int substeps = 1);

/// Exact Jacobian of propagate_state with respect to x.
Matrix3 process_jacobian(const StateVector& x, double dt, double gamma, int substeps = 1);

Measurement measure(const StateVector& x, const ScenarioConfig& cfg);
Matrix23 measurement_jacobian(const StateVector& x, const ScenarioConfig& cfg);

/// Dynamics and observation dispatch on cfg.dynamics.
StateVector transition(const StateVector& x, const ScenarioConfig& cfg);
Matrix3 transition_jacobian(const StateVector& x, const ScenarioConfig& cfg);

struct TruthSample {
  StateVector state;
  Measurement measurement;  // noise free
};

/// Ground truth for steps 1..cfg.steps. Process noise (cfg.process_noise)
/// is drawn from `noise`; three normals are consumed per step regardless.
std::vector<TruthSample> simulate_trajectory(const ScenarioConfig& cfg, NoiseSource& noise);

/// Symmetric square root S with S*S^T = P for a PSD matrix (eigen-based).
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& p);

}  // namespace cogradar
