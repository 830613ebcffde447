#include "cogradar/models.hpp"

#include <cmath>
#include <string>

#include "cogradar/errors.hpp"

namespace cogradar {
namespace {

constexpr const char* kModule = "models";

void require_finite(const StateVector& x, const char* what) {
  if (!x.allFinite()) {
    throw InvalidStateError(kModule, std::string(what) + ": non-finite state");
  }
}

bool is_symmetric(const Eigen::MatrixXd& m) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale;
}

Matrix3 derivative_jacobian(const StateVector& x, double gamma) {
  const double h = x(kAltitude), v = x(kVelocity), b = x(kBallistic);
  const double rho = std::exp(-gamma * h);
  Matrix3 j = Matrix3::Zero();
  j(kAltitude, kVelocity) = -1.0;
  j(kVelocity, kAltitude) = gamma * rho * v * v * b;
  j(kVelocity, kVelocity) = -2.0 * rho * v * b;
  j(kVelocity, kBallistic) = -rho * v * v;
  return j;
}

// One RK4 step; optionally accumulates the step's sensitivity matrix.
StateVector rk4_step(const StateVector& x, double h, double gamma, Matrix3* phi) {
  const StateVector k1 = reentry_derivative(x, gamma);
  const StateVector x2 = x + 0.5 * h * k1;
  const StateVector k2 = reentry_derivative(x2, gamma);
  const StateVector x3 = x + 0.5 * h * k2;
  const StateVector k3 = reentry_derivative(x3, gamma);
  const StateVector x4 = x + h * k3;
  const StateVector k4 = reentry_derivative(x4, gamma);

  if (phi != nullptr) {
    const Matrix3 eye = Matrix3::Identity();
    const Matrix3 j1 = derivative_jacobian(x, gamma);
    const Matrix3 j2 = derivative_jacobian(x2, gamma) * (eye + 0.5 * h * j1);
    const Matrix3 j3 = derivative_jacobian(x3, gamma) * (eye + 0.5 * h * j2);
    const Matrix3 j4 = derivative_jacobian(x4, gamma) * (eye + h * j3);
    *phi = eye + (h / 6.0) * (j1 + 2.0 * j2 + 2.0 * j3 + j4);
  }
  StateVector out = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  out(kBallistic) = x(kBallistic);
  return out;
}

}  // namespace

void validate(const ScenarioConfig& cfg) {
  auto fail = [](const std::string& field, const std::string& why) {
    throw ConfigError("config", "invalid " + field + ": " + why);
  };
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) fail("scenario.dt", "must be > 0");
  if (cfg.steps < 0) fail("scenario.steps", "must be >= 0");
  if (cfg.substeps < 1) fail("scenario.substeps", "must be >= 1");
  if (!(cfg.snr > 0.0) || !std::isfinite(cfg.snr)) fail("scenario.snr", "must be > 0");
  if (!(cfg.carrier_freq > 0.0) || !std::isfinite(cfg.carrier_freq)) {
    fail("scenario.carrier_freq", "must be > 0");
  }
  if (!std::isfinite(cfg.gamma) || cfg.gamma < 0.0) fail("scenario.gamma", "must be finite and >= 0");
  if (!(cfg.radar_horizontal > 0.0)) fail("scenario.radar_horizontal", "must be > 0");
  if (!std::isfinite(cfg.radar_altitude)) fail("scenario.radar_altitude", "must be finite");
  if (!(cfg.reference_range > 0.0)) fail("scenario.reference_range", "must be > 0");
  if (!cfg.x0_true.allFinite()) fail("scenario.x0_true", "must be finite");
  if (!cfg.x0_est_mean.allFinite()) fail("scenario.x0_est_mean", "must be finite");

  if (!is_symmetric(cfg.x0_est_cov) || cfg.x0_est_cov.llt().info() != Eigen::Success) {
    fail("scenario.x0_est_cov", "must be symmetric positive definite");
  }
  auto check_psd = [&](const Matrix3& q, const char* name) {
    if (!q.allFinite() || !is_symmetric(q)) fail(name, "must be symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix3> es(q);
    const double tol = 1e-12 * std::max(1.0, q.cwiseAbs().maxCoeff());
    if (es.eigenvalues().minCoeff() < -tol) fail(name, "must be positive semidefinite");
  };
  check_psd(cfg.process_noise, "scenario.process_noise");
  check_psd(cfg.filter_process_noise, "scenario.filter_process_noise");
  if (cfg.dynamics == DynamicsKind::Reentry && cfg.x0_true(kBallistic) < 0.0) {
    fail("scenario.x0_true", "ballistic coefficient must be >= 0");
  }
  if (cfg.dynamics == DynamicsKind::Linear && cfg.range_dependent_snr) {
    fail("scenario.range_dependent_snr", "requires reentry dynamics");
  }
}

StateVector reentry_derivative(const StateVector& x, double gamma) {
  const double h = x(kAltitude), v = x(kVelocity), b = x(kBallistic);
  return {-v, -std::exp(-gamma * h) * v * v * b, 0.0};
}

StateVector propagate_state(const StateVector& x, double dt, double gamma, int substeps) {
  require_finite(x, "propagate_state");
  if (!(dt > 0.0)) throw InvalidStateError(kModule, "propagate_state: dt must be > 0");
  const double h = dt / substeps;
  StateVector out = x;
  for (int s = 0; s < substeps; ++s) out = rk4_step(out, h, gamma, nullptr);
  return out;
}

Matrix3 process_jacobian(const StateVector& x, double dt, double gamma, int substeps) {
  require_finite(x, "process_jacobian");
  const double h = dt / substeps;
  Matrix3 total = Matrix3::Identity();
  Matrix3 step;
  StateVector cur = x;
  for (int s = 0; s < substeps; ++s) {
    cur = rk4_step(cur, h, gamma, &step);
    total = step * total;
  }
  return total;
}

Measurement measure(const StateVector& x, const ScenarioConfig& cfg) {
  require_finite(x, "measure");
  if (cfg.dynamics == DynamicsKind::Linear) return cfg.linear_observation * x;
  const double dh = x(kAltitude) - cfg.radar_altitude;
  const double r = std::hypot(cfg.radar_horizontal, dh);
  return {r, -dh * x(kVelocity) / r};
}

Matrix23 measurement_jacobian(const StateVector& x, const ScenarioConfig& cfg) {
  require_finite(x, "measurement_jacobian");
  if (cfg.dynamics == DynamicsKind::Linear) return cfg.linear_observation;
  const double m = cfg.radar_horizontal;
  const double dh = x(kAltitude) - cfg.radar_altitude;
  const double v = x(kVelocity);
  const double r = std::hypot(m, dh);
  Matrix23 j = Matrix23::Zero();
  j(kRange, kAltitude) = dh / r;
  j(kRangeRate, kAltitude) = -v * m * m / (r * r * r);
  j(kRangeRate, kVelocity) = -dh / r;
  return j;
}

StateVector transition(const StateVector& x, const ScenarioConfig& cfg) {
  if (cfg.dynamics == DynamicsKind::Linear) {
    require_finite(x, "transition");
    return cfg.linear_transition * x;
  }
  return propagate_state(x, cfg.dt, cfg.gamma, cfg.substeps);
}

Matrix3 transition_jacobian(const StateVector& x, const ScenarioConfig& cfg) {
  if (cfg.dynamics == DynamicsKind::Linear) return cfg.linear_transition;
  return process_jacobian(x, cfg.dt, cfg.gamma, cfg.substeps);
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& p) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(p);
  const Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
}

std::vector<TruthSample> simulate_trajectory(const ScenarioConfig& cfg, NoiseSource& noise) {
  validate(cfg);
  std::vector<TruthSample> out;
  out.reserve(static_cast<std::size_t>(cfg.steps));
  const Matrix3 q_root = psd_sqrt(cfg.process_noise);
  std::normal_distribution<double> normal(0.0, 1.0);

  StateVector x = cfg.x0_true;
  for (long k = 1; k <= cfg.steps; ++k) {
    StateVector next;
    try {
      next = transition(x, cfg);
    } catch (const InvalidStateError&) {
      throw SimulationDivergedError(kModule, "trajectory propagation produced a non-finite state", k);
    }
    StateVector w;
    for (Eigen::Index i = 0; i < 3; ++i) w(i) = normal(noise);
    x = next + q_root * w;
    if (!x.allFinite()) {
      throw SimulationDivergedError(kModule, "trajectory propagation produced a non-finite state", k);
    }
    out.push_back({x, measure(x, cfg)});
  }
  return out;
}

}  // namespace cogradar
