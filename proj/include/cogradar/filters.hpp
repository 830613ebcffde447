#pragma once

// Gaussian-assumed Bayesian filters (EKF, UKF, CKF) sharing one
// predict/update interface. Everything here is templated on the scalar type
// and works on dynamically sized Eigen vectors.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cogradar/errors.hpp"

namespace cogradar {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
struct GaussianBelief {
  VectorX<Scalar> mean;
  MatrixX<Scalar> cov;

  Eigen::Index dim() const { return mean.size(); }
};

enum class FilterType { EKF, UKF, CKF };

struct UkfParams {
  double alpha = 1.0;
  double beta = 2.0;
  double kappa = 0.0;
};

struct FilterKind {
  FilterType type = FilterType::CKF;
  UkfParams ukf{};
};

inline const char* to_string(FilterType t) {
  switch (t) {
    case FilterType::EKF: return "ekf";
    case FilterType::UKF: return "ukf";
    case FilterType::CKF: return "ckf";
  }
  return "?";
}

/// Quadrature nodes stored column-wise.
template <typename Scalar>
struct SigmaPointSet {
  MatrixX<Scalar> points;
  VectorX<Scalar> mean_weights;
  VectorX<Scalar> cov_weights;

  Eigen::Index size() const { return points.cols(); }
};

/// Nonlinear map with an optional Jacobian (required by the EKF only).
template <typename Scalar>
struct VectorFunction {
  std::function<VectorX<Scalar>(const VectorX<Scalar>&)> map;
  std::function<MatrixX<Scalar>(const VectorX<Scalar>&)> jacobian;
};

/// Noise-free predicted measurement statistics for a belief. Independent of
/// the measurement noise and of the realized measurement.
template <typename Scalar>
struct MeasurementPrediction {
  VectorX<Scalar> mean;
  MatrixX<Scalar> cov;    // Pzz without R
  MatrixX<Scalar> cross;  // Pxz
};

namespace detail {

inline constexpr const char* kFilterModule = "filters";

template <typename Derived>
void symmetrize(Eigen::MatrixBase<Derived>& p) {
  p = (0.5 * (p + p.transpose())).eval();
}

template <typename Scalar>
void require_positive_definite(const MatrixX<Scalar>& p, const char* where) {
  if (!p.allFinite() || p.llt().info() != Eigen::Success) {
    throw NumericalDegeneracyError(kFilterModule,
                                   std::string(where) + ": covariance is not positive definite");
  }
}

template <typename Scalar>
void validate_ukf(const UkfParams& p) {
  if (!(p.alpha > 0.0 && p.alpha <= 1.0)) {
    throw InputError(kFilterModule, "ukf alpha must lie in (0, 1]");
  }
  if (!(p.kappa >= 0.0)) throw InputError(kFilterModule, "ukf kappa must be >= 0");
}

}  // namespace detail

/// Lower Cholesky factor of P. One retry with 1e-9 * trace(P) / n jitter.
template <typename Scalar>
MatrixX<Scalar> covariance_sqrt(const MatrixX<Scalar>& p) {
  Eigen::LLT<MatrixX<Scalar>> llt(p);
  if (llt.info() == Eigen::Success && p.allFinite()) return llt.matrixL();
  const Eigen::Index n = p.rows();
  const Scalar jitter = Scalar(1e-9) * p.trace() / Scalar(n);
  MatrixX<Scalar> jittered = p;
  jittered.diagonal().array() += jitter;
  llt.compute(jittered);
  if (llt.info() != Eigen::Success || !jittered.allFinite()) {
    throw NumericalDegeneracyError(detail::kFilterModule, "covariance factorization failed");
  }
  return llt.matrixL();
}

/// Third-degree spherical-radial rule: mean +/- sqrt(n) * L.col(i), weights 1/(2n).
template <typename Scalar>
SigmaPointSet<Scalar> cubature_points(const GaussianBelief<Scalar>& belief) {
  const Eigen::Index n = belief.dim();
  const MatrixX<Scalar> scaled = std::sqrt(Scalar(n)) * covariance_sqrt<Scalar>(belief.cov);
  SigmaPointSet<Scalar> set;
  set.points.resize(n, 2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    set.points.col(i) = belief.mean + scaled.col(i);
    set.points.col(n + i) = belief.mean - scaled.col(i);
  }
  set.mean_weights = VectorX<Scalar>::Constant(2 * n, Scalar(1) / Scalar(2 * n));
  set.cov_weights = set.mean_weights;
  return set;
}

/// Scaled unscented transform: 2n+1 points with lambda = alpha^2 (n + kappa) - n.
template <typename Scalar>
SigmaPointSet<Scalar> unscented_points(const GaussianBelief<Scalar>& belief, const UkfParams& params) {
  detail::validate_ukf<Scalar>(params);
  const Eigen::Index n = belief.dim();
  const Scalar alpha = params.alpha, beta = params.beta, kappa = params.kappa;
  const Scalar lambda = alpha * alpha * (Scalar(n) + kappa) - Scalar(n);
  const Scalar spread = Scalar(n) + lambda;
  const MatrixX<Scalar> scaled = std::sqrt(spread) * covariance_sqrt<Scalar>(belief.cov);

  SigmaPointSet<Scalar> set;
  set.points.resize(n, 2 * n + 1);
  set.points.col(0) = belief.mean;
  for (Eigen::Index i = 0; i < n; ++i) {
    set.points.col(1 + i) = belief.mean + scaled.col(i);
    set.points.col(1 + n + i) = belief.mean - scaled.col(i);
  }
  set.mean_weights = VectorX<Scalar>::Constant(2 * n + 1, Scalar(1) / (Scalar(2) * spread));
  set.cov_weights = set.mean_weights;
  set.mean_weights(0) = lambda / spread;
  set.cov_weights(0) = lambda / spread + (Scalar(1) - alpha * alpha + beta);
  return set;
}

template <typename Scalar>
SigmaPointSet<Scalar> sigma_points(const GaussianBelief<Scalar>& belief, const FilterKind& kind) {
  return kind.type == FilterType::UKF ? unscented_points(belief, kind.ukf) : cubature_points(belief);
}

/// Weighted sample mean and covariance of point columns.
template <typename Scalar>
GaussianBelief<Scalar> weighted_moments(const MatrixX<Scalar>& points, const VectorX<Scalar>& mean_weights,
                                        const VectorX<Scalar>& cov_weights) {
  GaussianBelief<Scalar> out;
  out.mean = points * mean_weights;
  const MatrixX<Scalar> centered = points.colwise() - out.mean;
  out.cov = centered * cov_weights.asDiagonal() * centered.transpose();
  return out;
}

template <typename Scalar>
GaussianBelief<Scalar> predict(const GaussianBelief<Scalar>& belief, const FilterKind& kind,
                               const VectorFunction<Scalar>& dynamics, const MatrixX<Scalar>& process_noise) {
  if (process_noise.rows() != belief.dim() || process_noise.cols() != belief.dim()) {
    throw InputError(detail::kFilterModule, "predict: process noise dimension mismatch");
  }
  GaussianBelief<Scalar> out;
  if (kind.type == FilterType::EKF) {
    if (!dynamics.jacobian) throw InputError(detail::kFilterModule, "EKF requires a dynamics Jacobian");
    const MatrixX<Scalar> f = dynamics.jacobian(belief.mean);
    out.mean = dynamics.map(belief.mean);
    out.cov = f * belief.cov * f.transpose() + process_noise;
  } else {
    const SigmaPointSet<Scalar> set = sigma_points(belief, kind);
    MatrixX<Scalar> mapped(belief.dim(), set.size());
    for (Eigen::Index i = 0; i < set.size(); ++i) mapped.col(i) = dynamics.map(set.points.col(i));
    out = weighted_moments<Scalar>(mapped, set.mean_weights, set.cov_weights);
    out.cov += process_noise;
  }
  detail::symmetrize(out.cov);
  detail::require_positive_definite<Scalar>(out.cov, "predict");
  return out;
}

template <typename Scalar>
MeasurementPrediction<Scalar> predict_measurement(const GaussianBelief<Scalar>& belief, const FilterKind& kind,
                                                  const VectorFunction<Scalar>& observation) {
  MeasurementPrediction<Scalar> out;
  if (kind.type == FilterType::EKF) {
    if (!observation.jacobian) {
      throw InputError(detail::kFilterModule, "EKF requires a measurement Jacobian");
    }
    const MatrixX<Scalar> h = observation.jacobian(belief.mean);
    out.mean = observation.map(belief.mean);
    out.cross = belief.cov * h.transpose();
    out.cov = h * out.cross;
  } else {
    const SigmaPointSet<Scalar> set = sigma_points(belief, kind);
    const VectorX<Scalar> first = observation.map(set.points.col(0));
    MatrixX<Scalar> mapped(first.size(), set.size());
    mapped.col(0) = first;
    for (Eigen::Index i = 1; i < set.size(); ++i) mapped.col(i) = observation.map(set.points.col(i));
    out.mean = mapped * set.mean_weights;
    const MatrixX<Scalar> dz = mapped.colwise() - out.mean;
    const MatrixX<Scalar> dx = set.points.colwise() - belief.mean;
    out.cov = dz * set.cov_weights.asDiagonal() * dz.transpose();
    out.cross = dx * set.cov_weights.asDiagonal() * dz.transpose();
  }
  return out;
}

/// Kalman update from precomputed measurement statistics. The posterior
/// covariance does not depend on `z`.
template <typename Scalar>
GaussianBelief<Scalar> update(const GaussianBelief<Scalar>& belief, const MeasurementPrediction<Scalar>& pred,
                              const VectorX<Scalar>& z, const MatrixX<Scalar>& meas_noise) {
  MatrixX<Scalar> s = pred.cov + meas_noise;
  detail::symmetrize(s);
  Eigen::LLT<MatrixX<Scalar>> llt(s);
  if (llt.info() != Eigen::Success || !s.allFinite()) {
    throw NumericalDegeneracyError(detail::kFilterModule, "update: innovation covariance is not invertible");
  }
  // K = Pxz S^-1, computed as (S^-1 Pxz^T)^T.
  const MatrixX<Scalar> gain = llt.solve(pred.cross.transpose()).transpose();
  GaussianBelief<Scalar> out;
  out.mean = belief.mean + gain * (z - pred.mean);
  out.cov = belief.cov - gain * pred.cross.transpose();
  detail::symmetrize(out.cov);
  detail::require_positive_definite<Scalar>(out.cov, "update");
  return out;
}

template <typename Scalar>
GaussianBelief<Scalar> update(const GaussianBelief<Scalar>& belief, const VectorX<Scalar>& z, const FilterKind& kind,
                              const VectorFunction<Scalar>& observation, const MatrixX<Scalar>& meas_noise) {
  if (meas_noise.rows() != z.size() || meas_noise.cols() != z.size()) {
    throw InputError(detail::kFilterModule, "update: measurement noise dimension mismatch");
  }
  return update(belief, predict_measurement(belief, kind, observation), z, meas_noise);
}

/// Runs update(predict(.)) over aligned measurement / noise sequences.
template <typename Scalar>
std::vector<GaussianBelief<Scalar>> run_filter(const FilterKind& kind, const GaussianBelief<Scalar>& belief0,
                                               const std::vector<VectorX<Scalar>>& measurements,
                                               const std::vector<MatrixX<Scalar>>& noise_covs,
                                               const VectorFunction<Scalar>& dynamics,
                                               const MatrixX<Scalar>& process_noise,
                                               const VectorFunction<Scalar>& observation) {
  if (measurements.size() != noise_covs.size()) {
    throw AlignmentError(detail::kFilterModule, "run_filter: measurement and noise sequences differ in length");
  }
  std::vector<GaussianBelief<Scalar>> out;
  out.reserve(measurements.size());
  GaussianBelief<Scalar> current = belief0;
  for (std::size_t k = 0; k < measurements.size(); ++k) {
    try {
      current = update(predict(current, kind, dynamics, process_noise), measurements[k], kind, observation,
                       noise_covs[k]);
    } catch (const NumericalDegeneracyError& e) {
      throw NumericalDegeneracyError(detail::kFilterModule,
                                     std::string(e.what()) + " (step " + std::to_string(k + 1) + ")");
    }
    out.push_back(current);
  }
  return out;
}

}  // namespace cogradar
