#pragma once

// Spectrum sensing and probabilistic ICA for the noisy linear latent model
//   x_i = A s_i + mu + eta_i,   eta_i ~ N(0, sigma^2 I).
// Columns of a data matrix are observations, rows are channels.

#include <istream>

#include <Eigen/Dense>

namespace cogradar::pica {

/// One-sided averaged periodogram over non-overlapping rectangular segments.
/// Bin k of a length-L segment has power c_k |X_k|^2 / L^2 with c_k = 1 at
/// DC (and Nyquist for even L) and 2 elsewhere, so a single full-length
/// segment sums to the mean square of the signal. Trailing samples that do
/// not fill a segment are dropped. Returns L/2 + 1 bins.
Eigen::VectorXd power_spectrum(const Eigen::Ref<const Eigen::VectorXd>& signal, Eigen::Index segment_length);

struct Demeaned {
  Eigen::MatrixXd data;
  Eigen::VectorXd mean;
};

Demeaned demean(const Eigen::Ref<const Eigen::MatrixXd>& data);

/// Scales each row to unit (1/N) sample variance.
Eigen::MatrixXd variance_normalize(const Eigen::Ref<const Eigen::MatrixXd>& data);

struct PicaModel {
  Eigen::MatrixXd mixing;      // p x q
  double noise_var = 0.0;
  Eigen::VectorXd mean;        // p
  int latent_dim = 0;
  Eigen::MatrixXd unmixing;    // q x p, (A^T A)^-1 A^T
  Eigen::VectorXd eigenvalues; // sample-covariance spectrum, descending
};

/// Maximum-likelihood fit with the rotation fixed to identity:
///   sigma^2 = mean of the p - q smallest eigenvalues,
///   A = U_q (Lambda_q - sigma^2 I)^(1/2).
/// The sample covariance uses 1/N normalization.
PicaModel fit(const Eigen::Ref<const Eigen::MatrixXd>& data, int latent_dim);

/// Least-squares sources (q x N) for data with the model's channel count.
Eigen::MatrixXd estimate_sources(const PicaModel& model, const Eigen::Ref<const Eigen::MatrixXd>& data);

/// Reads a channels x samples matrix: one comma-separated channel per line.
/// Blank lines and lines starting with '#' are skipped.
Eigen::MatrixXd read_matrix(std::istream& in);

}  // namespace cogradar::pica
