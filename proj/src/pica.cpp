#include "cogradar/pica.hpp"

#include <cmath>
#include <complex>
#include <sstream>
#include <string>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "cogradar/errors.hpp"

namespace cogradar::pica {
namespace {

constexpr const char* kModule = "pica";

}  // namespace

Eigen::VectorXd power_spectrum(const Eigen::Ref<const Eigen::VectorXd>& signal, Eigen::Index segment_length) {
  const Eigen::Index n = signal.size();
  if (n == 0) throw InputError(kModule, "power_spectrum: empty signal");
  if (segment_length < 1 || segment_length > n) {
    throw InputError(kModule, "power_spectrum: segment length must lie in [1, signal length]");
  }
  const Eigen::Index len = segment_length;
  const Eigen::Index bins = len / 2 + 1;
  const Eigen::Index segments = n / len;

  Eigen::FFT<double> fft;
  Eigen::VectorXd power = Eigen::VectorXd::Zero(bins);
  std::vector<double> segment(static_cast<std::size_t>(len));
  std::vector<std::complex<double>> spectrum;
  for (Eigen::Index s = 0; s < segments; ++s) {
    for (Eigen::Index t = 0; t < len; ++t) segment[t] = signal(s * len + t);
    fft.fwd(spectrum, segment);
    for (Eigen::Index k = 0; k < bins; ++k) {
      const bool edge = k == 0 || (len % 2 == 0 && k == len / 2);
      power(k) += (edge ? 1.0 : 2.0) * std::norm(spectrum[k]);
    }
  }
  return power / (static_cast<double>(len) * static_cast<double>(len) * static_cast<double>(segments));
}

Demeaned demean(const Eigen::Ref<const Eigen::MatrixXd>& data) {
  if (data.cols() < 1) throw InputError(kModule, "demean: need at least one observation");
  Demeaned out;
  out.mean = data.rowwise().mean();
  out.data = data.colwise() - out.mean;
  return out;
}

Eigen::MatrixXd variance_normalize(const Eigen::Ref<const Eigen::MatrixXd>& data) {
  if (data.cols() < 1) throw InputError(kModule, "variance_normalize: need at least one observation");
  Eigen::MatrixXd out = data;
  const Eigen::VectorXd mean = data.rowwise().mean();
  for (Eigen::Index r = 0; r < data.rows(); ++r) {
    const double var = (data.row(r).array() - mean(r)).square().mean();
    if (!(var > 0.0)) {
      throw DegenerateChannelError(kModule, "variance_normalize: row " + std::to_string(r) + " has zero variance", r);
    }
    out.row(r) /= std::sqrt(var);
  }
  return out;
}

PicaModel fit(const Eigen::Ref<const Eigen::MatrixXd>& data, int latent_dim) {
  const Eigen::Index p = data.rows(), n = data.cols();
  if (p < 1 || n < p) throw InputError(kModule, "fit: need p >= 1 channels and N >= p observations");
  if (latent_dim < 1 || latent_dim >= p) {
    throw InputError(kModule, "fit: latent dimension q must satisfy 1 <= q < p (noise variance averages the p - q "
                              "smallest eigenvalues)");
  }
  const int q = latent_dim;
  const Demeaned centered = demean(data);
  const Eigen::MatrixXd cov = centered.data * centered.data.transpose() / static_cast<double>(n);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  if (es.info() != Eigen::Success) throw NumericalDegeneracyError(kModule, "fit: eigendecomposition failed");
  // Ascending from Eigen; flip to descending.
  const Eigen::VectorXd evals = es.eigenvalues().reverse();
  const Eigen::MatrixXd evecs = es.eigenvectors().rowwise().reverse();

  PicaModel model;
  model.latent_dim = q;
  model.mean = centered.mean;
  model.eigenvalues = evals;
  model.noise_var = std::max(0.0, evals.tail(p - q).mean());
  // Gaps at round-off level of the leading eigenvalue count as no gap.
  if (!(evals(q - 1) - model.noise_var > 1e-12 * std::max(evals(0), 0.0))) {
    throw RankDeficiencyError(kModule, "fit: eigenvalue " + std::to_string(q) +
                                           " does not exceed the noise floor; extract fewer sources");
  }
  const Eigen::VectorXd scale = (evals.head(q).array() - model.noise_var).sqrt();
  model.mixing = evecs.leftCols(q) * scale.asDiagonal();
  const Eigen::MatrixXd gram = model.mixing.transpose() * model.mixing;
  model.unmixing = gram.ldlt().solve(model.mixing.transpose());
  return model;
}

Eigen::MatrixXd estimate_sources(const PicaModel& model, const Eigen::Ref<const Eigen::MatrixXd>& data) {
  if (data.rows() != model.mean.size() || model.unmixing.cols() != data.rows()) {
    throw InputError(kModule, "estimate_sources: data has " + std::to_string(data.rows()) +
                                  " channels, model expects " + std::to_string(model.mean.size()));
  }
  return model.unmixing * (data.colwise() - model.mean);
}

Eigen::MatrixXd read_matrix(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      std::size_t used = 0;
      double value = 0.0;
      try {
        value = std::stod(cell, &used);
      } catch (const std::exception&) {
        throw InputError(kModule, "matrix line " + std::to_string(line_no) + ": bad number '" + cell + "'");
      }
      if (cell.find_first_not_of(" \t\r", used) != std::string::npos) {
        throw InputError(kModule, "matrix line " + std::to_string(line_no) + ": bad number '" + cell + "'");
      }
      row.push_back(value);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw InputError(kModule, "matrix line " + std::to_string(line_no) + ": ragged row");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty() || rows.front().empty()) throw InputError(kModule, "matrix input is empty");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
  }
  return m;
}

}  // namespace cogradar::pica
