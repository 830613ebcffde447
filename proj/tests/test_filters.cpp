#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cogradar/filters.hpp"
#include "cogradar/metrics.hpp"
#include "cogradar/pac.hpp"

using namespace cogradar;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

const FilterKind kEkf{FilterType::EKF, {}};
const FilterKind kUkf{FilterType::UKF, {}};
const FilterKind kCkf{FilterType::CKF, {}};

MatrixXd random_spd(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = g(rng);
  return a * a.transpose() + 0.5 * MatrixXd::Identity(n, n);
}

MatrixXd random_matrix(int r, int c, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  MatrixXd a(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) a(i, j) = g(rng);
  return a;
}

VectorXd random_vector(int n, std::mt19937_64& rng) { return random_matrix(n, 1, rng); }

VectorFunction<double> affine(const MatrixXd& a, const VectorXd& b) {
  return {[a, b](const VectorXd& x) -> VectorXd { return a * x + b; },
          [a](const VectorXd&) -> MatrixXd { return a; }};
}

double rel(const MatrixXd& a, const MatrixXd& b) { return (a - b).norm() / std::max(b.norm(), 1e-300); }

}  // namespace

TEST(CubaturePoints, UnitCovariance) {
  const GaussianBelief<double> b{VectorXd::Zero(2), MatrixXd::Identity(2, 2)};
  const auto set = cubature_points(b);
  ASSERT_EQ(set.size(), 4);
  const double r = std::sqrt(2.0);
  EXPECT_NEAR(set.points(0, 0), r, 1e-15);
  EXPECT_NEAR(set.points(1, 1), r, 1e-15);
  EXPECT_NEAR(set.points(0, 2), -r, 1e-15);
  EXPECT_NEAR(set.points(1, 3), -r, 1e-15);
  for (int i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(set.mean_weights(i), 0.25);
}

TEST(CubaturePoints, MomentMatching) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 50; ++t) {
    const GaussianBelief<double> b{random_vector(3, rng), random_spd(3, rng)};
    const auto set = cubature_points(b);
    EXPECT_NEAR(set.mean_weights.sum(), 1.0, 1e-12);
    const auto m = weighted_moments<double>(set.points, set.mean_weights, set.cov_weights);
    EXPECT_LT((m.mean - b.mean).norm(), 1e-12 * std::max(1.0, b.mean.norm()));
    EXPECT_LT(rel(m.cov, b.cov), 1e-12);
  }
}

TEST(UnscentedPoints, ScalarExample) {
  const GaussianBelief<double> b{VectorXd::Zero(1), MatrixXd::Identity(1, 1)};
  const auto set = unscented_points(b, UkfParams{1.0, 2.0, 2.0});
  ASSERT_EQ(set.size(), 3);
  EXPECT_EQ(set.points(0, 0), 0.0);
  EXPECT_NEAR(set.points(0, 1), std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(set.points(0, 2), -std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(set.mean_weights(0), 2.0 / 3.0, 1e-15);
}

TEST(UnscentedPoints, MomentMatching) {
  std::mt19937_64 rng(2);
  for (const UkfParams p : {UkfParams{}, UkfParams{0.5, 2.0, 1.0}, UkfParams{0.1, 2.0, 0.0}}) {
    for (int t = 0; t < 30; ++t) {
      const GaussianBelief<double> b{random_vector(3, rng), random_spd(3, rng)};
      const auto set = unscented_points(b, p);
      EXPECT_NEAR(set.mean_weights.sum(), 1.0, 1e-12);
      const auto m = weighted_moments<double>(set.points, set.mean_weights, set.cov_weights);
      // Small alpha means weights of order 1/alpha^2 and proportional round-off.
      const double tol = p.alpha == 1.0 ? 1e-12 : 1e-10;
      EXPECT_LT((m.mean - b.mean).norm(), tol * std::max(1.0, b.mean.norm()));
      // The beta term only touches the center point, which sits at the mean.
      EXPECT_LT(rel(m.cov, b.cov), tol);
    }
  }
}

TEST(UnscentedPoints, ParameterValidation) {
  const GaussianBelief<double> b{VectorXd::Zero(2), MatrixXd::Identity(2, 2)};
  EXPECT_THROW(unscented_points(b, UkfParams{0.0, 2.0, 0.0}), InputError);
  EXPECT_THROW(unscented_points(b, UkfParams{1.5, 2.0, 0.0}), InputError);
  EXPECT_THROW(unscented_points(b, UkfParams{1.0, 2.0, -1.0}), InputError);
}

TEST(CovarianceSqrt, JitterAndFailure) {
  MatrixXd p(2, 2);
  p << 1, 1, 1, 1;  // PSD, singular: recovered by the jitter retry
  const MatrixXd l = covariance_sqrt<double>(p);
  EXPECT_LT((l * l.transpose() - p).norm(), 1e-8);
  p << 1, 2, 2, 1;
  EXPECT_THROW(covariance_sqrt<double>(p), NumericalDegeneracyError);
}

TEST(Predict, AffineExactForAllKinds) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 50; ++t) {
    const int n = 1 + t % 4;
    const MatrixXd f = random_matrix(n, n, rng), q = random_spd(n, rng);
    const VectorXd c = random_vector(n, rng);
    const GaussianBelief<double> b{random_vector(n, rng), random_spd(n, rng)};
    const VectorXd mean = f * b.mean + c;
    const MatrixXd cov = f * b.cov * f.transpose() + q;
    for (const FilterKind& k : {kEkf, kUkf, kCkf}) {
      const auto out = predict(b, k, affine(f, c), q);
      EXPECT_LT((out.mean - mean).norm(), 1e-9 * std::max(1.0, mean.norm()));
      EXPECT_LT(rel(out.cov, cov), 1e-9);
      EXPECT_EQ(out.cov, out.cov.transpose());
    }
  }
}

TEST(Predict, IdentityWithoutNoiseIsNoop) {
  std::mt19937_64 rng(4);
  const GaussianBelief<double> b{random_vector(3, rng), random_spd(3, rng)};
  for (const FilterKind& k : {kEkf, kUkf, kCkf}) {
    const auto out = predict(b, k, affine(MatrixXd::Identity(3, 3), VectorXd::Zero(3)), MatrixXd(MatrixXd::Zero(3, 3)));
    EXPECT_LT((out.mean - b.mean).norm(), 1e-12 * b.mean.norm());
    EXPECT_LT(rel(out.cov, b.cov), 1e-12);
  }
}

TEST(Predict, ReentryMatchesMonteCarloMoments) {
  ScenarioConfig cfg;
  const TrackingModel model = make_tracking_model(cfg);
  // A state where drag is active, so the map is genuinely nonlinear.
  const GaussianBelief<double> b{Eigen::Vector3d(9e4, 1.6e4, 1e-3),
                                 Eigen::Vector3d(1e6, 4e6, 1e-8).asDiagonal().toDenseMatrix()};
  const MatrixXd zero = MatrixXd::Zero(3, 3);

  const int n = 100000;
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  const MatrixXd l = b.cov.llt().matrixL();
  Eigen::MatrixXd samples(3, n);
  for (int i = 0; i < n; ++i) {
    const VectorXd e = Eigen::Vector3d(g(rng), g(rng), g(rng));
    samples.col(i) = model.dynamics.map(b.mean + l * e);
  }
  const VectorXd mc_mean = samples.rowwise().mean();
  const MatrixXd centered = samples.colwise() - mc_mean;
  const VectorXd mc_std = (centered.array().square().rowwise().sum() / (n - 1)).sqrt();

  for (const FilterKind& k : {kUkf, kCkf}) {
    const auto out = predict(b, k, model.dynamics, zero);
    for (int i = 0; i < 2; ++i) {
      // 3 sigma of the Monte Carlo estimate of the mean
      EXPECT_LT(std::abs(out.mean(i) - mc_mean(i)), 3.0 * mc_std(i) / std::sqrt(double(n))) << to_string(k.type);
    }
  }
}

TEST(Update, ScalarConjugate) {
  const GaussianBelief<double> prior{VectorXd::Zero(1), MatrixXd::Identity(1, 1)};
  const auto h = affine(MatrixXd::Identity(1, 1), VectorXd::Zero(1));
  for (const FilterKind& k : {kEkf, kUkf, kCkf}) {
    const auto post = update(prior, VectorXd(VectorXd::Constant(1, 2.0)), k, h, MatrixXd(MatrixXd::Identity(1, 1)));
    EXPECT_NEAR(post.mean(0), 1.0, 1e-12);
    EXPECT_NEAR(post.cov(0, 0), 0.5, 1e-12);
  }
}

TEST(Update, UninformativeMeasurement) {
  std::mt19937_64 rng(6);
  const GaussianBelief<double> prior{random_vector(3, rng), random_spd(3, rng)};
  const auto h = affine(random_matrix(2, 3, rng), VectorXd::Zero(2));
  for (const FilterKind& k : {kEkf, kUkf, kCkf}) {
    const auto post = update(prior, random_vector(2, rng), k, h, MatrixXd(1e12 * MatrixXd::Identity(2, 2)));
    EXPECT_LT((post.mean - prior.mean).norm(), 1e-6 * prior.mean.norm());
    EXPECT_LT(rel(post.cov, prior.cov), 1e-6);
  }
}

TEST(Update, LinearMatchesKalman) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 50; ++t) {
    const int n = 2 + t % 3;
    const GaussianBelief<double> prior{random_vector(n, rng), random_spd(n, rng)};
    const MatrixXd hm = random_matrix(2, n, rng), r = random_spd(2, rng);
    const VectorXd z = random_vector(2, rng);
    const MatrixXd s = hm * prior.cov * hm.transpose() + r;
    const MatrixXd gain = prior.cov * hm.transpose() * s.inverse();
    const VectorXd mean = prior.mean + gain * (z - hm * prior.mean);
    const MatrixXd cov = (MatrixXd::Identity(n, n) - gain * hm) * prior.cov;
    for (const FilterKind& k : {kEkf, kUkf, kCkf}) {
      const auto post = update(prior, z, k, affine(hm, VectorXd::Zero(2)), r);
      EXPECT_LT((post.mean - mean).norm(), 1e-9 * std::max(1.0, mean.norm()));
      EXPECT_LT(rel(post.cov, cov), 1e-9);
    }
  }
}

TEST(Update, PosteriorShrinksAndIgnoresRealization) {
  ScenarioConfig cfg;
  const TrackingModel model = make_tracking_model(cfg);
  const GaussianBelief<double> prior = initial_belief(cfg);
  const MatrixXd r = Eigen::Vector2d(400.0, 25.0).asDiagonal();
  std::mt19937_64 rng(8);
  for (const FilterKind& k : {kEkf, kUkf, kCkf}) {
    const auto a = update(prior, VectorXd(random_vector(2, rng) * 1e3), k, model.observation, r);
    const auto b = update(prior, VectorXd(random_vector(2, rng) * 1e3), k, model.observation, r);
    EXPECT_EQ(a.cov, b.cov);
    const Eigen::VectorXd eig = Eigen::SelfAdjointEigenSolver<MatrixXd>(prior.cov - a.cov).eigenvalues();
    EXPECT_GE(eig.minCoeff(), -1e-9 * prior.cov.norm());
    EXPECT_LE(a.cov.determinant(), prior.cov.determinant());
  }
}

TEST(Update, DegenerateInnovation) {
  const GaussianBelief<double> prior{VectorXd::Zero(1), MatrixXd::Identity(1, 1)};
  const auto h = affine(MatrixXd::Zero(1, 1), VectorXd::Zero(1));
  EXPECT_THROW(update(prior, VectorXd(VectorXd::Zero(1)), kEkf, h, MatrixXd(MatrixXd::Zero(1, 1))), NumericalDegeneracyError);
}

TEST(RunFilter, EmptyAndMismatched) {
  const GaussianBelief<double> b{VectorXd::Zero(1), MatrixXd::Identity(1, 1)};
  const auto id = affine(MatrixXd::Identity(1, 1), VectorXd::Zero(1));
  EXPECT_TRUE(run_filter<double>(kCkf, b, {}, {}, id, MatrixXd::Zero(1, 1), id).empty());
  EXPECT_THROW(run_filter<double>(kCkf, b, {VectorXd::Zero(1)}, {}, id, MatrixXd::Zero(1, 1), id), AlignmentError);
}

TEST(RunFilter, AffineSystemsMatchKalman) {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 20; ++t) {
    const int n = 1 + t % 4;
    const MatrixXd f = 0.5 * random_matrix(n, n, rng), q = random_spd(n, rng);
    const MatrixXd hm = random_matrix(2, n, rng);
    std::vector<VectorXd> zs;
    std::vector<MatrixXd> rs;
    for (int k = 0; k < 10; ++k) {
      zs.push_back(random_vector(2, rng));
      rs.push_back(random_spd(2, rng));
    }
    const GaussianBelief<double> b0{random_vector(n, rng), random_spd(n, rng)};

    VectorXd m = b0.mean;
    MatrixXd p = b0.cov;
    std::vector<GaussianBelief<double>> kalman;
    for (int k = 0; k < 10; ++k) {
      m = f * m;
      p = f * p * f.transpose() + q;
      const MatrixXd s = hm * p * hm.transpose() + rs[k];
      const MatrixXd gain = p * hm.transpose() * s.inverse();
      m += gain * (zs[k] - hm * m);
      p = (MatrixXd::Identity(n, n) - gain * hm) * p;
      kalman.push_back({m, p});
    }
    for (const FilterKind& kind : {kEkf, kUkf, kCkf}) {
      const auto out = run_filter(kind, b0, zs, rs, affine(f, VectorXd::Zero(n)), q, affine(hm, VectorXd::Zero(2)));
      ASSERT_EQ(out.size(), 10u);
      for (int k = 0; k < 10; ++k) {
        EXPECT_LT((out[k].mean - kalman[k].mean).norm(), 1e-9 * std::max(1.0, kalman[k].mean.norm()));
        EXPECT_LT(rel(out[k].cov, kalman[k].cov), 1e-9);
      }
    }
  }
}

TEST(RunFilter, CkfAltitudeIsThreeSigmaConsistent) {
  ScenarioConfig cfg;
  const auto lib = build_library(LibrarySpec{});
  const FilterKind kind = kCkf;
  long inside = 0, total = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const EpisodeRecord ep = run_episode(cfg, RadarMode::TraditionalActiveRadar, kind, lib, SelectionPolicy{}, seed);
    for (const auto& s : ep.steps) {
      const double err = std::abs(s.posterior.mean(kAltitude) - s.truth(kAltitude));
      inside += err <= 3.0 * std::sqrt(s.posterior.cov(kAltitude, kAltitude));
      ++total;
    }
  }
  EXPECT_GE(double(inside) / double(total), 0.95);
}
