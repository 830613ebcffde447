#include "cogradar/metrics.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include "cogradar/errors.hpp"

namespace cogradar {
namespace {

constexpr const char* kModule = "metrics";

Matrix3 spd_inverse(const Matrix3& m, const char* what) {
  Eigen::LLT<Matrix3> llt(m);
  if (llt.info() != Eigen::Success || !m.allFinite()) {
    throw NumericalDegeneracyError(kModule, std::string(what) + " is singular");
  }
  Matrix3 inv = llt.solve(Matrix3::Identity());
  return 0.5 * (inv + inv.transpose());
}

double average(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return v.empty() ? 0.0 : sum / static_cast<double>(v.size());
}

Ordering order(double a, double b) {
  if (a < b) return Ordering::Better;
  if (a > b) return Ordering::Worse;
  return Ordering::Tie;
}

}  // namespace

RmseCurve rmse_curve(const std::vector<std::vector<StateVector>>& estimates,
                     const std::vector<std::vector<StateVector>>& truths, const std::vector<double>& times,
                     std::string label) {
  if (estimates.empty()) throw InputError(kModule, "rmse_curve needs at least one run");
  if (estimates.size() != truths.size()) throw AlignmentError(kModule, "estimate and truth run counts differ");
  const std::size_t steps = times.size();
  RmseCurve curve;
  curve.times = times;
  curve.rmse_altitude.assign(steps, 0.0);
  curve.rmse_velocity.assign(steps, 0.0);
  curve.n_runs = static_cast<int>(estimates.size());
  curve.label = std::move(label);
  for (std::size_t r = 0; r < estimates.size(); ++r) {
    if (estimates[r].size() != steps || truths[r].size() != steps) {
      throw AlignmentError(kModule, "run length does not match the time axis");
    }
    for (std::size_t k = 0; k < steps; ++k) {
      const StateVector err = estimates[r][k] - truths[r][k];
      curve.rmse_altitude[k] += err(kAltitude) * err(kAltitude);
      curve.rmse_velocity[k] += err(kVelocity) * err(kVelocity);
    }
  }
  const double n = static_cast<double>(estimates.size());
  for (std::size_t k = 0; k < steps; ++k) {
    curve.rmse_altitude[k] = std::sqrt(curve.rmse_altitude[k] / n);
    curve.rmse_velocity[k] = std::sqrt(curve.rmse_velocity[k] / n);
  }
  return curve;
}

RmseCurve rmse_from_episodes(const std::vector<EpisodeRecord>& episodes, std::string label) {
  if (episodes.empty()) throw HarnessError(kModule, "no successful runs to aggregate");
  std::vector<std::vector<StateVector>> est(episodes.size()), truth(episodes.size());
  std::vector<double> times;
  for (const EpisodeStep& s : episodes.front().steps) times.push_back(s.time);
  for (std::size_t r = 0; r < episodes.size(); ++r) {
    for (const EpisodeStep& s : episodes[r].steps) {
      est[r].push_back(StateVector(s.posterior.mean));
      truth[r].push_back(s.truth);
    }
  }
  return rmse_curve(est, truth, times, std::move(label));
}

MonteCarloResult run_monte_carlo(const ScenarioConfig& cfg, RadarMode mode, const FilterKind& kind,
                                 const WaveformLibrary& lib, const SelectionPolicy& policy, int n_runs,
                                 std::uint64_t seed0, int workers) {
  if (n_runs < 1) throw InputError(kModule, "n_runs must be >= 1");
  validate(cfg);
  validate(policy);

  std::vector<std::optional<EpisodeRecord>> slots(static_cast<std::size_t>(n_runs));
  std::vector<std::exception_ptr> fatal(static_cast<std::size_t>(n_runs));
  std::atomic<int> next{0};
  auto work = [&]() {
    for (int r = next++; r < n_runs; r = next++) {
      try {
        slots[r] = run_episode(cfg, mode, kind, lib, policy, seed0 + static_cast<std::uint64_t>(r));
      } catch (const SimulationDivergedError&) {
        // recorded as divergence below
      } catch (...) {
        fatal[r] = std::current_exception();
      }
    }
  };
  const int threads = std::max(1, std::min(workers, n_runs));
  if (threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work);
  }
  for (auto& e : fatal) {
    if (e) std::rethrow_exception(e);
  }

  MonteCarloResult out;
  out.n_runs = n_runs;
  for (int r = 0; r < n_runs; ++r) {
    if (slots[r]) {
      out.episodes.push_back(std::move(*slots[r]));
    } else {
      out.diverged_seeds.push_back(seed0 + static_cast<std::uint64_t>(r));
    }
  }
  if (10 * out.diverged_seeds.size() > static_cast<std::size_t>(n_runs)) {
    throw HarnessError(kModule, std::to_string(out.diverged_seeds.size()) + " of " + std::to_string(n_runs) +
                                    " runs diverged (limit 10%) for " + curve_label(mode, kind));
  }
  return out;
}

std::string curve_label(RadarMode mode, const FilterKind& kind) {
  return std::string(to_string(mode)) + "_" + to_string(kind.type);
}

RmseCurve monte_carlo_rmse(const ScenarioConfig& cfg, RadarMode mode, const FilterKind& kind,
                           const WaveformLibrary& lib, const SelectionPolicy& policy, int n_runs,
                           std::uint64_t seed0, int workers) {
  const MonteCarloResult mc = run_monte_carlo(cfg, mode, kind, lib, policy, n_runs, seed0, workers);
  RmseCurve curve = rmse_from_episodes(mc.episodes, curve_label(mode, kind));
  curve.n_runs = n_runs;
  curve.divergences = static_cast<int>(mc.diverged_seeds.size());
  return curve;
}

PcrlbRun pcrlb_inputs(const EpisodeRecord& episode) {
  PcrlbRun run;
  for (const EpisodeStep& s : episode.steps) {
    run.noise_covs.push_back(s.noise_cov);
    run.truth.push_back(s.truth);
  }
  return run;
}

PcrlbCurve pcrlb_recursion(const ScenarioConfig& cfg, const PcrlbRun& run) {
  return pcrlb_recursion(cfg, std::vector<PcrlbRun>{run});
}

PcrlbCurve pcrlb_recursion(const ScenarioConfig& cfg, const std::vector<PcrlbRun>& runs) {
  if (runs.empty()) throw InputError(kModule, "pcrlb needs at least one run");
  const std::size_t steps = runs.front().truth.size();

  Matrix3 q = cfg.process_noise;
  {
    Eigen::SelfAdjointEigenSolver<Matrix3> es(q);
    if (es.eigenvalues().minCoeff() <= 0.0) q += 1e-12 * Matrix3::Identity();
  }
  const Matrix3 j0 = spd_inverse(cfg.x0_est_cov, "initial covariance");

  std::vector<Matrix3> info_sum(steps, Matrix3::Zero());
  for (const PcrlbRun& run : runs) {
    if (run.truth.size() != steps || run.noise_covs.size() != steps) {
      throw AlignmentError(kModule, "pcrlb runs must share one length for truth and noise sequences");
    }
    Matrix3 j = j0;
    StateVector prev = cfg.x0_true;
    for (std::size_t k = 0; k < steps; ++k) {
      const Matrix3 f = transition_jacobian(prev, cfg);
      const Matrix23 h = measurement_jacobian(run.truth[k], cfg);
      Eigen::LLT<Matrix2> r_llt(run.noise_covs[k]);
      if (r_llt.info() != Eigen::Success) throw NumericalDegeneracyError(kModule, "measurement noise is singular");
      const Matrix3 prior = f * spd_inverse(j, "information matrix") * f.transpose() + q;
      j = spd_inverse(0.5 * (prior + prior.transpose()), "predicted covariance") +
          h.transpose() * r_llt.solve(h);
      j = 0.5 * (j + j.transpose());
      info_sum[k] += j;
      prev = run.truth[k];
    }
  }

  PcrlbCurve curve;
  const double n = static_cast<double>(runs.size());
  for (std::size_t k = 0; k < steps; ++k) {
    const Matrix3 bound = spd_inverse(info_sum[k] / n, "information matrix");
    curve.times.push_back(static_cast<double>(k + 1) * cfg.dt);
    curve.bound_altitude.push_back(std::sqrt(bound(kAltitude, kAltitude)));
    curve.bound_velocity.push_back(std::sqrt(bound(kVelocity, kVelocity)));
    curve.bound_ballistic.push_back(std::sqrt(bound(kBallistic, kBallistic)));
  }
  return curve;
}

const char* to_string(Ordering o) {
  switch (o) {
    case Ordering::Better: return "better";
    case Ordering::Worse: return "worse";
    case Ordering::Tie: return "tie";
  }
  return "?";
}

ComparisonTable compare_curves(const std::vector<RmseCurve>& curves) {
  ComparisonTable table;
  for (const RmseCurve& c : curves) {
    if (c.rmse_altitude.size() != c.times.size() || c.rmse_velocity.size() != c.times.size()) {
      throw AlignmentError(kModule, "curve '" + c.label + "' has mismatched column lengths");
    }
    if (c.times != curves.front().times) {
      throw AlignmentError(kModule, "curve '" + c.label + "' is not aligned with '" + curves.front().label + "'");
    }
    table.summaries.push_back({c.label, average(c.rmse_altitude), average(c.rmse_velocity)});
  }
  for (std::size_t a = 0; a < curves.size(); ++a) {
    for (std::size_t b = a + 1; b < curves.size(); ++b) {
      const CurveSummary& x = table.summaries[a];
      const CurveSummary& y = table.summaries[b];
      table.pairs.push_back({a, b, order(x.mean_altitude, y.mean_altitude), order(x.mean_velocity, y.mean_velocity)});
    }
  }
  return table;
}

}  // namespace cogradar
