#include "cogradar/commands.hpp"

#include <fstream>
#include <iostream>

#include "cogradar/errors.hpp"
#include "cogradar/pica.hpp"

namespace cogradar {
namespace {

namespace fs = std::filesystem;
constexpr const char* kModule = "cli";

class CsvWriter {
 public:
  explicit CsvWriter(const fs::path& path) : out_(path, std::ios::binary), path_(path) {
    if (!out_) throw InputError(kModule, "cannot write " + path.string());
  }
  ~CsvWriter() = default;

  CsvWriter& header(std::initializer_list<std::string> names) {
    bool first = true;
    for (const auto& n : names) {
      out_ << (first ? "" : ",") << n;
      first = false;
    }
    out_ << '\n';
    return *this;
  }
  CsvWriter& cell(double v) { return raw(format_double(v)); }
  CsvWriter& cell(long v) { return raw(std::to_string(v)); }
  CsvWriter& cell(int v) { return raw(std::to_string(v)); }
  CsvWriter& cell(std::uint64_t v) { return raw(std::to_string(v)); }
  CsvWriter& cell(const std::string& v) { return raw(v); }
  CsvWriter& end() {
    out_ << '\n';
    fresh_ = true;
    return *this;
  }
  void close() {
    out_.close();
    if (!out_) throw InputError(kModule, "failed writing " + path_.string());
  }

 private:
  CsvWriter& raw(const std::string& s) {
    out_ << (fresh_ ? "" : ",") << s;
    fresh_ = false;
    return *this;
  }
  std::ofstream out_;
  fs::path path_;
  bool fresh_ = true;
};

void write_matrix_csv(const fs::path& path, const Eigen::MatrixXd& m) {
  CsvWriter w(path);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) w.cell(m(r, c));
    w.end();
  }
  w.close();
}

void write_runs_csv(const fs::path& path, const std::vector<EpisodeRecord>& episodes) {
  CsvWriter w(path);
  w.header({"seed", "step", "time_s", "true_altitude_ft", "true_velocity_ftps", "true_ballistic",
            "meas_range_ft", "meas_range_rate_ftps", "est_altitude_ft", "est_velocity_ftps", "est_ballistic",
            "std_altitude_ft", "std_velocity_ftps", "std_ballistic", "waveform_i", "waveform_j", "duration_s",
            "chirp_rate_hzps"});
  for (const EpisodeRecord& e : episodes) {
    long step = 0;
    for (const EpisodeStep& s : e.steps) {
      w.cell(e.seed).cell(++step).cell(s.time);
      for (int i = 0; i < 3; ++i) w.cell(s.truth(i));
      w.cell(s.measurement(kRange)).cell(s.measurement(kRangeRate));
      for (int i = 0; i < 3; ++i) w.cell(s.posterior.mean(i));
      for (int i = 0; i < 3; ++i) w.cell(std::sqrt(s.posterior.cov(i, i)));
      w.cell(s.index.i).cell(s.index.j).cell(s.waveform.duration).cell(s.waveform.chirp_rate).end();
    }
  }
  w.close();
}

struct Context {
  RunConfig cfg;
  WaveformLibrary lib;
  std::uint64_t seed0;
  const RunManifest& manifest;
  std::vector<fs::path> written;

  fs::path out(const std::string& name) {
    written.push_back(manifest.output_dir / name);
    return written.back();
  }
};

MonteCarloResult monte_carlo(Context& ctx, RadarMode mode, const FilterKind& kind) {
  return run_monte_carlo(ctx.cfg.scenario, mode, kind, ctx.lib, ctx.cfg.policy, ctx.manifest.n_runs, ctx.seed0,
                         ctx.manifest.workers);
}

RmseCurve curve_of(const MonteCarloResult& mc, RadarMode mode, const FilterKind& kind) {
  RmseCurve c = rmse_from_episodes(mc.episodes, curve_label(mode, kind));
  c.n_runs = mc.n_runs;
  c.divergences = static_cast<int>(mc.diverged_seeds.size());
  return c;
}

void simulate(Context& ctx) {
  const MonteCarloResult mc = monte_carlo(ctx, ctx.cfg.mode, ctx.cfg.filter);
  const std::string label = curve_label(ctx.cfg.mode, ctx.cfg.filter);
  if (!mc.episodes.empty() && mc.episodes.front().seed == ctx.seed0) {
    write_runs_csv(ctx.out("episode_" + label + ".csv"), {mc.episodes.front()});
  }
  write_rmse_csv(ctx.out("rmse_" + label + ".csv"), curve_of(mc, ctx.cfg.mode, ctx.cfg.filter));
}

void compare_filters(Context& ctx) {
  std::vector<RmseCurve> curves;
  for (FilterType type : {FilterType::EKF, FilterType::UKF, FilterType::CKF}) {
    FilterKind kind = ctx.cfg.filter;
    kind.type = type;
    const MonteCarloResult mc = monte_carlo(ctx, RadarMode::CognitiveRadar, kind);
    curves.push_back(curve_of(mc, RadarMode::CognitiveRadar, kind));
    write_rmse_csv(ctx.out(std::string("rmse_") + to_string(type) + ".csv"), curves.back());
  }
  write_comparison_csv(ctx.out("comparison.csv"), compare_curves(curves));
}

void compare_modes(Context& ctx) {
  std::vector<RmseCurve> curves;
  const std::string kind = to_string(ctx.cfg.filter.type);
  for (RadarMode mode : {RadarMode::CognitiveRadar, RadarMode::TraditionalActiveRadar}) {
    const MonteCarloResult mc = monte_carlo(ctx, mode, ctx.cfg.filter);
    curves.push_back(curve_of(mc, mode, ctx.cfg.filter));
    const std::string label = std::string(to_string(mode)) + "_" + kind;
    write_rmse_csv(ctx.out("rmse_" + label + ".csv"), curves.back());
    write_runs_csv(ctx.out("runs_" + label + ".csv"), mc.episodes);
  }
  write_comparison_csv(ctx.out("comparison.csv"), compare_curves(curves));
}

void pcrlb(Context& ctx) {
  for (RadarMode mode : {RadarMode::CognitiveRadar, RadarMode::TraditionalActiveRadar}) {
    const MonteCarloResult mc = monte_carlo(ctx, mode, ctx.cfg.filter);
    std::vector<PcrlbRun> inputs;
    for (const EpisodeRecord& e : mc.episodes) inputs.push_back(pcrlb_inputs(e));
    const PcrlbCurve bound = pcrlb_recursion(ctx.cfg.scenario, inputs);
    const RmseCurve rmse = curve_of(mc, mode, ctx.cfg.filter);

    CsvWriter w(ctx.out("pcrlb_" + curve_label(mode, ctx.cfg.filter) + ".csv"));
    w.header({"time_s", "pcrlb_altitude_ft", "pcrlb_velocity_ftps", "pcrlb_ballistic", "rmse_altitude_ft",
              "rmse_velocity_ftps", "posterior_std_altitude_ft", "posterior_std_velocity_ftps", "n_runs",
              "divergences"});
    for (std::size_t k = 0; k < bound.times.size(); ++k) {
      double var_alt = 0.0, var_vel = 0.0;
      for (const EpisodeRecord& e : mc.episodes) {
        var_alt += e.steps[k].posterior.cov(kAltitude, kAltitude);
        var_vel += e.steps[k].posterior.cov(kVelocity, kVelocity);
      }
      const double n = static_cast<double>(mc.episodes.size());
      w.cell(bound.times[k]).cell(bound.bound_altitude[k]).cell(bound.bound_velocity[k]);
      w.cell(bound.bound_ballistic[k]).cell(rmse.rmse_altitude[k]).cell(rmse.rmse_velocity[k]);
      w.cell(std::sqrt(var_alt / n)).cell(std::sqrt(var_vel / n)).cell(rmse.n_runs).cell(rmse.divergences).end();
    }
    w.close();
  }
}

void pica_command(Context& ctx) {
  const PicaSettings& p = ctx.cfg.pica;
  if (p.input.empty()) throw ConfigError("pica", "pica.input is required for the pica subcommand");
  std::ifstream in(p.input);
  if (!in) throw InputError("pica", "cannot open " + p.input);
  Eigen::MatrixXd data = pica::read_matrix(in);
  if (p.normalize) data = pica::variance_normalize(data);

  if (p.latent_dim >= data.rows()) {
    throw ConfigError("pica", "pica.latent_dim = " + std::to_string(p.latent_dim) + " violates q < p = " +
                                  std::to_string(data.rows()) +
                                  " (the noise variance averages the p - q smallest eigenvalues)");
  }
  const pica::PicaModel model = pica::fit(data, p.latent_dim);

  CsvWriter summary(ctx.out("pica_model.csv"));
  summary.header({"field", "value"});
  summary.cell(std::string("channels")).cell(static_cast<long>(data.rows())).end();
  summary.cell(std::string("samples")).cell(static_cast<long>(data.cols())).end();
  summary.cell(std::string("latent_dim")).cell(model.latent_dim).end();
  summary.cell(std::string("noise_var")).cell(model.noise_var).end();
  summary.close();

  CsvWriter scree(ctx.out("pica_eigenvalues.csv"));
  scree.header({"index", "eigenvalue"});
  for (Eigen::Index i = 0; i < model.eigenvalues.size(); ++i) {
    scree.cell(static_cast<long>(i + 1)).cell(model.eigenvalues(i)).end();
  }
  scree.close();

  write_matrix_csv(ctx.out("pica_mean.csv"), model.mean);
  write_matrix_csv(ctx.out("pica_mixing.csv"), model.mixing);
  write_matrix_csv(ctx.out("pica_unmixing.csv"), model.unmixing);
  write_matrix_csv(ctx.out("pica_sources.csv"), pica::estimate_sources(model, data));

  const Eigen::Index seg = p.segment_length > 0 ? p.segment_length : data.cols();
  Eigen::MatrixXd spectra(seg / 2 + 1, data.rows());
  for (Eigen::Index r = 0; r < data.rows(); ++r) {
    spectra.col(r) = pica::power_spectrum(data.row(r).transpose(), seg);
  }
  write_matrix_csv(ctx.out("pica_spectrum.csv"), spectra);
}

}  // namespace

Subcommand parse_subcommand(const std::string& name) {
  if (name == "simulate") return Subcommand::Simulate;
  if (name == "compare-filters") return Subcommand::CompareFilters;
  if (name == "compare-modes") return Subcommand::CompareModes;
  if (name == "pcrlb") return Subcommand::Pcrlb;
  if (name == "pica") return Subcommand::Pica;
  throw InputError(kModule, "unknown subcommand '" + name + "'");
}

void write_rmse_csv(const fs::path& path, const RmseCurve& curve) {
  CsvWriter w(path);
  w.header({"time_s", "rmse_altitude_ft", "rmse_velocity_ftps", "n_runs", "divergences"});
  for (std::size_t k = 0; k < curve.times.size(); ++k) {
    w.cell(curve.times[k]).cell(curve.rmse_altitude[k]).cell(curve.rmse_velocity[k]);
    w.cell(curve.n_runs).cell(curve.divergences).end();
  }
  w.close();
}

void write_comparison_csv(const fs::path& path, const ComparisonTable& table) {
  CsvWriter w(path);
  w.header({"first", "second", "mean_rmse_altitude_first", "mean_rmse_altitude_second", "altitude",
            "mean_rmse_velocity_first", "mean_rmse_velocity_second", "velocity"});
  for (const PairOrdering& p : table.pairs) {
    const CurveSummary& a = table.summaries[p.first];
    const CurveSummary& b = table.summaries[p.second];
    w.cell(a.label).cell(b.label).cell(a.mean_altitude).cell(b.mean_altitude).cell(std::string(to_string(p.altitude)));
    w.cell(a.mean_velocity).cell(b.mean_velocity).cell(std::string(to_string(p.velocity))).end();
  }
  w.close();
}

std::vector<fs::path> run_command(const RunManifest& manifest) {
  if (manifest.n_runs < 1) throw InputError(kModule, "--runs must be >= 1");
  if (manifest.workers < 1) throw InputError(kModule, "--workers must be >= 1");
  RunConfig cfg = manifest.config_path.empty() ? parse_config_text("") : parse_config(manifest.config_path);
  if (manifest.seed) cfg.scenario.seed = *manifest.seed;

  std::error_code ec;
  fs::create_directories(manifest.output_dir, ec);
  if (ec || !fs::is_directory(manifest.output_dir)) {
    throw InputError(kModule, "output directory " + manifest.output_dir.string() + " is not writable");
  }

  Context ctx{cfg, build_library(cfg.library), cfg.scenario.seed, manifest, {}};
  if (ctx.lib.clamped() > 0) {
    std::cerr << "warning: " << ctx.lib.clamped() << " waveform library entries clamped to the chirp bound\n";
  }
  {
    std::ofstream echo(ctx.out("effective_config.cfg"), std::ios::binary);
    echo << to_text(cfg);
    if (!echo) throw InputError(kModule, "cannot write effective_config.cfg");
  }

  switch (manifest.subcommand) {
    case Subcommand::Simulate: simulate(ctx); break;
    case Subcommand::CompareFilters: compare_filters(ctx); break;
    case Subcommand::CompareModes: compare_modes(ctx); break;
    case Subcommand::Pcrlb: pcrlb(ctx); break;
    case Subcommand::Pica: pica_command(ctx); break;
  }
  return ctx.written;
}

}  // namespace cogradar
