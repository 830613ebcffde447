#include "cogradar/config.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "cogradar/errors.hpp"

namespace cogradar {
namespace {

constexpr const char* kModule = "config";

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const std::string& expected) {
  throw ConfigError(kModule, "invalid " + key + ": '" + value + "' (expected " + expected + ")");
}

double to_double(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    bad_value(key, raw, "a number");
  }
  if (used != s.size()) bad_value(key, raw, "a number");
  return v;
}

long to_long(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(s, &used);
  } catch (const std::exception&) {
    bad_value(key, raw, "an integer");
  }
  if (used != s.size()) bad_value(key, raw, "an integer");
  return v;
}

std::vector<double> to_list(const std::string& key, const std::string& raw) {
  std::vector<double> out;
  std::stringstream ss(raw);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(to_double(key, cell));
  return out;
}

StateVector to_vec3(const std::string& key, const std::string& raw) {
  const auto v = to_list(key, raw);
  if (v.size() != 3) bad_value(key, raw, "3 comma-separated numbers");
  return {v[0], v[1], v[2]};
}

Matrix3 to_mat3(const std::string& key, const std::string& raw) {
  const auto v = to_list(key, raw);
  if (v.size() == 3) return StateVector(v[0], v[1], v[2]).asDiagonal();
  if (v.size() != 9) bad_value(key, raw, "3 diagonal or 9 row-major numbers");
  Matrix3 m;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) m(r, c) = v[3 * r + c];
  }
  return m;
}

bool to_bool(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  bad_value(key, raw, "true or false");
}

template <typename M>
std::string join(const M& m) {
  std::string out;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (!out.empty()) out += ", ";
      out += format_double(m(r, c));
    }
  }
  return out;
}

using Setter = std::function<void(const std::string& key, const std::string& value)>;

std::map<std::string, Setter> setters(RunConfig& c, const std::filesystem::path& base_dir) {
  ScenarioConfig& s = c.scenario;
  LibrarySpec& w = c.library;
  std::map<std::string, Setter> m;
  auto num = [&m](const std::string& key, double& dst) {
    m[key] = [&dst](const std::string& k, const std::string& v) { dst = to_double(k, v); };
  };
  auto integer = [&m](const std::string& key, auto& dst) {
    m[key] = [&dst](const std::string& k, const std::string& v) {
      dst = static_cast<std::remove_reference_t<decltype(dst)>>(to_long(k, v));
    };
  };

  m["scenario.dynamics"] = [&s](const std::string& k, const std::string& v) {
    const std::string t = trim(v);
    if (t == "reentry") s.dynamics = DynamicsKind::Reentry;
    else if (t == "linear") s.dynamics = DynamicsKind::Linear;
    else bad_value(k, v, "reentry or linear");
  };
  num("scenario.gamma", s.gamma);
  num("scenario.radar_horizontal", s.radar_horizontal);
  num("scenario.radar_altitude", s.radar_altitude);
  num("scenario.dt", s.dt);
  integer("scenario.steps", s.steps);
  integer("scenario.substeps", s.substeps);
  m["scenario.x0_true"] = [&s](const std::string& k, const std::string& v) { s.x0_true = to_vec3(k, v); };
  m["scenario.x0_est_mean"] = [&s](const std::string& k, const std::string& v) { s.x0_est_mean = to_vec3(k, v); };
  m["scenario.x0_est_cov"] = [&s](const std::string& k, const std::string& v) { s.x0_est_cov = to_mat3(k, v); };
  m["scenario.randomize_initial_estimate"] = [&s](const std::string& k, const std::string& v) {
    s.randomize_initial_estimate = to_bool(k, v);
  };
  m["scenario.process_noise"] = [&s](const std::string& k, const std::string& v) {
    s.process_noise = to_mat3(k, v);
  };
  m["scenario.filter_process_noise"] = [&s](const std::string& k, const std::string& v) {
    s.filter_process_noise = to_mat3(k, v);
  };
  num("scenario.snr", s.snr);
  num("scenario.carrier_freq", s.carrier_freq);
  m["scenario.range_dependent_snr"] = [&s](const std::string& k, const std::string& v) {
    s.range_dependent_snr = to_bool(k, v);
  };
  num("scenario.reference_range", s.reference_range);
  m["scenario.linear_transition"] = [&s](const std::string& k, const std::string& v) {
    s.linear_transition = to_mat3(k, v);
  };
  m["scenario.linear_observation"] = [&s](const std::string& k, const std::string& v) {
    const auto l = to_list(k, v);
    if (l.size() != 6) bad_value(k, v, "6 row-major numbers");
    for (int r = 0; r < 2; ++r) {
      for (int col = 0; col < 3; ++col) s.linear_observation(r, col) = l[3 * r + col];
    }
  };
  m["scenario.seed"] = [&s](const std::string& k, const std::string& v) {
    const long seed = to_long(k, v);
    if (seed < 0) bad_value(k, v, "a nonnegative integer");
    s.seed = static_cast<std::uint64_t>(seed);
  };

  num("waveform.duration_min", w.duration_min);
  num("waveform.duration_max", w.duration_max);
  integer("waveform.duration_count", w.duration_count);
  num("waveform.chirp_min", w.chirp_min);
  num("waveform.chirp_max", w.chirp_max);
  integer("waveform.chirp_count", w.chirp_count);
  m["waveform.fixed_index"] = [&w](const std::string& k, const std::string& v) {
    const auto l = to_list(k, v);
    if (l.size() != 2) bad_value(k, v, "two integers i, j");
    w.has_fixed_index = true;
    w.fixed_index = {static_cast<int>(l[0]), static_cast<int>(l[1])};
  };

  integer("policy.window_radius", c.policy.window_radius);
  m["policy.cost_weights"] = [&c](const std::string& k, const std::string& v) {
    c.policy.cost_weights = to_vec3(k, v);
  };
  m["policy.criterion"] = [&c](const std::string& k, const std::string& v) {
    const std::string t = trim(v);
    if (t == "weighted_trace") c.policy.criterion = CostCriterion::WeightedTrace;
    else if (t == "entropy") c.policy.criterion = CostCriterion::Entropy;
    else bad_value(k, v, "weighted_trace or entropy");
  };

  m["filter.kind"] = [&c](const std::string& k, const std::string& v) {
    const std::string t = trim(v);
    if (t == "ekf") c.filter.type = FilterType::EKF;
    else if (t == "ukf") c.filter.type = FilterType::UKF;
    else if (t == "ckf") c.filter.type = FilterType::CKF;
    else bad_value(k, v, "ekf, ukf or ckf");
  };
  num("filter.ukf_alpha", c.filter.ukf.alpha);
  num("filter.ukf_beta", c.filter.ukf.beta);
  num("filter.ukf_kappa", c.filter.ukf.kappa);

  m["run.mode"] = [&c](const std::string& k, const std::string& v) {
    const std::string t = trim(v);
    if (t == "cr") c.mode = RadarMode::CognitiveRadar;
    else if (t == "tar") c.mode = RadarMode::TraditionalActiveRadar;
    else bad_value(k, v, "cr or tar");
  };

  m["pica.input"] = [&c, base_dir](const std::string&, const std::string& v) {
    std::filesystem::path p(trim(v));
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    c.pica.input = p.lexically_normal().string();
  };
  integer("pica.latent_dim", c.pica.latent_dim);
  integer("pica.segment_length", c.pica.segment_length);
  m["pica.normalize"] = [&c](const std::string& k, const std::string& v) { c.pica.normalize = to_bool(k, v); };
  return m;
}

void validate(const RunConfig& c) {
  validate(c.scenario);
  validate(c.policy);
  if (!(c.filter.ukf.alpha > 0.0 && c.filter.ukf.alpha <= 1.0)) {
    throw ConfigError(kModule, "invalid filter.ukf_alpha: must lie in (0, 1]");
  }
  if (!(c.filter.ukf.kappa >= 0.0)) throw ConfigError(kModule, "invalid filter.ukf_kappa: must be >= 0");
  if (c.pica.latent_dim < 1) throw ConfigError(kModule, "invalid pica.latent_dim: must be >= 1");
  if (c.pica.segment_length < 0) throw ConfigError(kModule, "invalid pica.segment_length: must be >= 0");
  build_library(c.library);
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir) {
  RunConfig cfg;
  const auto table = setters(cfg, base_dir);
  std::set<std::string> seen;
  std::vector<std::string> unknown;
  std::stringstream in(text);
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(kModule, "line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    const auto it = table.find(key);
    if (it == table.end()) {
      unknown.push_back(key);
      continue;
    }
    if (!seen.insert(key).second) throw ConfigError(kModule, "duplicate key " + key);
    it->second(key, value);
  }
  if (!unknown.empty()) {
    std::string list;
    for (const auto& k : unknown) list += (list.empty() ? "" : ", ") + k;
    throw ConfigError(kModule, "unknown keys: " + list);
  }
  validate(cfg);
  return cfg;
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(kModule, "cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path.parent_path());
}

std::string to_text(const RunConfig& c) {
  const ScenarioConfig& s = c.scenario;
  const LibrarySpec& w = c.library;
  const GridIndex fixed = build_library(w).fixed_index();
  std::ostringstream o;
  o << "# effective configuration\n";
  o << "scenario.dynamics = " << (s.dynamics == DynamicsKind::Reentry ? "reentry" : "linear") << "\n";
  o << "scenario.gamma = " << format_double(s.gamma) << "\n";
  o << "scenario.radar_horizontal = " << format_double(s.radar_horizontal) << "\n";
  o << "scenario.radar_altitude = " << format_double(s.radar_altitude) << "\n";
  o << "scenario.dt = " << format_double(s.dt) << "\n";
  o << "scenario.steps = " << s.steps << "\n";
  o << "scenario.substeps = " << s.substeps << "\n";
  o << "scenario.x0_true = " << join(s.x0_true) << "\n";
  o << "scenario.x0_est_mean = " << join(s.x0_est_mean) << "\n";
  o << "scenario.x0_est_cov = " << join(s.x0_est_cov) << "\n";
  o << "scenario.randomize_initial_estimate = " << (s.randomize_initial_estimate ? "true" : "false") << "\n";
  o << "scenario.process_noise = " << join(s.process_noise) << "\n";
  o << "scenario.filter_process_noise = " << join(s.filter_process_noise) << "\n";
  o << "scenario.snr = " << format_double(s.snr) << "\n";
  o << "scenario.carrier_freq = " << format_double(s.carrier_freq) << "\n";
  o << "scenario.range_dependent_snr = " << (s.range_dependent_snr ? "true" : "false") << "\n";
  o << "scenario.reference_range = " << format_double(s.reference_range) << "\n";
  o << "scenario.linear_transition = " << join(s.linear_transition) << "\n";
  o << "scenario.linear_observation = " << join(s.linear_observation) << "\n";
  o << "scenario.seed = " << s.seed << "\n";
  o << "waveform.duration_min = " << format_double(w.duration_min) << "\n";
  o << "waveform.duration_max = " << format_double(w.duration_max) << "\n";
  o << "waveform.duration_count = " << w.duration_count << "\n";
  o << "waveform.chirp_min = " << format_double(w.chirp_min) << "\n";
  o << "waveform.chirp_max = " << format_double(w.chirp_max) << "\n";
  o << "waveform.chirp_count = " << w.chirp_count << "\n";
  o << "waveform.fixed_index = " << fixed.i << ", " << fixed.j << "\n";
  o << "policy.window_radius = " << c.policy.window_radius << "\n";
  o << "policy.cost_weights = " << join(c.policy.cost_weights) << "\n";
  o << "policy.criterion = " << to_string(c.policy.criterion) << "\n";
  o << "filter.kind = " << to_string(c.filter.type) << "\n";
  o << "filter.ukf_alpha = " << format_double(c.filter.ukf.alpha) << "\n";
  o << "filter.ukf_beta = " << format_double(c.filter.ukf.beta) << "\n";
  o << "filter.ukf_kappa = " << format_double(c.filter.ukf.kappa) << "\n";
  o << "run.mode = " << to_string(c.mode) << "\n";
  if (!c.pica.input.empty()) {
    o << "pica.input = " << std::filesystem::absolute(c.pica.input).lexically_normal().string() << "\n";
  }
  o << "pica.latent_dim = " << c.pica.latent_dim << "\n";
  o << "pica.segment_length = " << c.pica.segment_length << "\n";
  o << "pica.normalize = " << (c.pica.normalize ? "true" : "false") << "\n";
  return o.str();
}

}  // namespace cogradar
