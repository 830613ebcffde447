#pragma once

// Flat `key = value` run configuration with dotted section prefixes:
//
//   # comment
//   scenario.dt = 0.05
//   scenario.x0_true = 3e5, 2e4, 1e-3
//   waveform.fixed_index = 14, 10
//   policy.criterion = entropy
//
// Vectors are comma-separated; 3x3 matrices take 9 row-major values or 3
// diagonal values. Unknown or repeated keys are errors. `to_text` writes the
// effective configuration in the same syntax with 17 significant digits, so
// its output parses back to an identical configuration.

#include <filesystem>
#include <string>

#include "cogradar/filters.hpp"
#include "cogradar/models.hpp"
#include "cogradar/pac.hpp"
#include "cogradar/waveform.hpp"

namespace cogradar {

struct PicaSettings {
  std::string input;        // channels x samples matrix file
  int latent_dim = 1;
  long segment_length = 0;  // 0: whole signal
  bool normalize = false;   // variance-normalize rows before fitting
};

struct RunConfig {
  ScenarioConfig scenario;
  LibrarySpec library;
  SelectionPolicy policy;
  FilterKind filter;
  RadarMode mode = RadarMode::CognitiveRadar;
  PicaSettings pica;
};

/// Parses config text. `base_dir` resolves a relative pica.input.
RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir = {});
RunConfig parse_config(const std::filesystem::path& path);

/// Effective configuration (fixed index resolved) in parseable form.
std::string to_text(const RunConfig& cfg);

/// Round-trip text for a double ("%.17g").
std::string format_double(double v);

}  // namespace cogradar
