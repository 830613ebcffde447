#pragma once

#include <stdexcept>
#include <string>

namespace cogradar {

/// Base of every error thrown by the library. `module()` names the component
/// that raised it so the CLI can attribute failures.
class Error : public std::runtime_error {
 public:
  Error(std::string module, const std::string& what)
      : std::runtime_error(module + ": " + what), module_(std::move(module)) {}

  const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

class InvalidStateError : public Error {
 public:
  using Error::Error;
};

class NumericalDegeneracyError : public Error {
 public:
  using Error::Error;
};

class SimulationDivergedError : public Error {
 public:
  SimulationDivergedError(std::string module, const std::string& what, long step)
      : Error(std::move(module), what + " (step " + std::to_string(step) + ")"), step_(step) {}
  long step() const noexcept { return step_; }

 private:
  long step_;
};

class InvalidWaveformError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

class AlignmentError : public Error {
 public:
  using Error::Error;
};

class RankDeficiencyError : public Error {
 public:
  using Error::Error;
};

class DegenerateChannelError : public Error {
 public:
  DegenerateChannelError(std::string module, const std::string& what, long row)
      : Error(std::move(module), what), row_(row) {}
  long row() const noexcept { return row_; }

 private:
  long row_;
};

class HarnessError : public Error {
 public:
  using Error::Error;
};

}  // namespace cogradar
