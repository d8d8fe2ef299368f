#pragma once

#include <stdexcept>
#include <string>

namespace optbal {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A state became non-finite during time integration.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& msg, long step, int cycle = -1)
      : Error(msg), step_index(step), cycle_index(cycle) {}
  long step_index;
  int cycle_index;  // -1 when not raised inside a nudging cycle
};

/// Newton iteration exhausted without meeting its tolerance.
class NoConvergenceError : public Error {
 public:
  NoConvergenceError(const std::string& msg, double best)
      : Error(msg), best_residual_norm(best) {}
  double best_residual_norm;
};

/// Malformed configuration input; line is 1-based, 0 when not tied to a line.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg, int line_number = 0)
      : Error(msg), line(line_number) {}
  int line;
};

}  // namespace optbal
