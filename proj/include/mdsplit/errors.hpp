#ifndef MDSPLIT_ERRORS_HPP_
#define MDSPLIT_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace mdsplit {

// Bad configuration values (invalid fractions, unknown keys, K too large...).
// The CLI maps these to exit status 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// API misuse: dimension mismatch, missing labels, non-finite query values.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input file; message carries the 1-based line number.
struct ParseError : std::runtime_error {
  ParseError(const std::string& what, long line)
      : std::runtime_error(what + " (line " + std::to_string(line) + ")"),
        line_number(line) {}
  long line_number;
};

// Model fitting failed (singular design, no usable tuning candidate...).
struct FitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The response grid does not capture the density mass at some query point.
struct IntegrationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A partition group has too few calibration points to support the
// requested significance level.
struct CalibrationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Filesystem failures.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace mdsplit

#endif  // MDSPLIT_ERRORS_HPP_
