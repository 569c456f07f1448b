#pragma once

#include <stdexcept>
#include <string>

namespace ltsdem {

struct InvalidArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct OutOfRange : std::out_of_range {
  using std::out_of_range::out_of_range;
};

struct InvalidState : std::logic_error {
  using std::logic_error::logic_error;
};

/// Raised when consolidation would need a snapshot older than t_old.
/// A correct run never raises it.
struct RollbackBelowValidSnapshot : std::logic_error {
  using std::logic_error::logic_error;
};

struct FormatError : std::runtime_error {
  FormatError(const std::string& what, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line(line) {}
  std::size_t line;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SweepLimitExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ltsdem
