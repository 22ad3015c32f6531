#pragma once

#include <stdexcept>
#include <string>

namespace frk {

// Invalid or inconsistent user-facing input: bad config keys, malformed
// files, out-of-range parameters. Mapped to exit code 2 by the CLI.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure at run time: singular systems, non-finite results,
// degenerate noise. Mapped to exit code 3 by the CLI.
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace frk
