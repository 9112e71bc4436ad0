#pragma once

#include <stdexcept>
#include <string>

namespace tl {

/// Invalid user configuration (bad quantum numbers, missing trap, unknown
/// run-file key, ...). The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A non-finite value appeared during evaluation. The CLI maps this to exit
/// code 3.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace tl
