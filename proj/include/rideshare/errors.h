#pragma once

#include <stdexcept>

namespace rideshare {

// Invalid scenario parameters or inconsistent inputs.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unreadable or malformed input files.
class LoadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rideshare
