#pragma once

#include <stdexcept>
#include <string>

namespace thetac {

// Error taxonomy mirrors the CLI exit codes: input/parse problems exit 2,
// estimation failures exit 3, network failures exit 4.

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EstimationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NetworkError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace thetac
