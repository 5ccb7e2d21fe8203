#pragma once

#include <stdexcept>
#include <string>

namespace idealpoint {

// Failure categories surfaced by the CLI as distinct exit codes.
class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class ValidationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace idealpoint
