#pragma once

#include <stdexcept>
#include <string>

namespace termstrip {

// Error categories mirror the C API status codes (see include/termstrip/termstrip.h).

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GenerationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DetectorError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace termstrip
