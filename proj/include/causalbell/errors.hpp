#pragma once

#include <stdexcept>
#include <string>

namespace causalbell {

// Thrown when a configurable resource limit is exceeded (column-count guard,
// strategy materialization cap, enumeration party limit).
class guard_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Thrown on malformed input files; the message carries the offending
// file/field position.
class parse_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace causalbell
