#pragma once

#include <stdexcept>
#include <string>

namespace mcsim {

// Error taxonomy mirrors the CLI exit codes: config/usage, trace, internal.
class SimError : public std::runtime_error {
public:
  enum class Kind { Config, Trace, Internal };

  SimError(Kind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}

  Kind kind() const { return kind_; }

private:
  Kind kind_;
};

inline SimError config_error(std::string msg) {
  return SimError(SimError::Kind::Config, std::move(msg));
}
inline SimError trace_error(std::string msg) {
  return SimError(SimError::Kind::Trace, std::move(msg));
}
// Guards simulator invariants; reaching one of these is a bug, not bad input.
inline SimError internal_error(std::string msg) {
  return SimError(SimError::Kind::Internal, std::move(msg));
}

}  // namespace mcsim
