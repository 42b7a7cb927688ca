#pragma once

#include <stdexcept>
#include <string>

namespace geopulse {

enum class ErrorCode {
  io,
  parse,
  invalid_argument,
  validation,
  not_found,
  contract,
  engine,
};

const char* to_string(ErrorCode code) noexcept;

// Single exception type for the library. The code drives how callers
// (CLI exit status, HTTP status) report the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace geopulse
