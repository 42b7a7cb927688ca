#include "geopulse/core/error.h"

namespace geopulse {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::io: return "io_error";
    case ErrorCode::parse: return "parse_error";
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::validation: return "validation_error";
    case ErrorCode::not_found: return "not_found";
    case ErrorCode::contract: return "contract_violation";
    case ErrorCode::engine: return "engine_error";
  }
  return "error";
}

}  // namespace geopulse
