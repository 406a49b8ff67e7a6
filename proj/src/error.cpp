#include "blq/error.hpp"

namespace blq {

const char* code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::RejectIndefinite: return "REJECT_INDEFINITE";
    case ErrorCode::RejectAsymmetric: return "REJECT_ASYMMETRIC";
    case ErrorCode::OutOfRange: return "OUT_OF_RANGE";
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::SingularFactor: return "SINGULAR_FACTOR";
    case ErrorCode::Blowup: return "BLOWUP";
    case ErrorCode::RankDeficient: return "RANK_DEFICIENT";
    case ErrorCode::NonConverged: return "NONCONVERGED";
    case ErrorCode::Io: return "IO_ERROR";
  }
  return "UNKNOWN";
}

int exit_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::RejectIndefinite:
    case ErrorCode::RejectAsymmetric:
    case ErrorCode::OutOfRange:
    case ErrorCode::InvalidArgument:
      return 2;
    case ErrorCode::Io:
      return 4;
    default:
      return 3;
  }
}

Error::Error(std::string module, ErrorCode code, const std::string& detail)
    : std::runtime_error(module + ": " + code_name(code) + ": " + detail),
      module_(std::move(module)),
      code_(code),
      detail_(detail) {}

void fail(const char* module, ErrorCode code, const std::string& detail) {
  throw Error(module, code, detail);
}

}  // namespace blq
