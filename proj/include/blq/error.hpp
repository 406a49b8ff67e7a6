#pragma once

#include <stdexcept>
#include <string>

namespace blq {

enum class ErrorCode {
  RejectIndefinite,
  RejectAsymmetric,
  OutOfRange,
  InvalidArgument,
  SingularFactor,
  Blowup,
  RankDeficient,
  NonConverged,
  Io,
};

// Machine-readable class name, e.g. "REJECT_INDEFINITE".
const char* code_name(ErrorCode code);

// Process exit status for the CLI: 2 validation, 3 numeric failure, 4 I/O.
int exit_status(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(std::string module, ErrorCode code, const std::string& detail);

  const std::string& module() const { return module_; }
  ErrorCode code() const { return code_; }
  const std::string& detail() const { return detail_; }

 private:
  std::string module_;
  ErrorCode code_;
  std::string detail_;
};

[[noreturn]] void fail(const char* module, ErrorCode code, const std::string& detail);

}  // namespace blq
