#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace relqi {

enum class ErrorCode {
  kSize,
  kShape,
  kChannelIntegrity,
  kSuperluminal,
  kShell,
  kRegime,
  kDomain,
  kNumericalDegeneracy,
  kAccuracy,
  kIndistinguishable,
  kCapacity,
  kOutOfCode,
  kEmptySector,
  kParity,
  kConvention,
  kFormat,
};

std::string_view error_code_name(ErrorCode code);

/// True for failures of numerical accuracy (as opposed to invalid input).
bool is_accuracy_failure(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace relqi
