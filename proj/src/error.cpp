#include "relqi/error.hpp"

namespace relqi {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSize: return "size";
    case ErrorCode::kShape: return "shape";
    case ErrorCode::kChannelIntegrity: return "channel-integrity";
    case ErrorCode::kSuperluminal: return "superluminal";
    case ErrorCode::kShell: return "shell";
    case ErrorCode::kRegime: return "regime";
    case ErrorCode::kDomain: return "domain";
    case ErrorCode::kNumericalDegeneracy: return "numerical-degeneracy";
    case ErrorCode::kAccuracy: return "accuracy";
    case ErrorCode::kIndistinguishable: return "indistinguishability";
    case ErrorCode::kCapacity: return "capacity";
    case ErrorCode::kOutOfCode: return "out-of-code";
    case ErrorCode::kEmptySector: return "empty-sector";
    case ErrorCode::kParity: return "parity";
    case ErrorCode::kConvention: return "convention";
    case ErrorCode::kFormat: return "format";
  }
  return "unknown";
}

bool is_accuracy_failure(ErrorCode code) {
  return code == ErrorCode::kAccuracy || code == ErrorCode::kNumericalDegeneracy ||
         code == ErrorCode::kConvention;
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(error_code_name(code)) + " error: " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace relqi
