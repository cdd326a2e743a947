#include "covgeom/error.h"

#include <cstdio>

namespace covgeom {
namespace {

std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

std::string_view ToString(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kNotPsd: return "NotPSD";
    case ErrorCode::kDimMismatch: return "DimMismatch";
    case ErrorCode::kKernelCondition: return "KernelCondition";
    case ErrorCode::kLeavesCone: return "LeavesCone";
    case ErrorCode::kOutOfRange: return "OutOfRange";
    case ErrorCode::kEmptyFamily: return "EmptyFamily";
    case ErrorCode::kMaxIterExceeded: return "MaxIterExceeded";
    case ErrorCode::kDegenerate: return "Degenerate";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(ToString(code)) + ": " + message),
      code_(code) {}

NotPsdError::NotPsdError(double lambda_min, double psd_tol)
    : Error(ErrorCode::kNotPsd,
            "smallest eigenvalue " + FormatDouble(lambda_min) +
                " is below -psd_tol = " + FormatDouble(-psd_tol)),
      lambda_min_(lambda_min),
      psd_tol_(psd_tol) {}

KernelConditionError::KernelConditionError(const std::string& detail,
                                           std::optional<std::size_t> index)
    : Error(ErrorCode::kKernelCondition,
            index ? detail + " (index " + std::to_string(*index) + ")"
                  : detail),
      index_(index) {}

LeavesConeError::LeavesConeError(double lambda_min)
    : Error(ErrorCode::kLeavesCone,
            "I + A has eigenvalue " + FormatDouble(lambda_min)),
      lambda_min_(lambda_min) {}

LeavesConeError::LeavesConeError(double lambda_min, double s_lo, double s_hi)
    : Error(ErrorCode::kLeavesCone,
            "I + A has eigenvalue " + FormatDouble(lambda_min) +
                "; admissible step interval is [" + FormatDouble(s_lo) +
                ", " + FormatDouble(s_hi) + "]"),
      lambda_min_(lambda_min),
      s_lo_(s_lo),
      s_hi_(s_hi) {}

}  // namespace covgeom
