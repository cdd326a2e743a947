#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace covgeom {

enum class ErrorCode {
  kNonFinite,
  kNotPsd,
  kDimMismatch,
  kKernelCondition,
  kLeavesCone,
  kOutOfRange,
  kEmptyFamily,
  kMaxIterExceeded,
  kDegenerate,
};

std::string_view ToString(ErrorCode code);

/// Base class for every failure raised by the library. The code is stable
/// and is what callers (and the CLI exit-code mapping) dispatch on.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Smallest eigenvalue fell below -psd_tol.
class NotPsdError : public Error {
 public:
  NotPsdError(double lambda_min, double psd_tol);

  double lambda_min() const noexcept { return lambda_min_; }
  double psd_tol() const noexcept { return psd_tol_; }

 private:
  double lambda_min_;
  double psd_tol_;
};

/// ker(source) is not contained in ker(target), so no optimal map (and no
/// log map) exists. `index` identifies a family member or an iterate when
/// the failure happened inside a loop.
class KernelConditionError : public Error {
 public:
  explicit KernelConditionError(const std::string& detail,
                                std::optional<std::size_t> index = {});

  std::optional<std::size_t> index() const noexcept { return index_; }

 private:
  std::optional<std::size_t> index_;
};

/// I + A has an eigenvalue below -psd_tol; the retraction (I+A)S(I+A) would
/// not be a congruence by a positive map. When known, [s_lo, s_hi] is the
/// admissible step interval along the offending direction.
class LeavesConeError : public Error {
 public:
  explicit LeavesConeError(double lambda_min);
  LeavesConeError(double lambda_min, double s_lo, double s_hi);

  double lambda_min() const noexcept { return lambda_min_; }
  std::optional<double> s_lo() const noexcept { return s_lo_; }
  std::optional<double> s_hi() const noexcept { return s_hi_; }

 private:
  double lambda_min_;
  std::optional<double> s_lo_;
  std::optional<double> s_hi_;
};

}  // namespace covgeom
