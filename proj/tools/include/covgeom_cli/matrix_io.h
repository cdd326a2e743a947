#pragma once
// Plain-text matrix files: one row per line, comma-separated decimals,
// blank lines and lines starting with '#' ignored. Writers emit 17
// significant digits so every value re-parses to the same double.

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "covgeom/error.h"
#include "covgeom/spectral.h"

namespace covgeom::cli {

/// Malformed input. Line and column are 1-based; 0 means "whole file".
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string origin, std::size_t line, std::size_t column,
             const std::string& detail);
  const std::string& origin() const noexcept { return origin_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::string origin_;
  std::size_t line_;
  std::size_t column_;
};

/// Parses a square, symmetric (to 1e-9 max|entry|) matrix and symmetrizes it.
Matrix ParseMatrix(std::string_view text, const std::string& origin);

Matrix ReadMatrixFile(const std::filesystem::path& path);

/// Message of a library error without its leading code name.
std::string ErrorDetail(const Error& e);

/// ReadMatrixFile followed by PSD validation. Library errors are rethrown
/// with the file name in the message.
Covariance ReadCovariance(const std::filesystem::path& path);

/// Shortest form is not required; always 17 significant digits.
std::string FormatDouble(double v);

std::string FormatMatrix(const Matrix& m);

/// Writes through a sibling temporary file and renames it into place.
void WriteFileAtomic(const std::filesystem::path& path, const std::string& content);

void WriteMatrixFile(const std::filesystem::path& path, const Matrix& m);

}  // namespace covgeom::cli
