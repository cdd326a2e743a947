#include "covgeom_cli/matrix_io.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include <unistd.h>

#include "covgeom/error.h"

namespace covgeom::cli {
namespace {

std::string Location(const std::string& origin, std::size_t line, std::size_t column) {
  std::string loc = origin;
  if (line > 0) loc += ":" + std::to_string(line);
  if (column > 0) loc += ":" + std::to_string(column);
  return loc;
}

bool IsSpace(char c) { return c == ' ' || c == '\t' || c == '\r'; }

struct Cell {
  double value;
  std::size_t line;
  std::size_t column;
};

}  // namespace

ParseError::ParseError(std::string origin, std::size_t line, std::size_t column,
                       const std::string& detail)
    : std::runtime_error(Location(origin, line, column) + ": " + detail),
      origin_(std::move(origin)),
      line_(line),
      column_(column) {}

Matrix ParseMatrix(std::string_view text, const std::string& origin) {
  std::vector<std::vector<Cell>> rows;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;

    std::size_t first = 0;
    while (first < line.size() && IsSpace(line[first])) ++first;
    if (first == line.size() || line[first] == '#') {
      if (end == text.size()) break;
      continue;
    }

    std::vector<Cell> row;
    std::size_t field = 0;
    while (true) {
      std::size_t stop = line.find(',', field);
      if (stop == std::string_view::npos) stop = line.size();
      std::size_t a = field;
      std::size_t b = stop;
      while (a < b && IsSpace(line[a])) ++a;
      while (b > a && IsSpace(line[b - 1])) --b;
      const std::size_t column = a + 1;
      if (a == b) throw ParseError(origin, line_no, column, "empty field");
      // from_chars rejects a leading '+'; accept it as the C locale would.
      std::size_t num = a;
      if (line[num] == '+') ++num;
      double value = 0.0;
      const char* lo = line.data() + num;
      const char* hi = line.data() + b;
      const auto [ptr, ec] = std::from_chars(lo, hi, value);
      if (ec == std::errc::result_out_of_range) {
        throw ParseError(origin, line_no, column, "number out of range");
      }
      if (ec != std::errc() || ptr != hi) {
        throw ParseError(origin, line_no, column,
                         "not a number: '" + std::string(line.substr(a, b - a)) + "'");
      }
      if (!std::isfinite(value)) throw ParseError(origin, line_no, column, "non-finite value");
      row.push_back({value, line_no, column});
      if (stop == line.size()) break;
      field = stop + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError(origin, line_no, 0,
                       "row has " + std::to_string(row.size()) + " entries, expected " +
                           std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
    if (end == text.size()) break;
  }

  if (rows.empty()) throw ParseError(origin, 0, 0, "no matrix rows");
  const std::size_t n = rows.size();
  if (rows.front().size() != n) {
    throw ParseError(origin, 0, 0,
                     "matrix is " + std::to_string(n) + "x" +
                         std::to_string(rows.front().size()) + ", expected square");
  }

  Matrix m(static_cast<Index>(n), static_cast<Index>(n));
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j].value;
      scale = std::max(scale, std::abs(rows[i][j].value));
    }
  }
  const double tol = 1e-9 * scale;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(rows[i][j].value - rows[j][i].value) > tol) {
        const Cell& c = rows[i][j];
        throw ParseError(origin, c.line, c.column,
                         "entry (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                             ") differs from its transpose by more than 1e-9 max|entry|");
      }
    }
  }
  return SymMatrix(m).matrix();
}

Matrix ReadMatrixFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), 0, 0, "cannot open file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return ParseMatrix(buffer.str(), path.string());
}

std::string ErrorDetail(const Error& e) {
  std::string detail = e.what();
  const std::string prefix = std::string(ToString(e.code())) + ": ";
  if (detail.rfind(prefix, 0) == 0) detail.erase(0, prefix.size());
  return detail;
}

Covariance ReadCovariance(const std::filesystem::path& path) {
  const Matrix m = ReadMatrixFile(path);
  try {
    return make_covariance(m);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + ErrorDetail(e));
  }
}

std::string FormatDouble(double v) {
  char buf[40];
  const auto [ptr, ec] =
      std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  (void)ec;
  return std::string(buf, ptr);
}

std::string FormatMatrix(const Matrix& m) {
  std::string out;
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out += ',';
      out += FormatDouble(m(i, j));
    }
    out += '\n';
  }
  return out;
}

void WriteFileAtomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void WriteMatrixFile(const std::filesystem::path& path, const Matrix& m) {
  WriteFileAtomic(path, FormatMatrix(m));
}

}  // namespace covgeom::cli
