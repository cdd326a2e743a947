#include "covgeom_cli/report.h"

#include <cmath>

#include "covgeom/covgeom.h"
#include "covgeom_cli/matrix_io.h"

namespace covgeom::cli {
namespace {

void Emit(const Json& v, int depth, std::string& out) {
  const std::string pad(2 * static_cast<std::size_t>(depth + 1), ' ');
  const std::string close(2 * static_cast<std::size_t>(depth), ' ');
  switch (v.type()) {
    case Json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [key, item] : v.items()) {
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(key).dump() + ": ";
        Emit(item, depth + 1, out);
      }
      out += "\n" + close + "}";
      return;
    }
    case Json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line so matrices read as rows.
      bool flat = true;
      for (const auto& item : v) flat = flat && !item.is_structured();
      if (flat) {
        out += "[";
        for (std::size_t k = 0; k < v.size(); ++k) {
          if (k > 0) out += ", ";
          Emit(v[k], depth + 1, out);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t k = 0; k < v.size(); ++k) {
        if (k > 0) out += ",\n";
        out += pad;
        Emit(v[k], depth + 1, out);
      }
      out += "\n" + close + "]";
      return;
    }
    case Json::value_t::number_float: {
      const double x = v.get<double>();
      out += std::isfinite(x) ? FormatDouble(x) : "null";
      return;
    }
    default:
      out += v.dump();
  }
}

}  // namespace

std::string Serialize(const Json& value) {
  std::string out;
  Emit(value, 0, out);
  out += "\n";
  return out;
}

std::string Serialize(const Report& report) {
  Json doc = Json::object();
  doc["command"] = report.command;
  doc["inputs"] = report.inputs;
  doc["results"] = report.results;
  doc["diagnostics"] = report.diagnostics;
  doc["version"] = kVersion;
  return Serialize(doc);
}

Json ToJson(const Matrix& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json ToJson(const std::vector<double>& v) { return Json(v); }

}  // namespace covgeom::cli
