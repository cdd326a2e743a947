#include "covgeom_cli/manifest.h"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "covgeom/error.h"
#include "covgeom_cli/matrix_io.h"

namespace covgeom::cli {

Manifest ReadManifest(const std::filesystem::path& path) {
  const std::string origin = path.string();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(origin, 0, 0, "cannot open file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // Convert the byte offset into line and column.
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
      if (text[k] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ParseError(origin, line, column, "invalid JSON");
  }

  if (!doc.is_object()) throw ParseError(origin, 0, 0, "manifest must be a JSON object");
  const auto ops = doc.find("operators");
  if (ops == doc.end() || !ops->is_array()) {
    throw ParseError(origin, 0, 0, "missing 'operators' array");
  }
  Manifest m;
  m.source = path;
  const std::filesystem::path base = path.parent_path();
  for (const auto& item : *ops) {
    if (!item.is_string()) throw ParseError(origin, 0, 0, "'operators' entries must be strings");
    const std::filesystem::path p = item.get<std::string>();
    m.operators.push_back(p.is_absolute() ? p : base / p);
  }
  if (const auto labels = doc.find("labels"); labels != doc.end()) {
    if (!labels->is_array()) throw ParseError(origin, 0, 0, "'labels' must be an array");
    for (const auto& item : *labels) {
      if (!item.is_string()) throw ParseError(origin, 0, 0, "'labels' entries must be strings");
      m.labels.push_back(item.get<std::string>());
    }
    if (m.labels.size() != m.operators.size()) {
      throw ParseError(origin, 0, 0, "'labels' and 'operators' differ in length");
    }
  }
  if (m.operators.empty()) throw ParseError(origin, 0, 0, "'operators' is empty");
  return m;
}

std::vector<Covariance> LoadFamily(const Manifest& manifest) {
  std::vector<Covariance> family;
  family.reserve(manifest.operators.size());
  for (std::size_t i = 0; i < manifest.operators.size(); ++i) {
    family.push_back(ReadCovariance(manifest.operators[i]));
    if (family[i].dim() != family[0].dim()) {
      throw Error(ErrorCode::kDimMismatch,
                  manifest.operators[i].string() + " has dimension " +
                      std::to_string(family[i].dim()) + " but " +
                      manifest.operators[0].string() + " has dimension " +
                      std::to_string(family[0].dim()));
    }
  }
  return family;
}

std::string FormatManifest(const std::vector<std::string>& operators,
                           const std::vector<std::string>& labels) {
  nlohmann::json doc;
  doc["operators"] = operators;
  if (!labels.empty()) doc["labels"] = labels;
  return doc.dump(2) + "\n";
}

}  // namespace covgeom::cli
