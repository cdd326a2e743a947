#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "covgeom/spectral.h"

namespace covgeom::cli {

using Json = nlohmann::json;

struct Report {
  std::string command;
  Json inputs = Json::object();
  Json results = Json::object();
  Json diagnostics = Json::object();
};

/// Deterministic text: keys sorted, two-space indent, floats with 17
/// significant digits, non-finite floats as null.
std::string Serialize(const Json& value);
std::string Serialize(const Report& report);

Json ToJson(const Matrix& m);
Json ToJson(const std::vector<double>& v);

}  // namespace covgeom::cli
