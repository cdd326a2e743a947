#pragma once
// Family manifests: a JSON object {"operators": [paths...], "labels": [...]}.
// Relative operator paths resolve against the manifest's directory.

#include <filesystem>
#include <string>
#include <vector>

#include "covgeom/spectral.h"

namespace covgeom::cli {

struct Manifest {
  std::filesystem::path source;
  std::vector<std::filesystem::path> operators;
  std::vector<std::string> labels;  // empty or parallel to operators
};

/// Throws ParseError on malformed JSON or schema violations.
Manifest ReadManifest(const std::filesystem::path& path);

/// Loads every operator. Throws DimMismatch naming both files when the
/// dimensions disagree.
std::vector<Covariance> LoadFamily(const Manifest& manifest);

/// Manifest text listing `operators` (already relative to the manifest).
std::string FormatManifest(const std::vector<std::string>& operators,
                           const std::vector<std::string>& labels = {});

}  // namespace covgeom::cli
