#pragma once

#include <string>

#include <json.hpp>

#include "ndjac/linalg.hpp"

namespace ndjac {

/// {"beta": int, "rows": int, "cols": int, "entries": [[[c0, ...], ...], ...]}
nlohmann::json matrix_to_json(const Mat& a);
Mat matrix_from_json(const nlohmann::json& j);

Mat read_matrix_file(const std::string& path);
void write_matrix_file(const std::string& path, const Mat& a);

}  // namespace ndjac
