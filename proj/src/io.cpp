#include "ndjac/io.hpp"

#include <fstream>
#include <vector>

namespace ndjac {

nlohmann::json matrix_to_json(const Mat& a) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t j = 0; j < a.cols(); ++j) {
      auto e = a.entry(i, j);
      row.push_back(std::vector<double>(e.begin(), e.end()));
    }
    rows.push_back(std::move(row));
  }
  return {{"beta", a.beta()}, {"rows", a.rows()}, {"cols", a.cols()}, {"entries", std::move(rows)}};
}

Mat matrix_from_json(const nlohmann::json& j) {
  try {
    const Algebra kind = algebra_from_beta(j.at("beta").get<int>());
    const auto rows = j.at("rows").get<std::size_t>();
    const auto cols = j.at("cols").get<std::size_t>();
    const auto& entries = j.at("entries");
    if (!entries.is_array() || entries.size() != rows) throw Error(Errc::Io, "matrix file: wrong number of rows");
    Mat out(kind, rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
      if (!entries[i].is_array() || entries[i].size() != cols) {
        throw Error(Errc::Io, "matrix file: row " + std::to_string(i) + " has the wrong length");
      }
      for (std::size_t jj = 0; jj < cols; ++jj) {
        const auto c = entries[i][jj].get<std::vector<double>>();
        out.set(i, jj, Scalar(kind, c));
      }
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::Io, std::string("matrix file: ") + e.what());
  }
}

Mat read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::Io, path + ": " + e.what());
  }
  return matrix_from_json(j);
}

void write_matrix_file(const std::string& path, const Mat& a) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::Io, "cannot write " + path);
  out << matrix_to_json(a).dump(2) << '\n';
}

}  // namespace ndjac
