#pragma once

#include <vector>

#include "ndjac/linalg.hpp"
#include "ndjac/random.hpp"

namespace testing_util {

inline ndjac::Scalar random_scalar(ndjac::Algebra kind, ndjac::Rng& rng) {
  ndjac::Scalar s(kind);
  for (int k = 0; k < s.beta(); ++k) s[k] = ndjac::standard_normal(rng);
  return s;
}

inline ndjac::Scalar make(ndjac::Algebra kind, std::vector<double> c) { return ndjac::Scalar(kind, c); }

// Real matrix from nested rows.
inline ndjac::Mat real_mat(std::vector<std::vector<double>> rows) {
  ndjac::Mat a(ndjac::Algebra::Real, rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) a.entry(i, j)[0] = rows[i][j];
  }
  return a;
}

// A random rank-q n x m product P Q*.
inline ndjac::Mat random_rank(ndjac::Algebra kind, std::size_t n, std::size_t m, std::size_t q, ndjac::Rng& rng) {
  const auto p = ndjac::gaussian_matrix(kind, n, q, rng);
  const auto r = ndjac::gaussian_matrix(kind, m, q, rng);
  return ndjac::matmul(p, ndjac::conj_transpose(r));
}

inline ndjac::Mat random_psd(ndjac::Algebra kind, std::size_t m, std::size_t q, ndjac::Rng& rng) {
  const auto p = ndjac::gaussian_matrix(kind, m, q, rng);
  const auto s = ndjac::matmul(p, ndjac::conj_transpose(p));
  return 0.5 * (s + ndjac::conj_transpose(s));
}

}  // namespace testing_util
