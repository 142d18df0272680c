#pragma once

#include <cstddef>
#include <vector>

#include "ndjac/linalg.hpp"

namespace ndjac {

struct SpectralOptions {
  /// Minimum separation between consecutive retained values, and minimum
  /// size of the smallest one, relative to the largest.
  double gap_tol = 1e-6;
  /// Discarded values must fall below rank_tol * largest.
  double rank_tol = 1e-9;
  /// Allowed spread inside one beta-multiplet of the real embedding.
  double multiplet_tol = 1e-8;
};

/// Nonsingular part of the SVD, X = V1 diag(d) W1*.
struct SvdParts {
  Mat v1;                 // n x q, V1* V1 = I
  std::vector<double> d;  // strictly decreasing, positive
  Mat w1;                 // m x q, W1* W1 = I
};

/// Nonsingular part of the spectral decomposition, S = W1 diag(lambda) W1*.
struct EigParts {
  Mat w1;
  std::vector<double> lambda;
};

/// X = H1 T with H1* H1 = I and T upper staircase with real positive diagonal.
struct QrParts {
  Mat h1;  // n x q
  Mat t;   // q x m
};

EigParts eig_hermitian(const Mat& s, std::size_t q, const SpectralOptions& opts = {});
SvdParts svd_rank_q(const Mat& x, std::size_t q, const SpectralOptions& opts = {});

/// Gram-Schmidt with one reorthogonalisation pass. The leading q columns
/// must be independent; pivot beforehand otherwise.
QrParts qr_positive(const Mat& x, std::size_t q);

/// S = T* T with T = (T1 T2), T1 upper triangular with positive real
/// diagonal and T2 = T1^{-*} S12.
Mat cholesky_rank_q(const Mat& s, std::size_t q);

Mat pinv(const Mat& x);
Mat pinv(const Mat& x, std::size_t q, const SpectralOptions& opts = {});

/// Right-multiplies column j by the unit scalar that turns its
/// largest-magnitude entry real and positive (lowest row wins near-ties).
void phase_fix_column(Mat& a, std::size_t j);

/// Algebra eigenvalues of a Hermitian matrix, descending, one per multiplet.
std::vector<double> hermitian_eigenvalues(const Mat& s);
/// Algebra singular values, descending, one per multiplet.
std::vector<double> singular_values(const Mat& x);

}  // namespace ndjac
