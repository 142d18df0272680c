#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "ndjac/algebra.hpp"

namespace ndjac {

/// Dense rows x cols matrix over one division algebra. Entries are stored
/// row-major, each as beta consecutive real coefficients.
class Mat {
 public:
  Mat() = default;
  Mat(Algebra kind, std::size_t rows, std::size_t cols);

  static Mat identity(Algebra kind, std::size_t n);
  /// Real diagonal matrix.
  static Mat diagonal(Algebra kind, std::span<const double> values);

  Algebra kind() const noexcept { return kind_; }
  int beta() const noexcept { return ndjac::beta(kind_); }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }

  Scalar operator()(std::size_t i, std::size_t j) const;
  void set(std::size_t i, std::size_t j, const Scalar& value);

  std::span<double> entry(std::size_t i, std::size_t j) noexcept {
    return {data_.data() + offset(i, j), static_cast<std::size_t>(beta())};
  }
  std::span<const double> entry(std::size_t i, std::size_t j) const noexcept {
    return {data_.data() + offset(i, j), static_cast<std::size_t>(beta())};
  }

  /// All real coefficients, row-major.
  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  Mat block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
  void set_block(std::size_t r0, std::size_t c0, const Mat& b);
  Mat col(std::size_t j) const { return block(0, j, rows_, 1); }

  Mat& operator+=(const Mat& other);
  Mat& operator-=(const Mat& other);
  Mat& operator*=(double s) noexcept;

  double frobenius_norm() const noexcept;

 private:
  std::size_t offset(std::size_t i, std::size_t j) const noexcept {
    return (i * cols_ + j) * static_cast<std::size_t>(beta());
  }

  Algebra kind_ = Algebra::Real;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Mat operator+(Mat a, const Mat& b);
Mat operator-(Mat a, const Mat& b);
Mat operator*(double s, Mat a) noexcept;

/// C_ij = sum_k A_ik B_kj with the scalar products taken in that order.
Mat matmul(const Mat& a, const Mat& b);
Mat operator*(const Mat& a, const Mat& b);

Mat conj_transpose(const Mat& a);

/// A diag(d) for a real diagonal d.
Mat scale_columns(const Mat& a, std::span<const double> d);

/// Block matrix replacing each entry by the beta x beta real matrix of
/// x -> a_ij x. Octonions are rejected (the map is not multiplicative).
Eigen::MatrixXd real_embed(const Mat& a);

/// Inverse of real_embed on its image: reads the first column of each block.
Mat fold_embedding(Algebra kind, const Eigen::MatrixXd& e);

/// Column vectors of F^n are stored in R^{beta n} with this layout.
Eigen::VectorXd to_real_vector(const Mat& column);
Mat from_real_vector(Algebra kind, const Eigen::Ref<const Eigen::VectorXd>& v);

/// |det(real_embed(A))|^(1/beta): |det| over R, the modulus over C, the
/// Study determinant over H.
double sdet(const Mat& a);
double log_sdet(const Mat& a);

/// Count of algebra singular values above tol * (largest).
std::size_t numerical_rank(const Mat& a, double tol = 1e-9);

Mat inverse(const Mat& a);

/// max |A - A*| coefficient.
double hermitian_defect(const Mat& a);

/// Largest absolute coefficient difference (shapes and tags must agree).
double max_abs_diff(const Mat& a, const Mat& b);

/// Rows and columns reordered: out(i, j) = a(rows[i], cols[j]).
Mat permute(const Mat& a, std::span<const std::size_t> rows, std::span<const std::size_t> cols);
/// Inverse of permute.
Mat unpermute(const Mat& a, std::span<const std::size_t> rows, std::span<const std::size_t> cols);

void require_same_kind(const Mat& a, const Mat& b, const char* what);
void require_associative(Algebra kind, const char* what);

}  // namespace ndjac
