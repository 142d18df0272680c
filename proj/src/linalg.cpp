#include "ndjac/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/LU>
#include <Eigen/SVD>

namespace ndjac {

void require_same_kind(const Mat& a, const Mat& b, const char* what) {
  if (a.kind() != b.kind()) throw Error(Errc::TagMismatch, std::string(what) + ": algebra tags differ");
}

void require_associative(Algebra kind, const char* what) {
  if (kind == Algebra::Octonion) {
    throw Error(Errc::UnsupportedAlgebra, std::string(what) + " is not available for octonions");
  }
}

Mat::Mat(Algebra kind, std::size_t rows, std::size_t cols)
    : kind_(kind), rows_(rows), cols_(cols), data_(rows * cols * static_cast<std::size_t>(ndjac::beta(kind)), 0.0) {}

Mat Mat::identity(Algebra kind, std::size_t n) {
  Mat out(kind, n, n);
  for (std::size_t i = 0; i < n; ++i) out.entry(i, i)[0] = 1.0;
  return out;
}

Mat Mat::diagonal(Algebra kind, std::span<const double> values) {
  Mat out(kind, values.size(), values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out.entry(i, i)[0] = values[i];
  return out;
}

Scalar Mat::operator()(std::size_t i, std::size_t j) const { return Scalar(kind_, entry(i, j)); }

void Mat::set(std::size_t i, std::size_t j, const Scalar& value) {
  if (value.kind() != kind_) throw Error(Errc::TagMismatch, "matrix entry from another algebra");
  std::ranges::copy(value.coeffs(), entry(i, j).begin());
}

Mat Mat::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
  if (r0 + nr > rows_ || c0 + nc > cols_) throw Error(Errc::ShapeMismatch, "block out of range");
  Mat out(kind_, nr, nc);
  for (std::size_t i = 0; i < nr; ++i) {
    for (std::size_t j = 0; j < nc; ++j) std::ranges::copy(entry(r0 + i, c0 + j), out.entry(i, j).begin());
  }
  return out;
}

void Mat::set_block(std::size_t r0, std::size_t c0, const Mat& b) {
  require_same_kind(*this, b, "set_block");
  if (r0 + b.rows_ > rows_ || c0 + b.cols_ > cols_) throw Error(Errc::ShapeMismatch, "block out of range");
  for (std::size_t i = 0; i < b.rows_; ++i) {
    for (std::size_t j = 0; j < b.cols_; ++j) std::ranges::copy(b.entry(i, j), entry(r0 + i, c0 + j).begin());
  }
}

Mat& Mat::operator+=(const Mat& other) {
  require_same_kind(*this, other, "addition");
  if (rows_ != other.rows_ || cols_ != other.cols_) throw Error(Errc::ShapeMismatch, "addition shapes differ");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

Mat& Mat::operator-=(const Mat& other) {
  require_same_kind(*this, other, "subtraction");
  if (rows_ != other.rows_ || cols_ != other.cols_) throw Error(Errc::ShapeMismatch, "subtraction shapes differ");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
  return *this;
}

Mat& Mat::operator*=(double s) noexcept {
  for (double& v : data_) v *= s;
  return *this;
}

double Mat::frobenius_norm() const noexcept {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return std::sqrt(s);
}

Mat operator+(Mat a, const Mat& b) { return a += b; }
Mat operator-(Mat a, const Mat& b) { return a -= b; }
Mat operator*(double s, Mat a) noexcept { return a *= s; }

Mat matmul(const Mat& a, const Mat& b) {
  require_same_kind(a, b, "matmul");
  if (a.cols() != b.rows()) {
    throw Error(Errc::ShapeMismatch, "matmul: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                                         " times " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
  const int bt = a.beta();
  Mat c(a.kind(), a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double* out = c.entry(i, j).data();
      for (std::size_t k = 0; k < a.cols(); ++k) detail::cd_mul_add(bt, a.entry(i, k).data(), b.entry(k, j).data(), out);
    }
  }
  return c;
}

Mat operator*(const Mat& a, const Mat& b) { return matmul(a, b); }

Mat conj_transpose(const Mat& a) {
  Mat out(a.kind(), a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      auto src = a.entry(i, j);
      auto dst = out.entry(j, i);
      dst[0] = src[0];
      for (std::size_t k = 1; k < src.size(); ++k) dst[k] = -src[k];
    }
  }
  return out;
}

Mat scale_columns(const Mat& a, std::span<const double> d) {
  if (d.size() != a.cols()) throw Error(Errc::ShapeMismatch, "scale_columns: diagonal length");
  Mat out = a;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      for (double& v : out.entry(i, j)) v *= d[j];
    }
  }
  return out;
}

Eigen::MatrixXd real_embed(const Mat& a) {
  require_associative(a.kind(), "real_embed");
  const int bt = a.beta();
  Eigen::MatrixXd e(a.rows() * bt, a.cols() * bt);
  double basis[8];
  double col[8];
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const double* aij = a.entry(i, j).data();
      for (int k = 0; k < bt; ++k) {
        std::fill(basis, basis + bt, 0.0);
        basis[k] = 1.0;
        detail::cd_mul(bt, aij, basis, col);
        for (int r = 0; r < bt; ++r) e(static_cast<Eigen::Index>(i * bt + r), static_cast<Eigen::Index>(j * bt + k)) = col[r];
      }
    }
  }
  return e;
}

Mat fold_embedding(Algebra kind, const Eigen::MatrixXd& e) {
  const auto bt = static_cast<Eigen::Index>(beta(kind));
  if (e.rows() % bt != 0 || e.cols() % bt != 0) throw Error(Errc::ShapeMismatch, "fold_embedding: size not a multiple of beta");
  Mat out(kind, static_cast<std::size_t>(e.rows() / bt), static_cast<std::size_t>(e.cols() / bt));
  for (std::size_t i = 0; i < out.rows(); ++i) {
    for (std::size_t j = 0; j < out.cols(); ++j) {
      auto dst = out.entry(i, j);
      for (Eigen::Index r = 0; r < bt; ++r) dst[static_cast<std::size_t>(r)] = e(static_cast<Eigen::Index>(i) * bt + r, static_cast<Eigen::Index>(j) * bt);
    }
  }
  return out;
}

Eigen::VectorXd to_real_vector(const Mat& column) {
  if (column.cols() != 1) throw Error(Errc::ShapeMismatch, "to_real_vector expects a column");
  auto d = column.data();
  return Eigen::Map<const Eigen::VectorXd>(d.data(), static_cast<Eigen::Index>(d.size()));
}

Mat from_real_vector(Algebra kind, const Eigen::Ref<const Eigen::VectorXd>& v) {
  const auto bt = static_cast<Eigen::Index>(beta(kind));
  if (v.size() % bt != 0) throw Error(Errc::ShapeMismatch, "from_real_vector: size not a multiple of beta");
  Mat out(kind, static_cast<std::size_t>(v.size() / bt), 1);
  auto d = out.data();
  for (Eigen::Index k = 0; k < v.size(); ++k) d[static_cast<std::size_t>(k)] = v(k);
  return out;
}

namespace {

void require_square(const Mat& a, const char* what) {
  if (a.rows() != a.cols()) throw Error(Errc::ShapeMismatch, std::string(what) + " needs a square matrix");
}

}  // namespace

double log_sdet(const Mat& a) {
  require_square(a, "sdet");
  require_associative(a.kind(), "sdet");
  if (a.rows() == 0) return 0.0;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(real_embed(a));
  const Eigen::MatrixXd& lu_m = lu.matrixLU();
  double s = 0.0;
  for (Eigen::Index k = 0; k < lu_m.rows(); ++k) s += std::log(std::abs(lu_m(k, k)));
  return s / a.beta();
}

double sdet(const Mat& a) { return std::exp(log_sdet(a)); }

std::size_t numerical_rank(const Mat& a, double tol) {
  require_associative(a.kind(), "numerical_rank");
  if (a.empty()) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(real_embed(a));
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  std::size_t count = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    if (sv(k) > tol * sv(0)) ++count;
  }
  const auto bt = static_cast<std::size_t>(a.beta());
  if (count % bt != 0) {
    throw Error(Errc::InternalConsistency, "embedded singular values do not come in multiplets of beta");
  }
  return count / bt;
}

Mat inverse(const Mat& a) {
  require_square(a, "inverse");
  require_associative(a.kind(), "inverse");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(real_embed(a));
  if (!lu.isInvertible()) throw Error(Errc::DivisionByZero, "matrix is singular");
  return fold_embedding(a.kind(), lu.inverse());
}

double hermitian_defect(const Mat& a) {
  if (a.rows() != a.cols()) return std::numeric_limits<double>::infinity();
  return max_abs_diff(a, conj_transpose(a));
}

double max_abs_diff(const Mat& a, const Mat& b) {
  require_same_kind(a, b, "max_abs_diff");
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw Error(Errc::ShapeMismatch, "max_abs_diff shapes differ");
  double m = 0.0;
  auto x = a.data();
  auto y = b.data();
  for (std::size_t k = 0; k < x.size(); ++k) m = std::max(m, std::abs(x[k] - y[k]));
  return m;
}

Mat permute(const Mat& a, std::span<const std::size_t> rows, std::span<const std::size_t> cols) {
  if (rows.size() != a.rows() || cols.size() != a.cols()) throw Error(Errc::ShapeMismatch, "permutation size");
  Mat out(a.kind(), a.rows(), a.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) std::ranges::copy(a.entry(rows[i], cols[j]), out.entry(i, j).begin());
  }
  return out;
}

Mat unpermute(const Mat& a, std::span<const std::size_t> rows, std::span<const std::size_t> cols) {
  if (rows.size() != a.rows() || cols.size() != a.cols()) throw Error(Errc::ShapeMismatch, "permutation size");
  Mat out(a.kind(), a.rows(), a.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) std::ranges::copy(a.entry(i, j), out.entry(rows[i], cols[j]).begin());
  }
  return out;
}

}  // namespace ndjac
