#include "ndjac/decomp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace ndjac {
namespace {

// Collapses a descending list of embedded values into one value per
// beta-multiplet.
std::vector<double> collapse_multiplets(const Eigen::VectorXd& values, int bt, double tol) {
  const auto count = static_cast<std::size_t>(values.size() / bt);
  double scale = 0.0;
  for (Eigen::Index k = 0; k < values.size(); ++k) scale = std::max(scale, std::abs(values(k)));
  std::vector<double> out(count);
  for (std::size_t g = 0; g < count; ++g) {
    double lo = values(static_cast<Eigen::Index>(g) * bt);
    double hi = lo;
    double sum = 0.0;
    for (int r = 0; r < bt; ++r) {
      const double v = values(static_cast<Eigen::Index>(g) * bt + r);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      sum += v;
    }
    if (tol >= 0.0 && hi - lo > tol * std::max(scale, 1e-300)) {
      throw Error(Errc::InternalConsistency, "embedded spectrum is not a union of beta-multiplets");
    }
    out[g] = sum / bt;
  }
  return out;
}

void check_retained(const std::vector<double>& values, std::size_t q, const SpectralOptions& opts, const char* what) {
  double scale = 0.0;
  for (double v : values) scale = std::max(scale, std::abs(v));
  if (q == 0) {
    if (scale != 0.0 && values.front() > opts.rank_tol * scale) {
      throw Error(Errc::InvalidInput, std::string(what) + ": matrix has rank above 0");
    }
    return;
  }
  if (scale == 0.0) throw Error(Errc::DegenerateSpectrum, std::string(what) + ": zero matrix");
  for (std::size_t i = q; i < values.size(); ++i) {
    if (std::abs(values[i]) > opts.rank_tol * scale) {
      throw Error(Errc::InvalidInput, std::string(what) + ": numerical rank exceeds q = " + std::to_string(q));
    }
  }
  if (values[q - 1] <= opts.gap_tol * scale) {
    throw Error(Errc::DegenerateSpectrum, std::string(what) + ": fewer than q clearly positive values");
  }
  for (std::size_t i = 0; i + 1 < q; ++i) {
    if (values[i] - values[i + 1] < opts.gap_tol * scale) {
      throw Error(Errc::DegenerateSpectrum, std::string(what) + ": repeated values in the retained spectrum");
    }
  }
}

Eigen::VectorXd reversed(const Eigen::VectorXd& v) { return v.reverse(); }

}  // namespace

void phase_fix_column(Mat& a, std::size_t j) {
  double best = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) best = std::max(best, norm(a(i, j)));
  if (best == 0.0) return;
  std::size_t pick = 0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    if (norm(a(i, j)) >= best * (1.0 - 1e-9)) {
      pick = i;
      break;
    }
  }
  const Scalar lead = a(pick, j);
  const Scalar phase = conj(lead) * (1.0 / norm(lead));
  for (std::size_t i = 0; i < a.rows(); ++i) a.set(i, j, a(i, j) * phase);
  // exact zeros in the imaginary part of the pivot entry
  auto e = a.entry(pick, j);
  for (std::size_t k = 1; k < e.size(); ++k) e[k] = 0.0;
}

std::vector<double> hermitian_eigenvalues(const Mat& s) {
  require_associative(s.kind(), "hermitian_eigenvalues");
  if (s.rows() != s.cols()) throw Error(Errc::ShapeMismatch, "hermitian_eigenvalues needs a square matrix");
  if (s.empty()) return {};
  Eigen::MatrixXd e = real_embed(s);
  e = 0.5 * (e + e.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(e, Eigen::EigenvaluesOnly);
  return collapse_multiplets(reversed(solver.eigenvalues()), s.beta(), -1.0);
}

std::vector<double> singular_values(const Mat& x) {
  require_associative(x.kind(), "singular_values");
  if (x.empty()) return {};
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(real_embed(x));
  return collapse_multiplets(svd.singularValues(), x.beta(), -1.0);
}

EigParts eig_hermitian(const Mat& s, std::size_t q, const SpectralOptions& opts) {
  require_associative(s.kind(), "eig_hermitian");
  if (s.rows() != s.cols()) throw Error(Errc::ShapeMismatch, "eig_hermitian needs a square matrix");
  const std::size_t m = s.rows();
  if (q > m) throw Error(Errc::InvalidInput, "eig_hermitian: q exceeds the matrix size");
  if (hermitian_defect(s) > 1e-10 * std::max(1.0, s.frobenius_norm())) {
    throw Error(Errc::InvalidInput, "eig_hermitian: matrix is not Hermitian");
  }
  EigParts parts{Mat(s.kind(), m, q), {}};
  if (m == 0) return parts;

  const int bt = s.beta();
  Eigen::MatrixXd e = real_embed(s);
  e = 0.5 * (e + e.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(e);
  const Eigen::VectorXd values = reversed(solver.eigenvalues());
  const std::vector<double> groups = collapse_multiplets(values, bt, opts.multiplet_tol);

  double scale = 0.0;
  for (double v : groups) scale = std::max(scale, std::abs(v));
  if (groups.back() < -opts.rank_tol * scale) throw Error(Errc::NotPsd, "eig_hermitian: negative eigenvalue");
  check_retained(groups, q, opts, "eig_hermitian");

  const Eigen::MatrixXd& vecs = solver.eigenvectors();
  const Eigen::Index total = vecs.cols();
  for (std::size_t i = 0; i < q; ++i) {
    // descending position i*beta corresponds to ascending column total-1-i*beta
    const Eigen::Index c = total - 1 - static_cast<Eigen::Index>(i) * bt;
    Mat w = from_real_vector(s.kind(), vecs.col(c));
    w *= 1.0 / w.frobenius_norm();
    parts.w1.set_block(0, i, w);
    phase_fix_column(parts.w1, i);
    parts.lambda.push_back(groups[i]);
  }
  return parts;
}

SvdParts svd_rank_q(const Mat& x, std::size_t q, const SpectralOptions& opts) {
  require_associative(x.kind(), "svd_rank_q");
  const std::size_t n = x.rows();
  const std::size_t m = x.cols();
  if (q > std::min(n, m)) throw Error(Errc::InvalidInput, "svd_rank_q: q exceeds min(n, m)");
  SvdParts parts{Mat(x.kind(), n, q), {}, Mat(x.kind(), m, q)};
  if (x.empty()) return parts;

  const int bt = x.beta();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(real_embed(x), Eigen::ComputeThinV);
  const std::vector<double> groups = collapse_multiplets(svd.singularValues(), bt, opts.multiplet_tol);
  check_retained(groups, q, opts, "svd_rank_q");

  const Eigen::MatrixXd& v = svd.matrixV();
  for (std::size_t i = 0; i < q; ++i) {
    Mat w = from_real_vector(x.kind(), v.col(static_cast<Eigen::Index>(i) * bt));
    w *= 1.0 / w.frobenius_norm();
    parts.w1.set_block(0, i, w);
    phase_fix_column(parts.w1, i);
    Mat u = matmul(x, parts.w1.col(i));
    u *= 1.0 / groups[i];
    parts.v1.set_block(0, i, u);
    parts.d.push_back(groups[i]);
  }
  return parts;
}

QrParts qr_positive(const Mat& x, std::size_t q) {
  require_associative(x.kind(), "qr_positive");
  const std::size_t n = x.rows();
  const std::size_t m = x.cols();
  if (q > std::min(n, m)) throw Error(Errc::InvalidInput, "qr_positive: q exceeds min(n, m)");
  const Algebra kind = x.kind();
  QrParts parts{Mat(kind, n, q), Mat(kind, q, m)};
  const double scale = x.frobenius_norm();

  auto project_out = [&](Mat& v, std::size_t upto, std::size_t col_of_t) {
    for (std::size_t i = 0; i < upto; ++i) {
      const Mat h = parts.h1.col(i);
      Scalar r(kind);
      for (std::size_t k = 0; k < n; ++k) r += conj(h(k, 0)) * v(k, 0);
      for (std::size_t k = 0; k < n; ++k) v.set(k, 0, v(k, 0) - h(k, 0) * r);
      parts.t.set(i, col_of_t, parts.t(i, col_of_t) + r);
    }
  };

  for (std::size_t j = 0; j < q; ++j) {
    Mat v = x.col(j);
    project_out(v, j, j);
    project_out(v, j, j);
    const double len = v.frobenius_norm();
    if (len <= 1e-10 * std::max(scale, 1e-300)) {
      throw Error(Errc::PivotRequired, "qr_positive: leading columns are not independent");
    }
    v *= 1.0 / len;
    parts.h1.set_block(0, j, v);
    parts.t.set(j, j, Scalar::real(kind, len));
  }
  for (std::size_t j = q; j < m; ++j) {
    Mat v = x.col(j);
    project_out(v, q, j);
    project_out(v, q, j);
    if (v.frobenius_norm() > 1e-8 * std::max(scale, 1e-300)) {
      throw Error(Errc::InvalidInput, "qr_positive: numerical rank exceeds q = " + std::to_string(q));
    }
  }
  return parts;
}

Mat cholesky_rank_q(const Mat& s, std::size_t q) {
  require_associative(s.kind(), "cholesky_rank_q");
  if (s.rows() != s.cols()) throw Error(Errc::ShapeMismatch, "cholesky_rank_q needs a square matrix");
  const std::size_t m = s.rows();
  if (q > m) throw Error(Errc::InvalidInput, "cholesky_rank_q: q exceeds the matrix size");
  const double scale = std::max(s.frobenius_norm(), 1e-300);
  if (hermitian_defect(s) > 1e-10 * std::max(1.0, scale)) {
    throw Error(Errc::InvalidInput, "cholesky_rank_q: matrix is not Hermitian");
  }
  const Algebra kind = s.kind();
  Mat t(kind, q, m);
  for (std::size_t i = 0; i < q; ++i) {
    double diag = s(i, i).re();
    for (std::size_t k = 0; k < i; ++k) diag -= norm2(t(k, i));
    if (diag <= 1e-12 * scale) throw Error(Errc::PivotRequired, "cholesky_rank_q: leading block is not positive definite");
    const double tii = std::sqrt(diag);
    t.set(i, i, Scalar::real(kind, tii));
    for (std::size_t j = i + 1; j < m; ++j) {
      Scalar acc = s(i, j);
      for (std::size_t k = 0; k < i; ++k) acc -= conj(t(k, i)) * t(k, j);
      t.set(i, j, acc * (1.0 / tii));
    }
  }
  const Mat residual = s - matmul(conj_transpose(t), t);
  if (residual.frobenius_norm() > 1e-8 * scale) {
    throw Error(Errc::InvalidInput, "cholesky_rank_q: matrix is not PSD of rank q = " + std::to_string(q));
  }
  return t;
}

Mat pinv(const Mat& x, std::size_t q, const SpectralOptions& opts) {
  if (q == 0) return Mat(x.kind(), x.cols(), x.rows());
  const SvdParts parts = svd_rank_q(x, q, opts);
  std::vector<double> inv_d(parts.d.size());
  for (std::size_t i = 0; i < inv_d.size(); ++i) inv_d[i] = 1.0 / parts.d[i];
  return matmul(scale_columns(parts.w1, inv_d), conj_transpose(parts.v1));
}

Mat pinv(const Mat& x) {
  SpectralOptions opts;
  return pinv(x, numerical_rank(x, opts.rank_tol), opts);
}

}  // namespace ndjac
