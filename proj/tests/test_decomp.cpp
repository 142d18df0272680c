#include <cmath>
#include <functional>

#include <doctest.h>

#include "helpers.hpp"
#include "ndjac/decomp.hpp"

using namespace ndjac;
using testing_util::random_psd;
using testing_util::random_rank;
using testing_util::real_mat;

namespace {

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an exception");
  return Errc::Io;
}

double rel_residual(const Mat& a, const Mat& b) { return (a - b).frobenius_norm() / std::max(1.0, b.frobenius_norm()); }

Mat orthonormal(Algebra kind, std::size_t n, std::size_t q, Rng& rng) {
  return qr_positive(gaussian_matrix(kind, n, q, rng), q).h1;
}

}  // namespace

TEST_CASE("spectral decomposition examples") {
  const auto e = eig_hermitian(real_mat({{3, 0}, {0, 1}}), 2);
  CHECK(e.lambda[0] == doctest::Approx(3.0));
  CHECK(e.lambda[1] == doctest::Approx(1.0));
  CHECK(max_abs_diff(e.w1, Mat::identity(Algebra::Real, 2)) < 1e-12);

  const double r = 1.0 / std::sqrt(2.0);
  const Mat w = real_mat({{r}, {r}});
  const auto e1 = eig_hermitian(2.0 * matmul(w, conj_transpose(w)), 1);
  CHECK(e1.lambda[0] == doctest::Approx(2.0));
  CHECK(max_abs_diff(e1.w1, w) < 1e-12);
}

TEST_CASE("quaternion spectral round trip") {
  Rng rng = substream(21, 0, 0);
  const Mat w = orthonormal(Algebra::Quaternion, 4, 3, rng);
  const std::vector<double> lam{5.0, 2.5, 0.75};
  const Mat s = matmul(scale_columns(w, lam), conj_transpose(w));
  const auto e = eig_hermitian(0.5 * (s + conj_transpose(s)), 3);
  for (int i = 0; i < 3; ++i) CHECK(std::abs(e.lambda[i] - lam[i]) < 1e-9);
  CHECK(rel_residual(matmul(scale_columns(e.w1, e.lambda), conj_transpose(e.w1)), s) < 1e-9);
  CHECK(hermitian_eigenvalues(s).size() == 4);
}

TEST_CASE("spectral decomposition errors") {
  CHECK(code_of([] { eig_hermitian(Mat::identity(Algebra::Real, 2), 2); }) == Errc::DegenerateSpectrum);
  CHECK(code_of([] { eig_hermitian(real_mat({{1, 0}, {0, -1}}), 2); }) == Errc::NotPsd);
  CHECK(code_of([] { eig_hermitian(real_mat({{1, 2}, {0, 1}}), 2); }) == Errc::InvalidInput);
}

TEST_CASE("singular value examples") {
  const auto s = svd_rank_q(real_mat({{2, 0}, {0, 1}}), 2);
  CHECK(s.d[0] == doctest::Approx(2.0));
  CHECK(s.d[1] == doctest::Approx(1.0));
  const auto v = svd_rank_q(real_mat({{3}, {4}}), 1);
  CHECK(v.d[0] == doctest::Approx(5.0));
  CHECK(code_of([] { svd_rank_q(Mat::identity(Algebra::Complex, 2), 2); }) == Errc::DegenerateSpectrum);

  Rng rng = substream(22, 0, 0);
  for (auto k : {Algebra::Real, Algebra::Complex, Algebra::Quaternion}) {
    const Mat x = random_rank(k, 4, 3, 2, rng);
    const auto sv = svd_rank_q(x, 2);
    const auto ev = eig_hermitian(0.5 * (matmul(conj_transpose(x), x) + matmul(conj_transpose(x), x)), 2);
    for (int i = 0; i < 2; ++i) CHECK(std::abs(sv.d[i] - std::sqrt(ev.lambda[i])) < 1e-9);
  }
}

TEST_CASE("QR examples") {
  const auto f = qr_positive(real_mat({{0}, {5}}), 1);
  CHECK(f.t(0, 0).re() == doctest::Approx(5.0));
  CHECK(max_abs_diff(f.h1, real_mat({{0}, {1}})) < 1e-15);

  Rng rng = substream(23, 0, 0);
  const Mat h = orthonormal(Algebra::Complex, 3, 2, rng);
  Mat t(Algebra::Complex, 2, 2);
  t.entry(0, 0)[0] = 2.0;
  t.entry(0, 1)[0] = 0.5;
  t.entry(0, 1)[1] = -1.0;
  t.entry(1, 1)[0] = 1.5;
  const auto g = qr_positive(matmul(h, t), 2);
  CHECK(max_abs_diff(g.h1, h) < 1e-9);
  CHECK(max_abs_diff(g.t, t) < 1e-9);

  const Mat x = gaussian_matrix(Algebra::Complex, 3, 2, rng);
  const auto q = qr_positive(x, 2);
  CHECK((x - matmul(q.h1, q.t)).frobenius_norm() <= 1e-9 * x.frobenius_norm());
  CHECK(code_of([] { qr_positive(real_mat({{0, 1}, {0, 1}}), 1); }) == Errc::PivotRequired);
}

TEST_CASE("Cholesky examples") {
  CHECK(cholesky_rank_q(real_mat({{4}}), 1)(0, 0).re() == doctest::Approx(2.0));
  const Mat t = cholesky_rank_q(real_mat({{1, 1}, {1, 1}}), 1);
  CHECK(t(0, 0).re() == doctest::Approx(1.0));
  CHECK(t(0, 1).re() == doctest::Approx(1.0));

  Rng rng = substream(24, 0, 0);
  Mat t0(Algebra::Quaternion, 2, 3);
  for (std::size_t i = 0; i < 2; ++i) {
    t0.entry(i, i)[0] = 1.0 + uniform(rng, 0.0, 1.0);
    for (std::size_t j = i + 1; j < 3; ++j) {
      for (double& v : t0.entry(i, j)) v = standard_normal(rng);
    }
  }
  const Mat s = matmul(conj_transpose(t0), t0);
  CHECK(max_abs_diff(cholesky_rank_q(0.5 * (s + conj_transpose(s)), 2), t0) < 1e-9);
  CHECK(code_of([] { cholesky_rank_q(real_mat({{0, 0}, {0, 1}}), 1); }) == Errc::PivotRequired);
}

TEST_CASE("pseudo-inverse") {
  Rng rng = substream(25, 0, 0);
  const Mat a = gaussian_matrix(Algebra::Quaternion, 3, 3, rng);
  CHECK(max_abs_diff(matmul(a, pinv(a)), Mat::identity(Algebra::Quaternion, 3)) < 1e-10);
  const Mat v = pinv(real_mat({{3}, {4}}));
  CHECK(v(0, 0).re() == doctest::Approx(3.0 / 25));
  CHECK(v(0, 1).re() == doctest::Approx(4.0 / 25));

  const Mat w = orthonormal(Algebra::Complex, 4, 2, rng);
  const std::vector<double> lam{3.0, 0.5}, inv_lam{1 / 3.0, 2.0};
  const Mat s = matmul(scale_columns(w, lam), conj_transpose(w));
  CHECK(max_abs_diff(pinv(s, 2), matmul(scale_columns(w, inv_lam), conj_transpose(w))) < 1e-9);
}

TEST_CASE("Penrose conditions on random low-rank matrices") {
  Rng rng = substream(26, 0, 0);
  for (auto k : {Algebra::Real, Algebra::Complex, Algebra::Quaternion}) {
    for (std::size_t q = 1; q <= 3; ++q) {
      const Mat x = random_rank(k, 5, 4, q, rng);
      const Mat y = pinv(x);
      const double sx = x.frobenius_norm(), sy = y.frobenius_norm();
      CHECK((matmul(matmul(x, y), x) - x).frobenius_norm() <= 1e-10 * sx);
      CHECK((matmul(matmul(y, x), y) - y).frobenius_norm() <= 1e-10 * sy);
      CHECK(hermitian_defect(matmul(x, y)) < 1e-10);
      CHECK(hermitian_defect(matmul(y, x)) < 1e-10);
    }
  }
}

TEST_CASE("phase convention makes the largest entry real positive") {
  Rng rng = substream(27, 0, 0);
  Mat a = gaussian_matrix(Algebra::Quaternion, 3, 1, rng);
  phase_fix_column(a, 0);
  std::size_t best = 0;
  for (std::size_t i = 1; i < 3; ++i) {
    if (norm(a(i, 0)) > norm(a(best, 0)) + 1e-9) best = i;
  }
  CHECK(a(best, 0).re() > 0.0);
  for (int c = 1; c < 4; ++c) CHECK(std::abs(a(best, 0)[c]) < 1e-12);
}

TEST_CASE("psd helper is PSD of the requested rank") {
  Rng rng = substream(28, 0, 0);
  const Mat s = random_psd(Algebra::Complex, 4, 2, rng);
  const auto ev = hermitian_eigenvalues(s);
  CHECK(ev[1] > 1e-6);
  CHECK(std::abs(ev[2]) < 1e-10 * ev[0]);
}
