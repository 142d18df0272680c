#include <array>
#include <cmath>
#include <numbers>

#include <doctest.h>

#include "ndjac/error.hpp"
#include "ndjac/measures.hpp"

using namespace ndjac;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

Errc code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an exception");
  return Errc::Io;
}

// 2x2 finite-difference determinant of a map R^2 -> R^2
template <class F>
double fd_det2(F f, double x, double y, double h = 1e-6) {
  const auto px = f(x + h, y), mx = f(x - h, y), py = f(x, y + h), my = f(x, y - h);
  const double a = (px[0] - mx[0]) / (2 * h), c = (px[1] - mx[1]) / (2 * h);
  const double b = (py[0] - my[0]) / (2 * h), d = (py[1] - my[1]) / (2 * h);
  return a * d - b * c;
}

}  // namespace

TEST_CASE("tau") {
  CHECK(tau(1, 3) == 0.0);
  CHECK(tau(2, 3) == -3.0);
  CHECK(tau(8, 1) == -4.0);
  CHECK(tau(4, 2) == -4.0);
  CHECK(code_of([] { tau(3, 1); }) == Errc::InvalidInput);
}

TEST_CASE("multivariate gamma") {
  CHECK(mv_gamma_log(1, 1, 0.5) == Approx(std::log(std::sqrt(kPi))));
  CHECK(mv_gamma_log(2, 1, 1.0) == Approx(std::log(kPi)));
  CHECK(mv_gamma_log(2, 4, 3.0) == Approx(std::log(2 * kPi * kPi)));
  CHECK(mv_gamma_log(0, 2, 1.0) == 0.0);

  for (int beta : {1, 2, 4}) {
    for (int m = 2; m <= 4; ++m) {
      const double a = 0.5 * (m - 1) * beta + 0.7;
      const double rec = 0.5 * (m - 1) * beta * std::log(kPi) + std::lgamma(a) + mv_gamma_log(m - 1, beta, a - 0.5 * beta);
      CHECK(mv_gamma_log(m, beta, a) == Approx(rec).epsilon(1e-12));
    }
  }
  CHECK(code_of([] { mv_gamma_log(2, 1, 0.5); }) == Errc::Domain);
}

TEST_CASE("Stiefel volumes") {
  CHECK(stiefel_volume_log(1, 2, 1) == Approx(std::log(2 * kPi)));
  CHECK(stiefel_volume_log(1, 3, 1) == Approx(std::log(4 * kPi)));
  CHECK(stiefel_volume_log(2, 2, 1) == Approx(std::log(4 * kPi)));
  // unit sphere in C^2 = S^3, area 2 pi^2
  CHECK(stiefel_volume_log(1, 2, 2) == Approx(std::log(2 * kPi * kPi)));
  CHECK(code_of([] { stiefel_volume_log(3, 2, 1); }) == Errc::Domain);
}

TEST_CASE("decomposition densities") {
  CHECK(decomposition_density_log(FactorKind::Sd, {.beta = 1, .m = 2, .q = 1, .lambda = {3.0}}) ==
        Approx(std::log(1.5)));

  const double chol = decomposition_density_log(FactorKind::Chol, {.beta = 1, .m = 2, .q = 1, .t_diag = {3.0}});
  CHECK(chol == Approx(std::log(18.0)));
  // (t11, t12) -> (s11, s12) = (t11^2, t11 t12)
  const double fd = fd_det2([](double a, double b) { return std::array{a * a, a * b}; }, 3.0, 0.7);
  CHECK(std::log(std::abs(fd)) == Approx(chol).epsilon(1e-8));

  // polar coordinates: r dr dtheta, with the V_{1,1} mass 2 folded in
  const double svd = decomposition_density_log(FactorKind::Svd, {.beta = 1, .m = 1, .n = 2, .q = 1, .d = {4.0}});
  CHECK(svd == Approx(std::log(2.0)));
  CHECK(svd + std::log(2.0) == Approx(std::log(4.0)));

  CHECK(decomposition_density_log(FactorKind::Qr, {.beta = 2, .m = 2, .n = 3, .q = 2, .t_diag = {2.0, 3.0}}) ==
        Approx(5 * std::log(2.0) + 3 * std::log(3.0)));
}

TEST_CASE("transform factors") {
  CHECK(transform_factor_log(FactorKind::MpHerm, {.beta = 1, .m = 2, .q = 1, .lambda = {2.0}}) ==
        Approx(-4 * std::log(2.0)));

  const double r = std::hypot(0.6, 1.3);
  const double rect = transform_factor_log(FactorKind::MpRect, {.beta = 1, .m = 1, .n = 2, .q = 1, .d = {r}});
  const double fd = fd_det2(
      [](double a, double b) {
        const double s = a * a + b * b;
        return std::array{a / s, b / s};
      },
      0.6, 1.3);
  CHECK(rect == Approx(-4 * std::log(r)));
  CHECK(std::log(std::abs(fd)) == Approx(rect).epsilon(1e-7));

  CHECK(transform_factor_log(FactorKind::CongruenceNs, {.beta = 1, .m = 2, .det_b = 2.0}) == Approx(std::log(8.0)));
}

TEST_CASE("coupling factors") {
  const double s = 2.5;
  // x = sqrt(s), dx/ds = 1 / (2 sqrt(s))
  CHECK(coupling_factor_log(FactorKind::W, {.beta = 1, .m = 1, .n = 1, .q = 1, .lambda = {s}}) ==
        Approx(std::log(0.5 / std::sqrt(s))));
  CHECK(coupling_factor_log(FactorKind::W, {.beta = 1, .m = 2, .n = 2, .q = 0}) == 0.0);

  // exponent beta (n - m + 1) / 2 - 1 vanishes at beta = 2, n = m, leaving 2^-q
  CHECK(coupling_factor_log(FactorKind::CholX, {.beta = 2, .m = 1, .n = 1, .q = 1, .det_s11 = 4.0}) ==
        Approx(std::log(0.5)));
  CHECK(coupling_factor_log(FactorKind::CholX, {.beta = 1, .m = 1, .n = 1, .q = 1, .det_s11 = 4.0}) ==
        Approx(std::log(0.25)));
}

TEST_CASE("homogeneity in the spectrum") {
  const double c = 1.7;
  for (int beta : {1, 2, 4}) {
    const int m = 3, q = 2;
    const FactorInput a{.beta = beta, .m = m, .q = q, .lambda = {2.0, 1.2}};
    const FactorInput b{.beta = beta, .m = m, .q = q, .lambda = {2.0 * c, 1.2 * c}};
    const double shift = transform_factor_log(FactorKind::MpHerm, b) - transform_factor_log(FactorKind::MpHerm, a);
    CHECK(shift == Approx(q * (beta * (-2 * m + q + 1) - 2) * std::log(c)));

    const double sd = decomposition_density_log(FactorKind::Sd, b) - decomposition_density_log(FactorKind::Sd, a);
    // beta (m - q) q from the product, beta q (q - 1) / 2 from the Vandermonde
    CHECK(sd == Approx((beta * (m - q) * q + beta * q * (q - 1) / 2.0) * std::log(c)));
  }
}

TEST_CASE("full-rank congruence factors coincide") {
  for (int beta : {1, 2, 4}) {
    const int m = 3;
    const double det_b = 1.9;
    const std::vector<double> lambda{3.0, 2.0, 0.5};
    // |X| = |B|^2 |Y|; split delta so the product matches
    const double prod = det_b * det_b * 3.0;
    const std::vector<double> delta{prod / 1.5, 1.5, 1.0};
    FactorInput in{.beta = beta, .m = m, .n = m, .q = m, .lambda = lambda, .delta = delta, .det_b = det_b};
    in.det_t1 = prod;
    in.det_l1 = 3.0;
    const double ns = transform_factor_log(FactorKind::CongruenceNs, in);
    CHECK(transform_factor_log(FactorKind::UhligSvd, in) == Approx(ns).epsilon(1e-10));
    CHECK(transform_factor_log(FactorKind::UhligQr, in) == Approx(ns).epsilon(1e-10));
  }
}

TEST_CASE("input validation") {
  CHECK(code_of([] { decomposition_density_log(FactorKind::Sd, {.beta = 1, .m = 3, .q = 2, .lambda = {1.0, 2.0}}); }) ==
        Errc::InvalidInput);
  CHECK(code_of([] { decomposition_density_log(FactorKind::Sd, {.beta = 1, .m = 3, .q = 2, .lambda = {2.0}}); }) ==
        Errc::InvalidInput);
  CHECK(code_of([] { transform_factor_log(FactorKind::CongruenceNs, {.beta = 1, .m = 2}); }) == Errc::InvalidInput);
  CHECK(code_of([] { decomposition_density_log(FactorKind::MpHerm, {}); }) == Errc::InvalidInput);
  CHECK(factor_kind_from_string("uhlig-svd") == FactorKind::UhligSvd);
  CHECK(code_of([] { factor_kind_from_string("nope"); }) == Errc::InvalidInput);
  for (auto k : {FactorKind::Svd, FactorKind::CholX, FactorKind::CongruenceNs}) {
    CHECK(factor_kind_from_string(to_string(k)) == k);
  }
}
