#include <cmath>
#include <fstream>

#include <doctest.h>
#include <json.hpp>

#include "helpers.hpp"
#include "ndjac/algebra.hpp"

using namespace ndjac;
using testing_util::make;
using testing_util::random_scalar;

TEST_CASE("alpha and t follow beta") {
  for (auto k : {Algebra::Real, Algebra::Complex, Algebra::Quaternion, Algebra::Octonion}) {
    CHECK(alpha(k).value() * beta(k) == doctest::Approx(2.0));
    CHECK(4.0 * t_param(k).value() == doctest::Approx(beta(k)));
  }
  CHECK(alpha(Algebra::Quaternion) == Rational{1, 2});
  CHECK_THROWS_AS(algebra_from_beta(3), Error);
}

TEST_CASE("products of basis elements") {
  CHECK(mul(Scalar::real(Algebra::Real, 3), Scalar::real(Algebra::Real, 4)).re() == 12.0);
  const auto i = Scalar::basis(Algebra::Quaternion, 1);
  const auto j = Scalar::basis(Algebra::Quaternion, 2);
  const auto k = Scalar::basis(Algebra::Quaternion, 3);
  CHECK(max_abs_diff(i * j, k) == 0.0);
  CHECK(max_abs_diff(j * i, -k) == 0.0);
}

TEST_CASE("octonion table matches the frozen golden file") {
  std::ifstream in(NDJAC_TEST_DATA_DIR "/octonion_table.json");
  REQUIRE(in);
  nlohmann::json golden;
  in >> golden;
  REQUIRE(golden["beta"] == 8);
  for (int a = 0; a < 8; ++a) {
    for (int b = 0; b < 8; ++b) {
      const auto p = Scalar::basis(Algebra::Octonion, a) * Scalar::basis(Algebra::Octonion, b);
      const int sign = golden["table"][a][b][0];
      const int idx = golden["table"][a][b][1];
      for (int c = 0; c < 8; ++c) CHECK(p[c] == (c == idx ? double(sign) : 0.0));
    }
  }
}

TEST_CASE("conjugation") {
  CHECK(conj(Scalar::real(Algebra::Real, 5)).re() == 5.0);
  CHECK(max_abs_diff(conj(make(Algebra::Complex, {1, 2})), make(Algebra::Complex, {1, -2})) == 0.0);
  Rng rng = substream(1, 2, 3);
  for (int t = 0; t < 100; ++t) {
    const auto a = random_scalar(Algebra::Quaternion, rng);
    const auto b = random_scalar(Algebra::Quaternion, rng);
    CHECK(max_abs_diff(conj(a * b), conj(b) * conj(a)) < 1e-12);
  }
}

TEST_CASE("norm") {
  CHECK(norm(make(Algebra::Quaternion, {1, 1, 1, 1})) == doctest::Approx(2.0));
  for (auto k : {Algebra::Real, Algebra::Complex, Algebra::Quaternion, Algebra::Octonion}) {
    CHECK(norm(Scalar::real(k, 1.0)) == 1.0);
  }
  Rng rng = substream(5, 0, 0);
  for (int t = 0; t < 200; ++t) {
    const auto a = random_scalar(Algebra::Octonion, rng);
    const auto b = random_scalar(Algebra::Octonion, rng);
    CHECK(std::abs(norm(a * b) - norm(a) * norm(b)) <= 1e-12 * norm(a) * norm(b));
  }
}

TEST_CASE("inverse") {
  CHECK(inv(Scalar::real(Algebra::Real, 4)).re() == 0.25);
  CHECK(max_abs_diff(inv(make(Algebra::Complex, {0, 1})), make(Algebra::Complex, {0, -1})) < 1e-15);
  CHECK(max_abs_diff(inv(make(Algebra::Quaternion, {1, 1, 0, 0})), make(Algebra::Quaternion, {0.5, -0.5, 0, 0})) <
        1e-15);
  Rng rng = substream(6, 0, 0);
  for (auto k : {Algebra::Complex, Algebra::Quaternion, Algebra::Octonion}) {
    const auto a = random_scalar(k, rng);
    CHECK(max_abs_diff(a * inv(a), Scalar::real(k, 1.0)) < 1e-12);
  }
  CHECK_THROWS_AS(inv(Scalar(Algebra::Quaternion)), Error);
  try {
    inv(Scalar(Algebra::Complex));
  } catch (const Error& e) {
    CHECK(e.code() == Errc::DivisionByZero);
  }
}

TEST_CASE("associative up to quaternions, alternative for octonions") {
  Rng rng = substream(7, 0, 0);
  for (auto k : {Algebra::Real, Algebra::Complex, Algebra::Quaternion}) {
    for (int t = 0; t < 100; ++t) {
      const auto a = random_scalar(k, rng), b = random_scalar(k, rng), c = random_scalar(k, rng);
      CHECK(max_abs_diff((a * b) * c, a * (b * c)) < 1e-12);
    }
  }
  for (int t = 0; t < 100; ++t) {
    const auto a = random_scalar(Algebra::Octonion, rng), b = random_scalar(Algebra::Octonion, rng);
    CHECK(max_abs_diff((a * a) * b, a * (a * b)) < 1e-12);
    CHECK(max_abs_diff((b * a) * a, b * (a * a)) < 1e-12);
  }
  const auto e1 = Scalar::basis(Algebra::Octonion, 1);
  const auto e2 = Scalar::basis(Algebra::Octonion, 2);
  const auto e4 = Scalar::basis(Algebra::Octonion, 4);
  CHECK(max_abs_diff((e1 * e2) * e4, e1 * (e2 * e4)) > 1.0);
}

TEST_CASE("no zero divisors") {
  Rng rng = substream(8, 0, 0);
  const auto a = random_scalar(Algebra::Octonion, rng);
  const auto b = Scalar(Algebra::Octonion);
  CHECK(norm(a * b) == 0.0);
  // ab small forces b small
  const auto c = random_scalar(Algebra::Octonion, rng) * 1e-14;
  CHECK(norm(a * c) <= norm(a) * norm(c) * (1 + 1e-12));
}

TEST_CASE("tag mismatch and bad coefficients are rejected") {
  const auto a = Scalar::real(Algebra::Real, 1.0);
  const auto b = Scalar::real(Algebra::Complex, 1.0);
  try {
    mul(a, b);
    FAIL("expected an exception");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::TagMismatch);
  }
  const std::vector<double> two{1.0, 2.0};
  CHECK_THROWS_AS(Scalar(Algebra::Quaternion, two), Error);
  const std::vector<double> bad{NAN, 0.0};
  CHECK_THROWS_AS(Scalar(Algebra::Complex, bad), Error);
}
