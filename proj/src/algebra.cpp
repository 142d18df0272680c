#include "ndjac/algebra.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace ndjac {

Algebra algebra_from_beta(int beta) {
  switch (beta) {
    case 1: return Algebra::Real;
    case 2: return Algebra::Complex;
    case 4: return Algebra::Quaternion;
    case 8: return Algebra::Octonion;
    default: throw Error(Errc::InvalidInput, "beta must be 1, 2, 4 or 8, got " + std::to_string(beta));
  }
}

const char* algebra_name(Algebra kind) noexcept {
  switch (kind) {
    case Algebra::Real: return "real";
    case Algebra::Complex: return "complex";
    case Algebra::Quaternion: return "quaternion";
    case Algebra::Octonion: return "octonion";
  }
  return "unknown";
}

Rational alpha(Algebra kind) noexcept {
  switch (kind) {
    case Algebra::Real: return {2, 1};
    case Algebra::Complex: return {1, 1};
    case Algebra::Quaternion: return {1, 2};
    case Algebra::Octonion: return {1, 4};
  }
  return {0, 1};
}

Rational t_param(Algebra kind) noexcept {
  switch (kind) {
    case Algebra::Real: return {1, 4};
    case Algebra::Complex: return {1, 2};
    case Algebra::Quaternion: return {1, 1};
    case Algebra::Octonion: return {2, 1};
  }
  return {0, 1};
}

namespace detail {
namespace {

template <int N>
void conj_into(const double* a, double* out) noexcept {
  out[0] = a[0];
  for (int k = 1; k < N; ++k) out[k] = -a[k];
}

template <int N>
void mul_fixed(const double* a, const double* b, double* out) noexcept {
  if constexpr (N == 1) {
    out[0] = a[0] * b[0];
  } else {
    constexpr int H = N / 2;
    const double* p = a;
    const double* q = a + H;
    const double* r = b;
    const double* s = b + H;
    double sc[H];
    double rc[H];
    double t1[H];
    double t2[H];
    conj_into<H>(s, sc);
    conj_into<H>(r, rc);
    mul_fixed<H>(p, r, t1);
    mul_fixed<H>(sc, q, t2);
    for (int k = 0; k < H; ++k) out[k] = t1[k] - t2[k];
    mul_fixed<H>(s, p, t1);
    mul_fixed<H>(q, rc, t2);
    for (int k = 0; k < H; ++k) out[H + k] = t1[k] + t2[k];
  }
}

}  // namespace

void cd_mul(int beta, const double* a, const double* b, double* out) noexcept {
  switch (beta) {
    case 1: mul_fixed<1>(a, b, out); break;
    case 2: mul_fixed<2>(a, b, out); break;
    case 4: mul_fixed<4>(a, b, out); break;
    case 8: mul_fixed<8>(a, b, out); break;
    default: break;
  }
}

void cd_mul_add(int beta, const double* a, const double* b, double* out) noexcept {
  if (beta == 1) {
    out[0] += a[0] * b[0];
    return;
  }
  double tmp[8];
  cd_mul(beta, a, b, tmp);
  for (int k = 0; k < beta; ++k) out[k] += tmp[k];
}

}  // namespace detail

Scalar::Scalar(Algebra kind, std::span<const double> coeffs) : kind_(kind) {
  if (coeffs.size() != static_cast<std::size_t>(beta())) {
    throw Error(Errc::InvalidInput, "scalar needs " + std::to_string(beta()) + " coefficients, got " +
                                        std::to_string(coeffs.size()));
  }
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    if (!std::isfinite(coeffs[k])) throw Error(Errc::InvalidInput, "non-finite scalar coefficient");
    c_[k] = coeffs[k];
  }
}

Scalar Scalar::real(Algebra kind, double value) noexcept {
  Scalar s(kind);
  s.c_[0] = value;
  return s;
}

Scalar Scalar::basis(Algebra kind, int index) {
  if (index < 0 || index >= ndjac::beta(kind)) throw Error(Errc::InvalidInput, "basis index out of range");
  Scalar s(kind);
  s.c_[static_cast<std::size_t>(index)] = 1.0;
  return s;
}

Scalar& Scalar::operator+=(const Scalar& other) {
  if (other.kind_ != kind_) throw Error(Errc::TagMismatch, "scalar addition across algebras");
  for (int k = 0; k < beta(); ++k) c_[k] += other.c_[k];
  return *this;
}

Scalar& Scalar::operator-=(const Scalar& other) {
  if (other.kind_ != kind_) throw Error(Errc::TagMismatch, "scalar subtraction across algebras");
  for (int k = 0; k < beta(); ++k) c_[k] -= other.c_[k];
  return *this;
}

Scalar& Scalar::operator*=(double s) noexcept {
  for (int k = 0; k < beta(); ++k) c_[k] *= s;
  return *this;
}

Scalar mul(const Scalar& a, const Scalar& b) {
  if (a.kind() != b.kind()) throw Error(Errc::TagMismatch, "scalar product across algebras");
  Scalar out(a.kind());
  detail::cd_mul(a.beta(), a.coeffs().data(), b.coeffs().data(), out.coeffs().data());
  return out;
}

Scalar conj(const Scalar& a) noexcept {
  Scalar out = a;
  for (int k = 1; k < a.beta(); ++k) out[k] = -a[k];
  return out;
}

double norm2(const Scalar& a) noexcept {
  double s = 0.0;
  for (double c : a.coeffs()) s += c * c;
  return s;
}

double norm(const Scalar& a) noexcept { return std::sqrt(norm2(a)); }

Scalar inv(const Scalar& a) {
  const double n2 = norm2(a);
  if (n2 == 0.0) throw Error(Errc::DivisionByZero, "inverse of zero scalar");
  Scalar out = conj(a);
  out *= 1.0 / n2;
  return out;
}

Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
Scalar operator-(Scalar a) noexcept { return a *= -1.0; }
Scalar operator*(const Scalar& a, const Scalar& b) { return mul(a, b); }
Scalar operator*(double s, Scalar a) noexcept { return a *= s; }
Scalar operator*(Scalar a, double s) noexcept { return a *= s; }

double max_abs_diff(const Scalar& a, const Scalar& b) noexcept {
  if (a.kind() != b.kind()) return std::numeric_limits<double>::infinity();
  double m = 0.0;
  for (int k = 0; k < a.beta(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

}  // namespace ndjac
