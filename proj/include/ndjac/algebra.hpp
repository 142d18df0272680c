#pragma once

#include <array>
#include <cstddef>
#include <span>

#include "ndjac/error.hpp"

namespace ndjac {

/// The four real normed division algebras, tagged by real dimension.
enum class Algebra : int { Real = 1, Complex = 2, Quaternion = 4, Octonion = 8 };

constexpr int beta(Algebra kind) noexcept { return static_cast<int>(kind); }

/// Throws Errc::InvalidInput unless beta is 1, 2, 4 or 8.
Algebra algebra_from_beta(int beta);

const char* algebra_name(Algebra kind) noexcept;

struct Rational {
  int num;
  int den;

  double value() const noexcept { return static_cast<double>(num) / den; }
  friend bool operator==(const Rational&, const Rational&) = default;
};

/// alpha = 2 / beta, reduced.
Rational alpha(Algebra kind) noexcept;
/// t = beta / 4, reduced.
Rational t_param(Algebra kind) noexcept;

namespace detail {

// Cayley-Dickson product on raw coefficient arrays of length beta:
// (p, q)(r, s) = (p r - conj(s) q, s p + q conj(r)).
void cd_mul(int beta, const double* a, const double* b, double* out) noexcept;

// out += a * b
void cd_mul_add(int beta, const double* a, const double* b, double* out) noexcept;

}  // namespace detail

/// An element of R, C, H or O stored as beta real coefficients on the basis
/// e_0 = 1, e_1, ..., e_{beta-1}.
class Scalar {
 public:
  static constexpr int kMaxBeta = 8;

  explicit Scalar(Algebra kind = Algebra::Real) noexcept : kind_(kind) {}
  /// Throws Errc::InvalidInput if coeffs.size() != beta(kind) or a value is
  /// not finite.
  Scalar(Algebra kind, std::span<const double> coeffs);

  static Scalar real(Algebra kind, double value) noexcept;
  static Scalar basis(Algebra kind, int index);

  Algebra kind() const noexcept { return kind_; }
  int beta() const noexcept { return ndjac::beta(kind_); }

  double operator[](int k) const noexcept { return c_[static_cast<std::size_t>(k)]; }
  double& operator[](int k) noexcept { return c_[static_cast<std::size_t>(k)]; }

  std::span<const double> coeffs() const noexcept { return {c_.data(), static_cast<std::size_t>(beta())}; }
  std::span<double> coeffs() noexcept { return {c_.data(), static_cast<std::size_t>(beta())}; }

  double re() const noexcept { return c_[0]; }

  Scalar& operator+=(const Scalar& other);
  Scalar& operator-=(const Scalar& other);
  Scalar& operator*=(double s) noexcept;

 private:
  Algebra kind_;
  std::array<double, kMaxBeta> c_{};
};

Scalar mul(const Scalar& a, const Scalar& b);
Scalar conj(const Scalar& a) noexcept;
double norm(const Scalar& a) noexcept;
double norm2(const Scalar& a) noexcept;
/// conj(a) / norm(a)^2; throws Errc::DivisionByZero for a = 0.
Scalar inv(const Scalar& a);

Scalar operator+(Scalar a, const Scalar& b);
Scalar operator-(Scalar a, const Scalar& b);
Scalar operator-(Scalar a) noexcept;
Scalar operator*(const Scalar& a, const Scalar& b);
Scalar operator*(double s, Scalar a) noexcept;
Scalar operator*(Scalar a, double s) noexcept;

/// Largest coefficient difference; infinity when the tags differ.
double max_abs_diff(const Scalar& a, const Scalar& b) noexcept;

}  // namespace ndjac
