#include "ndjac/measures.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "ndjac/error.hpp"

namespace ndjac {
namespace {

constexpr double kLogPi = 1.1447298858494002;  // log(pi)
constexpr double kLog2 = std::numbers::ln2;

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(Errc::InvalidInput, what);
}

void require_beta(int beta) { require(beta >= 1, "beta must be positive"); }

// Strictly decreasing positive spectrum of the stated length.
void require_spectrum(const std::vector<double>& v, int len, const char* name) {
  require(static_cast<int>(v.size()) == len,
          std::string(name) + " must have " + std::to_string(len) + " values, got " + std::to_string(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    require(std::isfinite(v[i]) && v[i] > 0.0, std::string(name) + " values must be positive");
    if (i > 0) require(v[i] < v[i - 1], std::string(name) + " must be strictly decreasing");
  }
}

void require_positive(const std::optional<double>& v, const char* name) {
  require(v.has_value(), std::string(name) + " is required");
  require(std::isfinite(*v) && *v > 0.0, std::string(name) + " must be positive");
}

double sum_log(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += std::log(x);
  return s;
}

// log prod_{i<j} (f(v_i) - f(v_j)) for a decreasing sequence
template <class F>
double log_vandermonde(const std::vector<double>& v, F f) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = i + 1; j < v.size(); ++j) s += std::log(std::abs(f(v[i]) - f(v[j])));
  }
  return s;
}

}  // namespace

std::string_view to_string(FactorKind kind) noexcept {
  switch (kind) {
    case FactorKind::Svd: return "svd";
    case FactorKind::Sd: return "sd";
    case FactorKind::Qr: return "qr";
    case FactorKind::Chol: return "chol";
    case FactorKind::W: return "w";
    case FactorKind::CholX: return "chol-x";
    case FactorKind::MpHerm: return "mp-herm";
    case FactorKind::MpRect: return "mp-rect";
    case FactorKind::UhligSvd: return "uhlig-svd";
    case FactorKind::UhligQr: return "uhlig-qr";
    case FactorKind::UhligMp: return "uhlig-mp";
    case FactorKind::CongruenceNs: return "congruence-ns";
  }
  return "unknown";
}

FactorKind factor_kind_from_string(std::string_view name) {
  for (auto k : {FactorKind::Svd, FactorKind::Sd, FactorKind::Qr, FactorKind::Chol, FactorKind::W, FactorKind::CholX,
                 FactorKind::MpHerm, FactorKind::MpRect, FactorKind::UhligSvd, FactorKind::UhligQr, FactorKind::UhligMp,
                 FactorKind::CongruenceNs}) {
    if (to_string(k) == name) return k;
  }
  throw Error(Errc::InvalidInput, "unknown factor kind '" + std::string(name) + "'");
}

double tau(int beta, int q) {
  if (beta != 1 && beta != 2 && beta != 4 && beta != 8) {
    throw Error(Errc::InvalidInput, "tau: beta must be 1, 2, 4 or 8");
  }
  return beta == 1 ? 0.0 : -0.5 * beta * q;
}

double mv_gamma_log(int m, int beta, double a) {
  require_beta(beta);
  require(m >= 0, "mv_gamma_log: m must be non-negative");
  const double bound = 0.5 * (m - 1) * beta;
  if (!(a > bound)) {
    throw Error(Errc::Domain, "mv_gamma_log: need a > (m-1) beta / 2 = " + std::to_string(bound));
  }
  double s = 0.25 * m * (m - 1) * beta * kLogPi;
  for (int i = 0; i < m; ++i) s += std::lgamma(a - 0.5 * i * beta);
  return s;
}

double stiefel_volume_log(int m, int n, int beta) {
  require_beta(beta);
  if (m < 0 || m > n) throw Error(Errc::Domain, "stiefel_volume_log: need 0 <= m <= n");
  return m * kLog2 + 0.5 * m * n * beta * kLogPi - mv_gamma_log(m, beta, 0.5 * n * beta);
}

double decomposition_density_log(FactorKind kind, const FactorInput& in) {
  require_beta(in.beta);
  const double b = in.beta;
  const int q = in.q;
  require(q >= 0, "q must be non-negative");
  switch (kind) {
    case FactorKind::Svd: {
      require(q <= std::min(in.n, in.m), "svd: need q <= min(n, m)");
      require_spectrum(in.d, q, "d");
      const double expo = b * (in.n + in.m - 2 * q + 1) - 1;
      return -q * kLog2 + tau(in.beta, q) * kLogPi + expo * sum_log(in.d) +
             b * log_vandermonde(in.d, [](double x) { return x * x; });
    }
    case FactorKind::Sd: {
      require(q <= in.m, "sd: need q <= m");
      require_spectrum(in.lambda, q, "lambda");
      return -q * kLog2 + tau(in.beta, q) * kLogPi + b * (in.m - q) * sum_log(in.lambda) +
             b * log_vandermonde(in.lambda, [](double x) { return x; });
    }
    case FactorKind::Qr: {
      require(q <= std::min(in.n, in.m), "qr: need q <= min(n, m)");
      require(static_cast<int>(in.t_diag.size()) == q, "qr: need q diagonal entries of T");
      double s = 0.0;
      for (int i = 1; i <= q; ++i) {
        const double t = in.t_diag[static_cast<std::size_t>(i - 1)];
        require(t > 0.0, "qr: diagonal of T must be positive");
        s += (b * (in.n - i + 1) - 1) * std::log(t);
      }
      return s;
    }
    case FactorKind::Chol: {
      require(q <= in.m, "chol: need q <= m");
      require(static_cast<int>(in.t_diag.size()) == q, "chol: need q diagonal entries of T");
      double s = q * kLog2;
      for (int i = 1; i <= q; ++i) {
        const double t = in.t_diag[static_cast<std::size_t>(i - 1)];
        require(t > 0.0, "chol: diagonal of T must be positive");
        s += (b * (in.m - i) + 1) * std::log(t);
      }
      return s;
    }
    default:
      throw Error(Errc::InvalidInput, "decomposition_density_log does not evaluate " + std::string(to_string(kind)));
  }
}

double transform_factor_log(FactorKind kind, const FactorInput& in) {
  require_beta(in.beta);
  const double b = in.beta;
  switch (kind) {
    case FactorKind::MpHerm: {
      require(in.q >= 0 && in.q <= in.m, "mp-herm: need 0 <= q <= m");
      require_spectrum(in.lambda, in.q, "lambda");
      return (b * (-2 * in.m + in.q + 1) - 2) * sum_log(in.lambda);
    }
    case FactorKind::MpRect: {
      require(in.q >= 0 && in.q <= std::min(in.n, in.m), "mp-rect: need 0 <= q <= min(n, m)");
      require_spectrum(in.d, in.q, "d");
      return -2.0 * b * (in.m + in.n - in.q) * sum_log(in.d);
    }
    case FactorKind::UhligSvd:
    case FactorKind::UhligMp: {
      require(in.n >= 0 && in.n <= in.m, "uhlig: need 0 <= n <= m");
      require_spectrum(in.delta, in.n, "delta");
      require_spectrum(in.lambda, in.n, "lambda");
      require_positive(in.det_b, "det_b");
      const double a = b * (in.m - in.n - 1) / 2.0 + 1.0;
      const double lam_expo = kind == FactorKind::UhligSvd ? -a : -b * (3 * in.m - in.n - 1) / 2.0 - 1.0;
      return b * in.n * std::log(*in.det_b) + a * sum_log(in.delta) + lam_expo * sum_log(in.lambda);
    }
    case FactorKind::UhligQr: {
      require(in.n >= 0 && in.n <= in.m, "uhlig-qr: need 0 <= n <= m");
      require_positive(in.det_t1, "det_t1");
      require_positive(in.det_l1, "det_l1");
      require_positive(in.det_b, "det_b");
      const double a = b * (in.m - in.n - 1) / 2.0 + 1.0;
      return a * std::log(*in.det_t1) - a * std::log(*in.det_l1) + b * in.n * std::log(*in.det_b);
    }
    case FactorKind::CongruenceNs: {
      require(in.m >= 1, "congruence-ns: need m >= 1");
      require_positive(in.det_b, "det_b");
      return (b * (in.m - 1) + 2) * std::log(*in.det_b);
    }
    default:
      throw Error(Errc::InvalidInput, "transform_factor_log does not evaluate " + std::string(to_string(kind)));
  }
}

double coupling_factor_log(FactorKind kind, const FactorInput& in) {
  require_beta(in.beta);
  const double b = in.beta;
  const double expo = b * (in.n - in.m + 1) / 2.0 - 1.0;
  switch (kind) {
    case FactorKind::W: {
      require(in.q >= 0 && in.q <= std::min(in.n, in.m), "w: need 0 <= q <= min(n, m)");
      require_spectrum(in.lambda, in.q, "lambda");
      return -in.q * kLog2 + expo * sum_log(in.lambda);
    }
    case FactorKind::CholX: {
      require(in.q >= 0 && in.q <= std::min(in.n, in.m), "chol-x: need 0 <= q <= min(n, m)");
      if (in.q == 0) return 0.0;
      require_positive(in.det_s11, "det_s11");
      return -in.q * kLog2 + expo * std::log(*in.det_s11);
    }
    default:
      throw Error(Errc::InvalidInput, "coupling_factor_log does not evaluate " + std::string(to_string(kind)));
  }
}

double factor_log(FactorKind kind, const FactorInput& in) {
  switch (kind) {
    case FactorKind::Svd:
    case FactorKind::Sd:
    case FactorKind::Qr:
    case FactorKind::Chol:
      return decomposition_density_log(kind, in);
    case FactorKind::W:
    case FactorKind::CholX:
      return coupling_factor_log(kind, in);
    default:
      return transform_factor_log(kind, in);
  }
}

}  // namespace ndjac
