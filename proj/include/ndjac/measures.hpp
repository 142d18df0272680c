#pragma once

#include <optional>
#include <string_view>
#include <vector>

namespace ndjac {

/// One closed-form Jacobian or density factor.
enum class FactorKind {
  Svd,           // density of the SVD-factorised measure
  Sd,            // density of the spectral-factorised measure
  Qr,            // density of the QR-factorised measure
  Chol,          // (dS) = 2^q prod t_ii^{beta(m-i)+1} (dT)
  W,             // (dX) in terms of (dS) and the left frame, S = X*X
  CholX,         // same with |S11| in place of |Lambda|
  MpHerm,        // S -> S^+ on rank-q Hermitian matrices
  MpRect,        // X -> X^+ on rank-q rectangular matrices
  UhligSvd,      // X = B* Y B, eigenvalue form
  UhligQr,       // X = B* Y B, Cholesky form
  UhligMp,       // X = B* Y^+ B
  CongruenceNs,  // X = B* Y B, nonsingular
};

std::string_view to_string(FactorKind kind) noexcept;
/// Accepts the CLI spellings ("mp-herm", "uhlig-svd", ...).
FactorKind factor_kind_from_string(std::string_view name);

/// Arguments of the factor formulas. Sizes follow the usual roles: X is
/// n x m of rank q; S is m x m of rank q; for the congruence kinds X and Y
/// are m x m of rank n.
struct FactorInput {
  int beta = 1;
  int m = 0;
  int n = 0;
  int q = 0;
  std::vector<double> d;       // singular values
  std::vector<double> lambda;  // eigenvalues (of S, or of Y)
  std::vector<double> delta;   // eigenvalues of X
  std::vector<double> t_diag;  // t_11 .. t_qq
  std::optional<double> det_b;
  std::optional<double> det_t1;   // |T1* T1|
  std::optional<double> det_l1;   // |L1* L1|
  std::optional<double> det_s11;  // |S11|
};

/// 0 for beta = 1, -beta q / 2 otherwise.
double tau(int beta, int q);

/// log Gamma_m^beta[a]; requires a > (m-1) beta / 2.
double mv_gamma_log(int m, int beta, double a);

/// log of the total mass 2^m pi^{m n beta/2} / Gamma_m^beta[n beta/2] of the
/// Stiefel manifold of n x m matrices with orthonormal columns.
double stiefel_volume_log(int m, int n, int beta);

/// Svd, Sd, Qr, Chol.
double decomposition_density_log(FactorKind kind, const FactorInput& in);
/// MpHerm, MpRect, UhligSvd, UhligQr, UhligMp, CongruenceNs. Signs dropped.
double transform_factor_log(FactorKind kind, const FactorInput& in);
/// W, CholX.
double coupling_factor_log(FactorKind kind, const FactorInput& in);

/// Dispatches to whichever of the three evaluators owns `kind`.
double factor_log(FactorKind kind, const FactorInput& in);

}  // namespace ndjac
