#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "ndjac/linalg.hpp"
#include "ndjac/random.hpp"

namespace ndjac {

/// Row and column orders: the pivoted matrix is permute(A, rows, cols).
struct Pivot {
  std::vector<std::size_t> rows;
  std::vector<std::size_t> cols;

  static Pivot identity(std::size_t n, std::size_t m);
  friend bool operator==(const Pivot&, const Pivot&) = default;
};

/// Independent entries (X11, X12, X21) of a rank-q n x m matrix. The
/// remaining block is X22 = X21 X11^{-1} X12.
struct RectChartPoint {
  Algebra kind = Algebra::Real;
  std::size_t n = 0, m = 0, q = 0;
  Pivot pivot;
  Mat x11, x12, x21;
};

/// Independent entries (S11, S12) of a rank-q m x m PSD matrix, with
/// S22 = S12* S11^{-1} S12. Diagonal entries of S11 are real.
struct PsdChartPoint {
  Algebra kind = Algebra::Real;
  std::size_t m = 0, q = 0;
  std::vector<std::size_t> perm;
  Mat s11, s12;
};

/// (n q + m q - q^2) beta
std::size_t rect_chart_dim(std::size_t n, std::size_t m, std::size_t q, int beta);
/// beta m q - beta q (q+1)/2 + q
std::size_t psd_chart_dim(std::size_t m, std::size_t q, int beta);

Mat complete_rect(const RectChartPoint& p);
Mat complete_psd(const PsdChartPoint& p);

RectChartPoint extract_rect(const Mat& a, std::size_t q, const Pivot& pivot);
PsdChartPoint extract_psd(const Mat& s, std::size_t q, std::span<const std::size_t> perm);

/// Greedy complete pivoting over q elimination steps.
Pivot choose_pivot(const Mat& a, std::size_t q);
/// Greedy diagonal pivoting (pivoted Cholesky order) for Hermitian PSD input.
std::vector<std::size_t> choose_pivot_psd(const Mat& s, std::size_t q);

std::vector<double> chart_coords(const RectChartPoint& p);
std::vector<double> chart_coords(const PsdChartPoint& p);
/// Same shape and pivot as `shape`, coordinates replaced.
RectChartPoint with_coords(const RectChartPoint& shape, std::span<const double> coords);
PsdChartPoint with_coords(const PsdChartPoint& shape, std::span<const double> coords);

/// Coordinates of the entries on or above the diagonal of a q x m matrix,
/// diagonal entries contributing only their real part. Shared by PSD charts
/// and Cholesky factors.
std::vector<double> staircase_coords(const Mat& upper);
Mat staircase_from_coords(Algebra kind, std::size_t q, std::size_t m, std::span<const double> coords);
std::size_t staircase_dim(std::size_t q, std::size_t m, int beta);

/// Central-difference derivative of `embed` (flattened to its real
/// coefficients) at x, with per-coordinate step max(step, step |x_i|).
Eigen::MatrixXd chart_tangent(const std::function<Mat(std::span<const double>)>& embed, std::span<const double> x,
                              double step);
/// 0.5 log det(G^T G).
double log_gram_volume(const Eigen::MatrixXd& g);

double hausdorff_density(const RectChartPoint& p, double step = 1e-5);
double hausdorff_density(const PsdChartPoint& p, double step = 1e-5);
double log_hausdorff_density(const RectChartPoint& p, double step = 1e-5);
double log_hausdorff_density(const PsdChartPoint& p, double step = 1e-5);

/// Invariant-measure sample of an n x q matrix with orthonormal columns.
Mat sample_stiefel_uniform(std::size_t n, std::size_t q, Algebra kind, Rng& rng);

/// Orthonormal frame of the column space of c * G with G Gaussian, uniformly
/// rotated inside that space (angular central Gaussian with Sigma = c c*). log_density is relative to the
/// invariant probability measure: -beta q/2 log|Sigma| - beta n/2 log|W* Sigma^-1 W|.
struct FrameDraw {
  Mat frame;
  double log_density = 0.0;
};
FrameDraw sample_stiefel_acg(const Mat& c, std::size_t q, Rng& rng);
double stiefel_acg_log_density(const Mat& c, const Mat& frame);

enum class FactorizedSpace { Sd, Svd };

struct SpectrumBox {
  double lo = 1.0;
  double hi = 2.0;
  double gap = 0.0;  // minimum separation of consecutive values
};

/// Fraction of sorted uniform spectra in the box that respect the gap.
double gap_acceptance_probability(std::size_t q, const SpectrumBox& box);
/// Throws Errc::Configuration when the box is empty or rejects > 99%.
void check_box_feasible(std::size_t q, const SpectrumBox& box);

struct FactorizedDraw {
  Mat matrix;
  std::vector<double> spectrum;  // descending
  Mat left;                      // V1 (Svd only)
  Mat right;                     // W1
  double log_weight = 0.0;       // density of the factorised measure at the draw
  double log_constant = 0.0;     // log of box volume / q! times Stiefel masses
  bool accepted = false;         // false when the gap rule rejected the draw
};

/// One draw from the factorised measure on rank-q matrices: the spectrum is
/// uniform on the sorted box, frames are uniform. The pair
/// (log_weight + log_constant) turns draw averages into integrals over
/// the factorised measure; rejected draws count as zero.
/// Svd: X = V1 D W1* is n x m. Sd: S = W1 Lambda W1* is m x m (n unused).
FactorizedDraw sample_factorized(FactorizedSpace space, std::size_t n, std::size_t m, std::size_t q, Algebra kind,
                                 const SpectrumBox& box, Rng& rng);

}  // namespace ndjac
